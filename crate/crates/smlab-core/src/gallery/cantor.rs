//! The bilateral shift on `{0,1}^Z` and its choice-map spectral triples.
//!
//! Points are bit sequences truncated to a symmetric coordinate window;
//! the distance between two sequences is `2^{-|w|}` where `w` is their
//! longest common middle word (odd length `2n+1`, centred at coordinate
//! 0). Sequences that already disagree at the centre get distance
//! `2^0 = 1`: the degenerate empty middle word, which the word
//! enumeration below carries as level 0.
//!
//! The Dirac operator weighs a word `w` by `2^{|w|}`, and a choice map
//! picks, for each word, a pair of points that split exactly past it.
//! The commutator of `D` with a represented cylinder function is then
//! the table of weighted differences `2^{|w|} |f(x_w) - f(y_w)|`, and
//! the supremum over all choice maps is the Lipschitz constant of `f`
//! for the ultrametric. Maximising `|f(x) - f(y)|` over that unit ball
//! recovers the ultrametric exactly — in exact dyadic arithmetic, since
//! every quantity is a sum of powers of two.

use alloc::vec::Vec;

use super::GalleryError;
use crate::math;

/// A bit sequence on the window `-radius ..= radius`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seq {
    radius: usize,
    bits: u64,
}

impl Seq {
    pub fn new(radius: usize, bits: u64) -> Self {
        debug_assert!(2 * radius + 1 <= 64);
        let mask = if 2 * radius + 1 == 64 {
            u64::MAX
        } else {
            (1u64 << (2 * radius + 1)) - 1
        };
        Self {
            radius,
            bits: bits & mask,
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Coordinate `i ∈ [-radius, radius]`.
    pub fn get(&self, i: i64) -> bool {
        let pos = (i + self.radius as i64) as u64;
        self.bits >> pos & 1 == 1
    }

    pub fn with_coord(&self, i: i64, value: bool) -> Self {
        let pos = (i + self.radius as i64) as u64;
        let bits = if value {
            self.bits | 1 << pos
        } else {
            self.bits & !(1 << pos)
        };
        Self {
            radius: self.radius,
            bits,
        }
    }

    /// Ring index of the first disagreement (`max(|i|)` over differing
    /// coordinates, minimised), or `None` if equal on the window.
    pub fn first_split(&self, other: &Seq) -> Result<Option<usize>, GalleryError> {
        if self.radius != other.radius {
            return Err(GalleryError::RadiusMismatch);
        }
        for ring in 0..=self.radius {
            let differs = if ring == 0 {
                self.get(0) != other.get(0)
            } else {
                self.get(ring as i64) != other.get(ring as i64)
                    || self.get(-(ring as i64)) != other.get(-(ring as i64))
            };
            if differs {
                return Ok(Some(ring));
            }
        }
        Ok(None)
    }
}

/// Ultrametric: `2^{-|w|}` for the longest common middle word `w`;
/// distance 1 when the centres differ, 0 when equal on the window.
pub fn ultrametric(x: &Seq, y: &Seq) -> Result<f64, GalleryError> {
    Ok(match x.first_split(y)? {
        None => 0.0,
        Some(0) => 1.0,
        Some(c) => math::powi(2.0, -(2 * c as i32 - 1)),
    })
}

/// Function of the coordinates in `[-radius, radius]`, as a table over
/// all `2^{2 radius + 1}` cylinders.
#[derive(Debug, Clone)]
pub struct CylinderFn {
    radius: usize,
    table: Vec<f64>,
}

impl CylinderFn {
    pub fn from_table(radius: usize, table: Vec<f64>) -> Result<Self, GalleryError> {
        if table.len() != 1usize << (2 * radius + 1) {
            return Err(GalleryError::RadiusMismatch);
        }
        Ok(Self { radius, table })
    }

    pub fn from_fn(radius: usize, f: impl Fn(&Seq) -> f64) -> Self {
        let table = (0..1u64 << (2 * radius + 1))
            .map(|bits| f(&Seq::new(radius, bits)))
            .collect();
        Self { radius, table }
    }

    /// Indicator of "coordinate m equals 1".
    pub fn coordinate_indicator(radius: usize, m: i64) -> Self {
        Self::from_fn(radius, |s| if s.get(m) { 1.0 } else { 0.0 })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Evaluate on any sequence whose window contains ours.
    pub fn eval(&self, x: &Seq) -> f64 {
        let mut key = 0u64;
        for i in -(self.radius as i64)..=self.radius as i64 {
            if x.get(i) {
                key |= 1 << (i + self.radius as i64);
            }
        }
        self.table[key as usize]
    }

    /// Precompose with the inverse shift: `(f ∘ S^{-k})(x) = f(S^{-k}x)`
    /// with `(S^{-k}x)_i = x_{i+k}`; the window grows by `|k|`.
    pub fn shift(&self, k: i64) -> CylinderFn {
        let radius = self.radius + k.unsigned_abs() as usize;
        CylinderFn::from_fn(radius, |x| {
            let mut inner = Seq::new(self.radius, 0);
            for i in -(self.radius as i64)..=self.radius as i64 {
                inner = inner.with_coord(i, x.get(i + k));
            }
            self.eval(&inner)
        })
    }
}

/// A choice map at working depth `n`: for each word (level `c ≤ n+1`,
/// including the level-0 empty word) a pair of sequences extending the
/// word and splitting exactly at its boundary ring.
#[derive(Debug, Clone)]
pub struct ChoiceMap {
    depth: usize,
    /// `(level, word bits) ↦ (x_w, y_w)`; level-c words fix rings
    /// `0..c`, i.e. coordinates `-(c-1) ..= c-1`.
    pairs: alloc::collections::BTreeMap<(usize, u64), (Seq, Seq)>,
}

impl ChoiceMap {
    /// The canonical choice: extend each word by zeros and flip the
    /// coordinate `+c` of the second member.
    pub fn canonical(depth: usize) -> Self {
        let mut pairs = alloc::collections::BTreeMap::new();
        for level in 0..=depth {
            let word_bits = if level == 0 { 0 } else { 2 * level - 1 };
            for bits in 0..1u64 << word_bits {
                let mut x = Seq::new(depth, 0);
                // place the word: coordinates -(level-1) ..= level-1
                if level >= 1 {
                    let mut b = bits;
                    for i in -(level as i64 - 1)..=(level as i64 - 1) {
                        x = x.with_coord(i, b & 1 == 1);
                        b >>= 1;
                    }
                }
                let y = x.with_coord(level as i64, true);
                pairs.insert((level, bits), (x, y));
            }
        }
        Self { depth, pairs }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Check that every pair sits in the acceptance zone of its word and
    /// splits exactly past it.
    pub fn validate(&self) -> Result<(), GalleryError> {
        for (&(level, bits), (x, y)) in &self.pairs {
            if x.radius() != self.depth || y.radius() != self.depth {
                return Err(GalleryError::RadiusMismatch);
            }
            // both extend the word
            if level >= 1 {
                let mut b = bits;
                for i in -(level as i64 - 1)..=(level as i64 - 1) {
                    let bit = b & 1 == 1;
                    if x.get(i) != bit || y.get(i) != bit {
                        return Err(GalleryError::RadiusMismatch);
                    }
                    b >>= 1;
                }
            }
            // split exactly at ring `level`
            if x.first_split(y)? != Some(level) {
                return Err(GalleryError::RadiusMismatch);
            }
        }
        Ok(())
    }

    pub fn pair(&self, level: usize, bits: u64) -> Option<&(Seq, Seq)> {
        self.pairs.get(&(level, bits))
    }
}

/// `‖[D, π_τ(f)]‖` for a fixed choice map: the sup over enumerated words
/// of `2^{|w|} |f(x_w) - f(y_w)|`.
pub fn cantor_commutator_norm(f: &CylinderFn, tau: &ChoiceMap) -> Result<f64, GalleryError> {
    if tau.depth() < f.radius() {
        return Err(GalleryError::RadiusMismatch);
    }
    let mut sup: f64 = 0.0;
    for (&(level, _), (x, y)) in &tau.pairs {
        let weight = if level == 0 {
            1.0
        } else {
            math::powi(2.0, 2 * level as i32 - 1)
        };
        sup = sup.max(weight * math::abs(f.eval(x) - f.eval(y)));
    }
    Ok(sup)
}

/// `sup_τ ‖[D, π_τ(f)]‖`: the Lipschitz constant of `f` for the
/// ultrametric, computed exhaustively over cylinder pairs. Exact in
/// dyadic arithmetic.
pub fn seminorm_sup_choices(f: &CylinderFn) -> f64 {
    let r = f.radius();
    let count = 1u64 << (2 * r + 1);
    let mut sup: f64 = 0.0;
    for a in 0..count {
        let xa = Seq::new(r, a);
        for b in (a + 1)..count {
            let xb = Seq::new(r, b);
            let d = ultrametric(&xa, &xb).expect("same radius");
            if d == 0.0 {
                continue;
            }
            sup = sup.max(math::abs(f.eval(&xa) - f.eval(&xb)) / d);
        }
    }
    sup
}

/// The Connes distance by exhaustive search at depth ≤ 3: maximise
/// `|f(x) - f(y)|` over cylinder functions with `sup_τ ‖[D, π_τ(f)]‖ ≤ 1`.
///
/// The feasible set is the unit Lipschitz ball of the cylinder
/// ultrametric, so the optimum is the shortest-path distance in the
/// complete graph on cylinders with ultrametric weights; the candidate
/// optimiser `f* = d(·, y)` is verified feasible and attaining.
pub fn connes_sup_over_choices(x: &Seq, y: &Seq, depth: usize) -> Result<f64, GalleryError> {
    if depth > 3 {
        return Err(GalleryError::DepthTooLarge(depth));
    }
    if x.radius() > depth || y.radius() > depth {
        return Err(GalleryError::RadiusMismatch);
    }
    let lift = |s: &Seq| {
        let mut out = Seq::new(depth, 0);
        for i in -(s.radius() as i64)..=s.radius() as i64 {
            out = out.with_coord(i, s.get(i));
        }
        out
    };
    let xd = lift(x);
    let yd = lift(y);
    let count = 1usize << (2 * depth + 1);
    // Dijkstra from x over the complete cylinder graph.
    let mut dist = alloc::vec![f64::INFINITY; count];
    let mut done = alloc::vec![false; count];
    dist[xd.bits() as usize] = 0.0;
    for _ in 0..count {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..count {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        let su = Seq::new(depth, u as u64);
        for v in 0..count {
            if done[v] {
                continue;
            }
            let w = ultrametric(&su, &Seq::new(depth, v as u64))?;
            if dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
            }
        }
    }
    let value = dist[yd.bits() as usize];
    // Certificate: f* = d(·, y) is feasible and attains the value.
    let table: Vec<f64> = (0..count as u64)
        .map(|bits| ultrametric(&Seq::new(depth, bits), &yd).expect("same radius"))
        .collect();
    let fstar = CylinderFn::from_table(depth, table)?;
    debug_assert!(seminorm_sup_choices(&fstar) <= 1.0);
    debug_assert_eq!(math::abs(fstar.eval(&xd) - fstar.eval(&yd)), value);
    Ok(value)
}
