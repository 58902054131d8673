//! q-ary block codes and their language invariants.
//!
//! A code is an explicit list of distinct words in `{0..q-1}^n`;
//! nonlinear codes are welcome, so the information parameter
//! `k = log_q(#C)` is a real number. The code language (all finite
//! concatenations of codewords) has structure function
//! `s_C(N) = (#C)^{N/n}` for `n | N` and 0 otherwise, entropy equal to
//! the rate `R = k/n`, and a geometric zeta function
//! `ζ_D(s) = Σ_m (#C)^m q^{-snm}`, convergent exactly for `s > R`. The
//! minimum distance shows up geometrically: axis-parallel planes of
//! dimension `≤ d-1` meet the code at most once.
//!
//! Text format (the on-disk interface): a header line `q n`, then one
//! codeword per line; for `q ≤ 10` a word is a string of digits, for
//! larger alphabets a whitespace-separated list of symbol values.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::math;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodeError {
    #[error("words must share one length")]
    LengthMismatch,
    #[error("symbol {0} out of range for alphabet size {1}")]
    SymbolOutOfRange(u32, u32),
    #[error("duplicate codeword at line {0}")]
    DuplicateWord(usize),
    #[error("a code needs at least one word")]
    Empty,
    #[error("minimum distance undefined for a singleton code")]
    SingletonCode,
    #[error("extension would exceed the enumeration guard (10^6 words)")]
    TooLarge,
    #[error("parse error: {0}")]
    Parse(String),
}

/// A q-ary block code: alphabet size, block length, and the codeword
/// list (distinct words, symbols below q).
#[derive(Debug, Clone, PartialEq)]
pub struct Code {
    q: u32,
    n: usize,
    words: Vec<Vec<u32>>,
}

impl Code {
    pub fn new(q: u32, n: usize, words: Vec<Vec<u32>>) -> Result<Self, CodeError> {
        if words.is_empty() {
            return Err(CodeError::Empty);
        }
        for w in &words {
            if w.len() != n {
                return Err(CodeError::LengthMismatch);
            }
            for &s in w {
                if s >= q {
                    return Err(CodeError::SymbolOutOfRange(s, q));
                }
            }
        }
        let mut sorted = words.clone();
        sorted.sort();
        for (i, pair) in sorted.windows(2).enumerate() {
            if pair[0] == pair[1] {
                return Err(CodeError::DuplicateWord(i + 1));
            }
        }
        Ok(Self { q, n, words })
    }

    /// The binary repetition code `{000, 111}` of length `n`.
    pub fn repetition(n: usize) -> Self {
        Self {
            q: 2,
            n,
            words: alloc::vec![alloc::vec![0; n], alloc::vec![1; n]],
        }
    }

    /// The `[7, 4, 3]` Hamming code, enumerated from its standard
    /// systematic generator matrix.
    pub fn hamming_7_4() -> Self {
        let gen: [[u32; 7]; 4] = [
            [1, 0, 0, 0, 1, 1, 0],
            [0, 1, 0, 0, 1, 0, 1],
            [0, 0, 1, 0, 0, 1, 1],
            [0, 0, 0, 1, 1, 1, 1],
        ];
        let mut words = Vec::with_capacity(16);
        for msg in 0..16u32 {
            let mut w = alloc::vec![0u32; 7];
            for (row, g) in gen.iter().enumerate() {
                if msg >> row & 1 == 1 {
                    for (j, &gj) in g.iter().enumerate() {
                        w[j] ^= gj;
                    }
                }
            }
            words.push(w);
        }
        Self { q: 2, n: 7, words }
    }

    /// The full cube `{0..q-1}^n`.
    pub fn full_cube(q: u32, n: usize) -> Result<Self, CodeError> {
        let size = (q as u64)
            .checked_pow(n as u32)
            .ok_or(CodeError::TooLarge)?;
        if size > 1_000_000 {
            return Err(CodeError::TooLarge);
        }
        let mut words = Vec::with_capacity(size as usize);
        for mut idx in 0..size {
            let mut w = alloc::vec![0u32; n];
            for j in (0..n).rev() {
                w[j] = (idx % q as u64) as u32;
                idx /= q as u64;
            }
            words.push(w);
        }
        Ok(Self { q, n, words })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn block_length(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[Vec<u32>] {
        &self.words
    }

    /// Parse the plain-text format: header `q n`, one codeword per line.
    pub fn parse(text: &str) -> Result<Self, CodeError> {
        let mut lines = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let header = lines.next().ok_or(CodeError::Empty)?;
        let mut parts = header.split_whitespace();
        let q: u32 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CodeError::Parse(String::from("header must be `q n`")))?;
        let n: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CodeError::Parse(String::from("header must be `q n`")))?;
        if q < 2 {
            return Err(CodeError::Parse(String::from(
                "alphabet size must be at least 2",
            )));
        }
        let mut words = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.trim();
            let word: Vec<u32> = if q <= 10 {
                line.chars()
                    .map(|c| {
                        c.to_digit(10).ok_or_else(|| {
                            CodeError::Parse(format!("bad digit on line {}", lineno + 2))
                        })
                    })
                    .collect::<Result<_, _>>()?
            } else {
                line.split_whitespace()
                    .map(|t| {
                        t.parse().map_err(|_| {
                            CodeError::Parse(format!("bad symbol on line {}", lineno + 2))
                        })
                    })
                    .collect::<Result<_, _>>()?
            };
            words.push(word);
        }
        Self::new(q, n, words)
    }

    /// Serialise in the same format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.q, self.n);
        for w in &self.words {
            if self.q <= 10 {
                for &s in w {
                    out.push(char::from_digit(s, 10).expect("symbol < 10"));
                }
            } else {
                let parts: Vec<String> = w.iter().map(|s| format!("{s}")).collect();
                out.push_str(&parts.join(" "));
            }
            out.push('\n');
        }
        out
    }
}

/// Hamming distance: the number of differing coordinates.
pub fn hamming(x: &[u32], y: &[u32]) -> Result<usize, CodeError> {
    if x.len() != y.len() {
        return Err(CodeError::LengthMismatch);
    }
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count())
}

/// Derived parameters of a code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeParams {
    /// `k = log_q(#C)`; a real number for nonlinear codes.
    pub k: f64,
    /// Minimum pairwise Hamming distance, exhaustively computed.
    pub d: usize,
    /// Rate `R = k/n`.
    pub rate: f64,
    /// Relative minimum distance `δ = d/n`.
    pub delta: f64,
}

pub fn code_params(code: &Code) -> Result<CodeParams, CodeError> {
    if code.len() < 2 {
        return Err(CodeError::SingletonCode);
    }
    let k = math::log_base(code.len() as f64, code.q() as f64);
    let mut d = code.block_length();
    for (i, x) in code.words().iter().enumerate() {
        for y in &code.words()[i + 1..] {
            d = d.min(hamming(x, y)?);
        }
    }
    Ok(CodeParams {
        k,
        d,
        rate: k / code.block_length() as f64,
        delta: d as f64 / code.block_length() as f64,
    })
}

/// Structure function `s_C(N)`: the number of words of alphabet-length
/// `N` in the code language, i.e. `(#C)^{N/n}` when `n | N`, else 0.
pub fn structure_function(code: &Code, big_n: usize) -> u64 {
    let n = code.block_length();
    if big_n == 0 || big_n % n != 0 {
        return 0;
    }
    (code.len() as u64).pow((big_n / n) as u32)
}

/// Independent oracle: enumerate all concatenations of `m` codewords and
/// count distinct strings (they are automatically distinct, but the
/// enumeration does not assume it). Guarded at 10^6.
pub fn structure_function_by_enumeration(code: &Code, m: usize) -> Result<u64, CodeError> {
    let total = (code.len() as u64)
        .checked_pow(m as u32)
        .ok_or(CodeError::TooLarge)?;
    if total > 1_000_000 {
        return Err(CodeError::TooLarge);
    }
    let mut strings: Vec<Vec<u32>> = alloc::vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(strings.len() * code.len());
        for s in &strings {
            for w in code.words() {
                let mut t = s.clone();
                t.extend_from_slice(w);
                next.push(t);
            }
        }
        strings = next;
    }
    strings.sort();
    strings.dedup();
    Ok(strings.len() as u64)
}

/// Entropy of the code language via the root test at finite depth:
/// `-log_q((s_C(nm))^{-1/(nm)})`; the growth is exactly geometric, so
/// this equals the rate for every `m ≥ 1`.
pub fn entropy(code: &Code, m: usize) -> f64 {
    let n = code.block_length();
    let s = structure_function(code, n * m) as f64;
    math::log_base(math::powf(s, 1.0 / (n * m) as f64), code.q() as f64)
}

/// Partial zeta sum, its geometric closed form, and the remainder bound.
#[derive(Debug, Clone)]
pub struct ZetaEvaluation {
    pub s: f64,
    /// `Σ_{m=1..m_max} (#C)^m q^{-snm}`.
    pub partial_sum: f64,
    /// `x / (1 - x)` with `x = (#C) q^{-sn} = q^{(R-s)n}`, when `x < 1`:
    /// the geometric form the term-by-term series actually sums to.
    pub closed_form: Option<f64>,
    /// The per-letter variant `y / (1 - y)` with `y = q^{R-s}`, which
    /// drops the block length from the exponent; it coincides with
    /// `closed_form` only when `n = 1` and is reported for comparison.
    pub per_letter_closed_form: Option<f64>,
    /// `x^{m_max+1} / (1 - x)`, when convergent.
    pub remainder_bound: Option<f64>,
    /// True when `x ≥ 1`, i.e. `s ≤ R`: the series diverges.
    pub divergent: bool,
}

/// Evaluate `ζ_D(s) = Σ_{w} q^{-|w|s}` over the code language by terms
/// grouped by word count, with the geometric closed form alongside.
pub fn code_zeta(code: &Code, s: f64, m_max: usize) -> ZetaEvaluation {
    let q = code.q() as f64;
    let n = code.block_length() as f64;
    let rate = math::log_base(code.len() as f64, q) / n;
    let x = code.len() as f64 * math::powf(q, -s * n);
    let y = math::powf(q, rate - s);
    let mut partial_sum = 0.0;
    let mut term = 1.0;
    for _ in 1..=m_max {
        term *= x;
        partial_sum += term;
    }
    if x >= 1.0 {
        ZetaEvaluation {
            s,
            partial_sum,
            closed_form: None,
            per_letter_closed_form: None,
            remainder_bound: None,
            divergent: true,
        }
    } else {
        ZetaEvaluation {
            s,
            partial_sum,
            closed_form: Some(x / (1.0 - x)),
            per_letter_closed_form: if y < 1.0 { Some(y / (1.0 - y)) } else { None },
            remainder_bound: Some(math::powf(x, (m_max + 1) as f64) / (1.0 - x)),
            divergent: false,
        }
    }
}

/// Hausdorff dimension of the code fractal and its ambient-normalised
/// value: `(log_q #C, R)`.
pub fn hausdorff_dims(code: &Code) -> (f64, f64) {
    let k = math::log_base(code.len() as f64, code.q() as f64);
    (k, k / code.block_length() as f64)
}

/// Outcome of the coordinate-plane scan at a given plane dimension.
#[derive(Debug, Clone)]
pub struct PlaneCheck {
    /// Plane dimension `ℓ`.
    pub ell: usize,
    /// Largest number of codewords on one axis-parallel ℓ-plane.
    pub max_points: usize,
    /// A plane realising the maximum: the fixed coordinates and their
    /// values.
    pub witness: Option<(Vec<usize>, Vec<u32>)>,
}

/// Exhaustive scan over axis-parallel planes of dimension `ℓ`: fix any
/// `n - ℓ` coordinates at values realised by codewords and count the
/// codewords on the plane. For `ℓ ≤ d-1` every plane holds at most one
/// codeword; at `ℓ = d` some plane holds at least two.
pub fn coordinate_plane_check(code: &Code, ell: usize) -> PlaneCheck {
    let n = code.block_length();
    let fixed = n - ell;
    // Enumerate coordinate subsets of size `fixed` by bitmask.
    let mut best: usize = 0;
    let mut witness = None;
    let mut subset = Vec::with_capacity(fixed);
    let masks = 1u64 << n;
    for mask in 0..masks {
        if (mask.count_ones() as usize) != fixed {
            continue;
        }
        subset.clear();
        for j in 0..n {
            if mask >> j & 1 == 1 {
                subset.push(j);
            }
        }
        // Group codewords by their restriction to the fixed coordinates.
        let mut groups: alloc::collections::BTreeMap<Vec<u32>, usize> =
            alloc::collections::BTreeMap::new();
        for w in code.words() {
            let key: Vec<u32> = subset.iter().map(|&j| w[j]).collect();
            *groups.entry(key).or_insert(0) += 1;
        }
        for (key, count) in groups {
            if count > best {
                best = count;
                witness = Some((subset.clone(), key));
            }
        }
    }
    PlaneCheck {
        ell,
        max_points: best,
        witness,
    }
}

/// Extend the code to the field extension alphabet `q^m`:
/// `C_(m)(u) = (C(u_1), …, C(u_m))` with `F_{q^m} = F_q^m` identified
/// symbol-wise; `#C_(m) = (#C)^m` and the rate is preserved.
pub fn extend_code(code: &Code, m: usize) -> Result<Code, CodeError> {
    if m == 0 {
        return Err(CodeError::Empty);
    }
    let size = (code.len() as u64)
        .checked_pow(m as u32)
        .ok_or(CodeError::TooLarge)?;
    if size > 1_000_000 {
        return Err(CodeError::TooLarge);
    }
    let qm = (code.q() as u64)
        .checked_pow(m as u32)
        .ok_or(CodeError::TooLarge)?;
    if qm > u32::MAX as u64 {
        return Err(CodeError::TooLarge);
    }
    let n = code.block_length();
    let mut words = Vec::with_capacity(size as usize);
    let mut tuple = alloc::vec![0usize; m];
    loop {
        // interleave the m codewords symbol-wise: position j carries the
        // base-q digits (c_1[j], …, c_m[j]) as one q^m symbol.
        let mut w = alloc::vec![0u32; n];
        for j in 0..n {
            let mut sym: u64 = 0;
            for &t in tuple.iter().rev() {
                sym = sym * code.q() as u64 + code.words()[t][j] as u64;
            }
            w[j] = sym as u32;
        }
        words.push(w);
        // advance the mixed-radix tuple
        let mut i = 0;
        loop {
            if i == m {
                return Code::new(qm as u32, n, words);
            }
            tuple[i] += 1;
            if tuple[i] < code.len() {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&[0, 0, 0], &[0, 0, 0]).unwrap(), 0);
        assert_eq!(hamming(&[0, 0, 0], &[1, 1, 1]).unwrap(), 3);
        assert!(hamming(&[0], &[0, 1]).is_err());
        // metric axioms on a few triples
        let words = [[0u32, 1, 2], [2, 1, 0], [0, 1, 0]];
        for x in &words {
            for y in &words {
                let d = hamming(x, y).unwrap();
                assert_eq!(d, hamming(y, x).unwrap());
                assert!(d <= 3);
                for z in &words {
                    assert!(hamming(x, z).unwrap() <= d + hamming(y, z).unwrap());
                }
            }
        }
    }

    #[test]
    fn params_examples() {
        let rep = Code::repetition(3);
        let p = code_params(&rep).unwrap();
        assert_eq!(p.k, 1.0);
        assert_eq!(p.d, 3);
        assert!((p.rate - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.delta, 1.0);

        let ham = Code::hamming_7_4();
        assert_eq!(ham.len(), 16);
        let p = code_params(&ham).unwrap();
        assert!((p.k - 4.0).abs() < 1e-12);
        assert_eq!(p.d, 3);
        assert!((p.rate - 4.0 / 7.0).abs() < 1e-12);
        assert!((p.delta - 3.0 / 7.0).abs() < 1e-12);

        let cube = Code::full_cube(2, 3).unwrap();
        let p = code_params(&cube).unwrap();
        assert!((p.k - 3.0).abs() < 1e-12);
        assert_eq!(p.d, 1);
        assert!((p.rate - 1.0).abs() < 1e-12);

        let single = Code::new(2, 3, alloc::vec![alloc::vec![0, 0, 0]]).unwrap();
        assert!(matches!(
            code_params(&single),
            Err(CodeError::SingletonCode)
        ));
    }

    #[test]
    fn structure_function_and_entropy() {
        let rep = Code::repetition(3);
        assert_eq!(structure_function(&rep, 3), 2);
        assert_eq!(structure_function(&rep, 6), 4);
        assert_eq!(structure_function(&rep, 4), 0);
        assert_eq!(structure_function_by_enumeration(&rep, 2).unwrap(), 4);
        assert_eq!(structure_function_by_enumeration(&rep, 3).unwrap(), 8);
        // entropy equals the rate exactly (geometric growth)
        for m in 1..=6 {
            assert!((entropy(&rep, m) - 1.0 / 3.0).abs() < 1e-9);
        }
        let ham = Code::hamming_7_4();
        assert!((entropy(&ham, 4) - 4.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn zeta_examples() {
        let rep = Code::repetition(3);
        // s = 1: x = 2·2^{-3} = 1/4, ζ = (1/4)/(3/4) = 1/3.
        let z = code_zeta(&rep, 1.0, 40);
        assert!(!z.divergent);
        let cf = z.closed_form.unwrap();
        assert!((cf - 1.0 / 3.0).abs() < 1e-12);
        assert!((z.partial_sum - cf).abs() <= z.remainder_bound.unwrap() + 1e-15);
        // huge s: essentially zero
        let z = code_zeta(&rep, 40.0, 10);
        assert!(z.partial_sum < 1e-30);
        // s = R exactly: x = 1, flagged divergent, partial sums grow linearly
        let rate = code_params(&rep).unwrap().rate;
        let z = code_zeta(&rep, rate, 100);
        assert!(z.divergent);
        assert!((z.partial_sum - 100.0).abs() < 1e-9);
    }

    #[test]
    fn zeta_closed_form_conventions_differ_unless_length_one() {
        // The per-letter form drops the block length from the exponent:
        // for n = 1 the two conventions agree, for n > 1 they do not.
        let unary = Code::full_cube(3, 1).unwrap();
        let z = code_zeta(&unary, 2.0, 30);
        let block = z.closed_form.unwrap();
        let letter = z.per_letter_closed_form.unwrap();
        assert!((block - letter).abs() < 1e-12);

        let rep = Code::repetition(3);
        let z = code_zeta(&rep, 1.0, 30);
        let block = z.closed_form.unwrap();
        let letter = z.per_letter_closed_form.unwrap();
        assert!((z.partial_sum - block).abs() <= z.remainder_bound.unwrap() + 1e-15);
        assert!((block - letter).abs() > 0.1, "{block} vs {letter}");
    }

    #[test]
    fn zeta_remainder_bound_holds() {
        for code in [Code::repetition(3), Code::hamming_7_4()] {
            let rate = code_params(&code).unwrap().rate;
            for ds in [0.1, 0.5, 1.0] {
                let z = code_zeta(&code, rate + ds, 25);
                let cf = z.closed_form.unwrap();
                let rem = z.remainder_bound.unwrap();
                let defect = (cf - z.partial_sum).abs();
                assert!(defect <= rem + 1e-12, "defect {defect} vs bound {rem}");
            }
        }
    }

    #[test]
    fn hausdorff_examples() {
        let (dim, norm) = hausdorff_dims(&Code::full_cube(2, 3).unwrap());
        assert!((dim - 3.0).abs() < 1e-12 && (norm - 1.0).abs() < 1e-12);
        let (dim, norm) = hausdorff_dims(&Code::repetition(3));
        assert!((dim - 1.0).abs() < 1e-12 && (norm - 1.0 / 3.0).abs() < 1e-12);
        let (dim, norm) = hausdorff_dims(&Code::hamming_7_4());
        assert!((dim - 4.0).abs() < 1e-12 && (norm - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn coordinate_planes() {
        let rep = Code::repetition(3);
        // ℓ ≤ d-1 = 2: every plane meets the code at most once.
        for ell in 0..=2 {
            let check = coordinate_plane_check(&rep, ell);
            assert_eq!(check.max_points, 1, "ell = {ell}");
        }
        // ℓ = d = 3: the full cube contains both codewords.
        let check = coordinate_plane_check(&rep, 3);
        assert_eq!(check.max_points, 2);
        assert!(check.witness.is_some());

        let ham = Code::hamming_7_4();
        for ell in 0..=2 {
            assert_eq!(
                coordinate_plane_check(&ham, ell).max_points,
                1,
                "ell = {ell}"
            );
        }
        assert!(coordinate_plane_check(&ham, 3).max_points >= 2);

        // full cube, ℓ = 0: singleton planes each meet exactly one word.
        let cube = Code::full_cube(2, 3).unwrap();
        assert_eq!(coordinate_plane_check(&cube, 0).max_points, 1);
    }

    #[test]
    fn extension_codes() {
        let rep = Code::repetition(3);
        // m = 1 is the code itself up to symbol relabelling.
        let same = extend_code(&rep, 1).unwrap();
        assert_eq!(same.len(), 2);
        assert_eq!(same.q(), 2);
        // m = 2: 4 codewords over alphabet 4, distance ≤ 3.
        let ext = extend_code(&rep, 2).unwrap();
        assert_eq!(ext.len(), 4);
        assert_eq!(ext.q(), 4);
        let p = code_params(&ext).unwrap();
        assert!(p.d <= 3);
        // rate preserved exactly for m ≤ 3; δ never increases.
        let base = code_params(&rep).unwrap();
        for m in 1..=3 {
            let ext = extend_code(&rep, m).unwrap();
            let p = code_params(&ext).unwrap();
            assert!((p.rate - base.rate).abs() < 1e-12);
            assert!(p.delta <= base.delta + 1e-12);
            assert_eq!(ext.len() as u64, (rep.len() as u64).pow(m as u32));
        }
    }

    #[test]
    fn text_round_trip() {
        for code in [
            Code::repetition(3),
            Code::hamming_7_4(),
            extend_code(&Code::repetition(3), 2).unwrap(),
        ] {
            let text = code.to_text();
            let parsed = Code::parse(&text).unwrap();
            assert_eq!(parsed, code);
        }
        assert!(Code::parse("2 3\n000\n000\n").is_err());
        assert!(Code::parse("junk\n").is_err());
    }
}
