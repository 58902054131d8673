//! Noncommutative tori with real multiplication.
//!
//! For a squarefree `D > 1` the field `Q(√D)` embeds the module
//! `Z + Zθ` into `R²` by its two real embeddings; the fundamental
//! totally positive unit `ε` acts through the integer matrix `φ_ε`
//! (row-vector action), diagonalised to `A_ε = diag(ε, ε')` in the
//! embedding coordinates. The twisted group algebra of the lattice with
//! cocycle `σ(η, λ) = exp(-iπθ η∧λ)` carries the Dirac operator with
//! symbols `(n + mθ', n + mθ)`, and the unit acts hyperbolically:
//! commutator norms along the orbit grow at rate `ε`, the exact analogue
//! of the cat map.
//!
//! The crossed product by the unit is assembled on
//! `ℓ²(modes) ⊗ C² ⊗ ℓ²(window)` with the Dirac operator
//! `D̂ = -σ3 n log(ε) + D_{θ,θ'}`. With the shift convention
//! `(υf)_n = f_{n-1}` this satisfies both `υ b υ^{-1} = (α_ε)_*(b)` and
//! `[D̂, υ] = -σ3 log(ε) υ` exactly on interior blocks; the sign of the
//! diagonal is forced by asking for the two identities simultaneously.

use alloc::vec::Vec;

use super::GalleryError;
use crate::eigen::operator_norm;
use crate::math;
use crate::matrix::{commutator, CMatrix, C64, ZERO};

/// A real quadratic field prepared for real multiplication: the module
/// generator θ, its conjugate, the fundamental totally positive unit and
/// its integer matrix.
#[derive(Debug, Clone)]
pub struct RMField {
    pub d: u64,
    pub theta: f64,
    pub theta_conj: f64,
    pub eps: f64,
    pub eps_conj: f64,
    /// `φ_ε = [[a, b], [c, d]]` with `ε = a + bθ`, `εθ = c + dθ`.
    pub phi: [[i64; 2]; 2],
}

fn is_squarefree(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= d {
        if d % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Solve for the field data of `Q(√D)`.
///
/// θ follows the ring-of-integers convention: `(1+√D)/2` for
/// `D ≡ 1 (mod 4)`, `√D` otherwise. The unit search walks
/// `ε = x + yθ` with growing `y` until the norm form equals 1.
pub fn rm_setup(d: u64) -> Result<RMField, GalleryError> {
    if !is_squarefree(d) {
        return Err(GalleryError::NotSquarefree(d));
    }
    let sqrt_d = math::sqrt(d as f64);
    // trace and norm of θ: θ + θ' = c1, θθ' = c0.
    let (theta, theta_conj, c1, c0): (f64, f64, i64, i64) = if d % 4 == 1 {
        (
            (1.0 + sqrt_d) / 2.0,
            (1.0 - sqrt_d) / 2.0,
            1,
            (1 - d as i64) / 4,
        )
    } else {
        (sqrt_d, -sqrt_d, 0, -(d as i64))
    };
    // N(x + yθ) = x² + c1·xy + c0·y² = 1 with ε = x + yθ > 1.
    let mut found: Option<(i64, i64)> = None;
    'search: for y in 1i64..=100_000 {
        let disc = c1 * c1 * y * y - 4 * (c0 * y * y - 1);
        if disc < 0 {
            continue;
        }
        let root = math::sqrt(disc as f64) as i64;
        for r in [root - 1, root, root + 1] {
            if r >= 0 && r * r == disc {
                for sign in [1i64, -1] {
                    let num = -c1 * y + sign * r;
                    if num % 2 != 0 {
                        continue;
                    }
                    let x = num / 2;
                    let eps = x as f64 + y as f64 * theta;
                    if eps > 1.0 + 1e-9 {
                        found = Some((x, y));
                        break 'search;
                    }
                }
            }
        }
    }
    let (x, y) = found.ok_or(GalleryError::UnitNotFound)?;
    let eps = x as f64 + y as f64 * theta;
    let eps_conj = x as f64 + y as f64 * theta_conj;
    // εθ = xθ + yθ² = -y c0 + (x + y c1) θ.
    let phi = [[x, y], [-y * c0, x + y * c1]];
    Ok(RMField {
        d,
        theta,
        theta_conj,
        eps,
        eps_conj,
        phi,
    })
}

impl RMField {
    /// Defects of the defining relations, all expected ≈ 0: the unit
    /// norm `εε' - 1`, the matrix relations, and the Möbius fixed-point
    /// equation of `φ_εᵀ` at θ.
    pub fn relation_defects(&self) -> (f64, f64, f64) {
        let norm = math::abs(self.eps * self.eps_conj - 1.0);
        let [a, b] = self.phi[0];
        let [c, dd] = self.phi[1];
        let rel1 = math::abs(self.eps - (a as f64 + b as f64 * self.theta));
        let rel2 = math::abs(self.eps * self.theta - (c as f64 + dd as f64 * self.theta));
        let moebius = math::abs(
            (c as f64 + dd as f64 * self.theta) / (a as f64 + b as f64 * self.theta) - self.theta,
        );
        (norm, rel1.max(rel2), moebius)
    }

    pub fn det_phi(&self) -> i64 {
        self.phi[0][0] * self.phi[1][1] - self.phi[0][1] * self.phi[1][0]
    }

    /// Row-vector action `λ ↦ λ φ_ε^k`.
    pub fn apply_phi(&self, lam: (i64, i64), k: i64) -> Result<(i64, i64), GalleryError> {
        let fwd = self.phi;
        // φ^{-1} for det 1: [[d, -b], [-c, a]].
        let inv = [
            [self.phi[1][1], -self.phi[0][1]],
            [-self.phi[1][0], self.phi[0][0]],
        ];
        let step = if k >= 0 { fwd } else { inv };
        let mut v = lam;
        for _ in 0..k.abs() {
            let x = (v.0 as i128) * (step[0][0] as i128) + (v.1 as i128) * (step[1][0] as i128);
            let y = (v.0 as i128) * (step[0][1] as i128) + (v.1 as i128) * (step[1][1] as i128);
            if x.abs() > i64::MAX as i128 || y.abs() > i64::MAX as i128 {
                return Err(GalleryError::Overflow);
            }
            v = (x as i64, y as i64);
        }
        Ok(v)
    }

    /// Lattice embedding `(n, m) ↦ (n + mθ, n + mθ')`.
    pub fn embed(&self, lam: (i64, i64)) -> (f64, f64) {
        (
            lam.0 as f64 + lam.1 as f64 * self.theta,
            lam.0 as f64 + lam.1 as f64 * self.theta_conj,
        )
    }

    /// Field norm `N(λ) = x1·x2` of the embedded mode.
    pub fn field_norm(&self, lam: (i64, i64)) -> f64 {
        let (x1, x2) = self.embed(lam);
        x1 * x2
    }
}

/// Integer wedge `η ∧ λ = η_0 λ_1 - η_1 λ_0`.
pub fn wedge(eta: (i64, i64), lam: (i64, i64)) -> i128 {
    (eta.0 as i128) * (lam.1 as i128) - (eta.1 as i128) * (lam.0 as i128)
}

/// Cocycle `σ(η, λ) = exp(-iπθ η∧λ)`.
pub fn sigma_phase(theta: f64, eta: (i64, i64), lam: (i64, i64)) -> C64 {
    let arg = -math::PI * theta * wedge(eta, lam) as f64;
    C64::new(math::cos(arg), math::sin(arg))
}

/// Product of twisted generators: `R_η R_λ = σ(η,λ) R_{η+λ}`.
pub fn twisted_mode_product(eta: (i64, i64), lam: (i64, i64), theta: f64) -> (C64, (i64, i64)) {
    (sigma_phase(theta, eta, lam), (eta.0 + lam.0, eta.1 + lam.1))
}

/// Exact integer defect of the 2-cocycle identity
/// `σ(γ1,γ2) σ(γ1+γ2,γ3) = σ(γ1,γ2+γ3) σ(γ2,γ3)` in wedge exponents.
pub fn cocycle_defect(g1: (i64, i64), g2: (i64, i64), g3: (i64, i64)) -> i128 {
    wedge(g1, g2) + wedge((g1.0 + g2.0, g1.1 + g2.1), g3)
        - wedge(g1, (g2.0 + g3.0, g2.1 + g3.1))
        - wedge(g2, g3)
}

/// Exact integer defect of SL2-invariance `(ηφ) ∧ (λφ) = η ∧ λ`.
pub fn sl2_invariance_defect(
    field: &RMField,
    eta: (i64, i64),
    lam: (i64, i64),
) -> Result<i128, GalleryError> {
    let ep = field.apply_phi(eta, 1)?;
    let lp = field.apply_phi(lam, 1)?;
    Ok(wedge(ep, lp) - wedge(eta, lam))
}

/// The square mode box `|n|, |m| ≤ cutoff`, lexicographically ordered.
pub fn mode_box(cutoff: i64) -> Vec<(i64, i64)> {
    let mut v = Vec::new();
    for n in -cutoff..=cutoff {
        for m in -cutoff..=cutoff {
            v.push((n, m));
        }
    }
    v
}

fn mode_index(modes: &[(i64, i64)], lam: (i64, i64)) -> Option<usize> {
    modes.binary_search(&lam).ok()
}

/// Dirac spin symbol at an embedded mode:
/// `[[0, x2 - i·x1], [x2 + i·x1, 0]]`.
fn dirac_spin(field: &RMField, lam: (i64, i64)) -> CMatrix {
    let (x1, x2) = field.embed(lam);
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = C64::new(x2, -x1);
    m[(1, 0)] = C64::new(x2, x1);
    m
}

/// `D_{θ,θ'}` assembled on `ℓ²(modes) ⊗ C²` (block diagonal).
pub fn rm_dirac(modes: &[(i64, i64)], field: &RMField) -> CMatrix {
    let dim = modes.len() * 2;
    let mut m = CMatrix::zeros(dim, dim);
    for (i, &lam) in modes.iter().enumerate() {
        let spin = dirac_spin(field, lam);
        for s1 in 0..2 {
            for s2 in 0..2 {
                if spin[(s1, s2)] != ZERO {
                    m[(2 * i + s1, 2 * i + s2)] = spin[(s1, s2)];
                }
            }
        }
    }
    m
}

/// Twisted generator `R_η` on `ℓ²(modes) ⊗ C²`; truncated where the
/// target mode leaves the box. Errors if no column survives.
pub fn rm_generator(
    modes: &[(i64, i64)],
    field: &RMField,
    eta: (i64, i64),
) -> Result<CMatrix, GalleryError> {
    let dim = modes.len() * 2;
    let mut m = CMatrix::zeros(dim, dim);
    let mut hit = false;
    for (j, &lam) in modes.iter().enumerate() {
        let target = (lam.0 + eta.0, lam.1 + eta.1);
        if let Some(i) = mode_index(modes, target) {
            let phase = sigma_phase(field.theta, eta, lam);
            m[(2 * i, 2 * j)] = phase;
            m[(2 * i + 1, 2 * j + 1)] = phase;
            hit = true;
        }
    }
    if !hit {
        return Err(GalleryError::ModeEscape);
    }
    Ok(m)
}

/// `‖[D_{θ,θ'}, R_η]‖` from the assembled truncation; the closed form is
/// `|embed(η)|₂`.
pub fn rm_commutator_norm(
    modes: &[(i64, i64)],
    field: &RMField,
    eta: (i64, i64),
) -> Result<f64, GalleryError> {
    let d = rm_dirac(modes, field);
    let r = rm_generator(modes, field, eta)?;
    Ok(operator_norm(&commutator(&d, &r).expect("shape")))
}

/// Growth data of `‖[D, α_ε^k(R_λ)]‖ = |A_ε^k embed(λ)|` along the orbit.
pub fn rm_growth_ratios(
    field: &RMField,
    lam: (i64, i64),
    kmax: i64,
) -> Result<Vec<f64>, GalleryError> {
    let mut norms = Vec::new();
    for k in 0..=kmax {
        let moved = field.apply_phi(lam, k)?;
        let (x1, x2) = field.embed(moved);
        norms.push(math::hypot(x1, x2));
    }
    Ok(norms.windows(2).map(|w| w[1] / w[0]).collect())
}

/// The crossed-product assembly over the orbit window: operators act on
/// `ℓ²(modes) ⊗ C² ⊗ ℓ²(window)`, stored with the window index outermost.
#[derive(Debug, Clone)]
pub struct RmCrossed {
    pub field: RMField,
    pub modes: Vec<(i64, i64)>,
    pub window: crate::zline::Window,
}

impl RmCrossed {
    pub fn new(field: RMField, cutoff: i64, window: crate::zline::Window) -> Self {
        Self {
            field,
            modes: mode_box(cutoff),
            window,
        }
    }

    fn fiber_dim(&self) -> usize {
        self.modes.len() * 2
    }

    pub fn dim(&self) -> usize {
        self.window.len() * self.fiber_dim()
    }

    /// `D̂ = -σ3 n log(ε) + D_{θ,θ'}` blockwise.
    pub fn dhat(&self) -> CMatrix {
        let fd = self.fiber_dim();
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        let dtheta = rm_dirac(&self.modes, &self.field);
        let log_eps = math::ln(self.field.eps);
        for n in self.window.iter() {
            let base = ((n - self.window.lo()) as usize) * fd;
            for i in 0..fd {
                for j in 0..fd {
                    if dtheta[(i, j)] != ZERO {
                        m[(base + i, base + j)] += dtheta[(i, j)];
                    }
                }
                // -σ3 n log ε: spin index is the parity of the fibre slot.
                let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
                m[(base + i, base + i)] += C64::new(sign * n as f64 * log_eps, 0.0);
            }
        }
        m
    }

    /// The unit shift `(υf)_n = f_{n-1}`, truncated at the lower edge.
    pub fn upsilon(&self) -> CMatrix {
        let fd = self.fiber_dim();
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for n in self.window.iter().skip(1) {
            let row = ((n - self.window.lo()) as usize) * fd;
            let col = row - fd;
            for i in 0..fd {
                m[(row + i, col + i)] = C64::new(1.0, 0.0);
            }
        }
        m
    }

    /// Represent a window sequence of single generators `b_n = R_{λ_n}`:
    /// block `n` carries `α_ε^{-n}(b_n) = R_{λ_n φ^{-n}}`.
    pub fn represent(&self, lams: &[(i64, i64)]) -> Result<CMatrix, GalleryError> {
        let fd = self.fiber_dim();
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for n in self.window.iter() {
            let lam = lams[(n - self.window.lo()) as usize];
            let rotated = self.field.apply_phi(lam, -n)?;
            let block = rm_generator(&self.modes, &self.field, rotated)?;
            let base = ((n - self.window.lo()) as usize) * fd;
            for i in 0..fd {
                for j in 0..fd {
                    if block[(i, j)] != ZERO {
                        m[(base + i, base + j)] = block[(i, j)];
                    }
                }
            }
        }
        Ok(m)
    }

    /// Max-abs of a matrix over interior window blocks only.
    pub fn interior_max_abs(&self, m: &CMatrix, margin: i64) -> f64 {
        let fd = self.fiber_dim();
        let keep_lo = self.window.lo() + margin;
        let keep_hi = self.window.hi() - margin;
        let mut worst = 0.0f64;
        for i in 0..m.rows() {
            let ni = self.window.lo() + (i / fd) as i64;
            if ni < keep_lo || ni > keep_hi {
                continue;
            }
            for j in 0..m.cols() {
                let nj = self.window.lo() + (j / fd) as i64;
                if nj < keep_lo || nj > keep_hi {
                    continue;
                }
                worst = worst.max(m[(i, j)].norm());
            }
        }
        worst
    }

    /// Defect of `[D̂, υ_ε] = -σ3 log(ε) υ_ε` on interior blocks.
    pub fn unit_commutator_defect(&self) -> f64 {
        let dhat = self.dhat();
        let u = self.upsilon();
        let comm = commutator(&dhat, &u).expect("shape");
        // Expected: -σ3 log(ε) υ, with σ3 read off the spin parity of
        // the row index.
        let fd = self.fiber_dim();
        let log_eps = math::ln(self.field.eps);
        let mut expect = CMatrix::zeros(self.dim(), self.dim());
        for i in 0..self.dim() {
            let sigma3 = if (i % fd) % 2 == 0 { 1.0 } else { -1.0 };
            for j in 0..self.dim() {
                if u[(i, j)] != ZERO {
                    expect[(i, j)] = u[(i, j)] * C64::new(-sigma3 * log_eps, 0.0);
                }
            }
        }
        let diff = comm.sub(&expect).expect("shape");
        self.interior_max_abs(&diff, 1)
    }

    /// Defect of `υ b υ^{-1} = (α_ε)_*(b)` on interior blocks for a
    /// window sequence of generators.
    pub fn covariance_defect(&self, lams: &[(i64, i64)]) -> Result<f64, GalleryError> {
        let rep = self.represent(lams)?;
        let u = self.upsilon();
        let lhs = u
            .mul(&rep)
            .expect("shape")
            .mul(&u.adjoint())
            .expect("shape");
        // (α_*(b))_n = α(b_{n-1}): generator indices shift by one and map
        // through φ.
        let mut pushed = Vec::with_capacity(lams.len());
        for n in self.window.iter() {
            if n == self.window.lo() {
                pushed.push((0, 0)); // placeholder; masked out below
            } else {
                let prev = lams[(n - 1 - self.window.lo()) as usize];
                pushed.push(self.field.apply_phi(prev, 1)?);
            }
        }
        let rhs = self.represent(&pushed)?;
        let diff = lhs.sub(&rhs).expect("shape");
        Ok(self.interior_max_abs(&diff, 1))
    }

    /// Defect of the blockwise identity `[D̂, b] = [D_{θ,θ'}, α^{-n}(b_n)]`.
    pub fn blockwise_commutator_defect(&self, lams: &[(i64, i64)]) -> Result<f64, GalleryError> {
        let rep = self.represent(lams)?;
        let dhat = self.dhat();
        let lhs = commutator(&dhat, &rep).expect("shape");
        let fd = self.fiber_dim();
        let dtheta = rm_dirac(&self.modes, &self.field);
        let mut worst = 0.0f64;
        for n in self.window.iter() {
            let lam = lams[(n - self.window.lo()) as usize];
            let rotated = self.field.apply_phi(lam, -n)?;
            let block = commutator(&dtheta, &rm_generator(&self.modes, &self.field, rotated)?)
                .expect("shape");
            let base = ((n - self.window.lo()) as usize) * fd;
            for i in 0..fd {
                for j in 0..fd {
                    worst = worst.max((lhs[(base + i, base + j)] - block[(i, j)]).norm());
                }
            }
        }
        Ok(worst)
    }
}

/// Orbit decomposition `λ = A_ε^k(μ)` with `μ` in the logarithmic
/// fundamental sector `t(μ) = ln(|x1|/|x2|) / (2 ln ε) ∈ [0, 1)`.
///
/// Sector membership is decided in exact integer arithmetic:
/// `sign(x1² - x2²) = sign(b) · sign(2a + b·tr(θ))` for `μ = (a, b)`,
/// since `x1 - x2 = b(θ - θ')` with `θ - θ' > 0`. The float estimate of
/// `k` is only a starting point, so boundary modes (where `|x1| = |x2|`
/// exactly) decompose consistently along their whole orbit.
pub fn orbit_decompose(
    lam: (i64, i64),
    field: &RMField,
) -> Result<((i64, i64), i64), GalleryError> {
    if lam == (0, 0) {
        return Err(GalleryError::ZeroMode);
    }
    let trace: i128 = if field.d % 4 == 1 { 1 } else { 0 };
    // sign of |x1| - |x2| as an integer
    let cmp = |l: (i64, i64)| -> i32 {
        let (a, b) = (l.0 as i128, l.1 as i128);
        let v = b * (2 * a + b * trace);
        match v {
            0 => 0,
            v if v > 0 => 1,
            _ => -1,
        }
    };
    let t_of = |l: (i64, i64)| -> f64 {
        let (x1, x2) = field.embed(l);
        math::ln(math::abs(x1) / math::abs(x2)) / (2.0 * math::ln(field.eps))
    };
    let mut k = math::floor(t_of(lam)) as i64;
    loop {
        let mu = field.apply_phi(lam, -k)?;
        // In-sector: t(μ) ≥ 0 and t(μ) < 1, i.e. t(μφ^{-1}) < 0.
        if cmp(mu) < 0 {
            k -= 1;
        } else if cmp(field.apply_phi(mu, -1)?) >= 0 {
            k += 1;
        } else {
            return Ok((mu, k));
        }
    }
}
