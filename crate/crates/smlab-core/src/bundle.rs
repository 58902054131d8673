//! The space of Euclidean metrics and the noncommutative metric bundle.
//!
//! The first half is classical Riemannian geometry on the cone of
//! symmetric positive definite matrices with the scale-invariant line
//! element `ds² = Tr((Q^{-1}dQ)²)/d`: geodesics through the identity are
//! the curves `e^{sH}`, and the distance between the powers `Q^m`, `Q^n`
//! has the closed form `|m-n| sqrt(Tr((ln Q)²)/d)`. This is the metric
//! geometry that a hyperbolic toral automorphism traces along its orbit
//! of metrics.
//!
//! The second half assembles the metric-bundle Dirac operator on
//! `H ⊗ ℓ²(window × {1..rmax}) ⊗ C⁴`: ladder terms carry shift-invariant
//! difference quotients, the diagonal carries `γ3 n + γ4 / d_r²`, and
//! `γ5 ⊗ D` imports the base geometry. The orbit shift `u` obeys
//! `u^{-1}[D_B, u] = λ γ3` exactly on interior blocks, which is the
//! mechanism by which a non-equicontinuous action becomes isometric up
//! to a constant defect.

use alloc::vec;
use alloc::vec::Vec;

use crate::crossed::BaseTriple;
use crate::eigen::{hermitian_eigen, operator_norm};
use crate::math;
use crate::matrix::{CMatrix, C64, ZERO};
use crate::spin::{dirac_gammas, gamma_ladders};
use crate::zline::{Layout, TruncatedOperator, Window};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BundleError {
    #[error("matrix is not symmetric positive definite (min eigenvalue {0})")]
    NotSpd(f64),
    #[error("matrix must be symmetric")]
    NotSymmetric,
    #[error("dimension mismatch")]
    DimMismatch,
    #[error("curve needs at least two points")]
    CurveTooShort,
    #[error("bundle configuration invalid: {0}")]
    ConfigInvalid(&'static str),
    #[error("lambda must be nonzero")]
    ZeroLambda,
}

/// Real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat {
    dim: usize,
    entries: Vec<f64>,
}

impl SymMat {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self, BundleError> {
        if entries.len() != dim * dim {
            return Err(BundleError::DimMismatch);
        }
        for i in 0..dim {
            for j in 0..dim {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(BundleError::NotSymmetric);
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn diag(values: &[f64]) -> Self {
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * dim + i] = v;
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * t).collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        math::sqrt(self.entries.iter().map(|a| a * a).sum())
    }

    fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, self.dim, |i, j| C64::new(self.at(i, j), 0.0))
    }

    /// General (not necessarily symmetric) product, returned as raw rows.
    fn matmul(&self, other: &Self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += a * other.at(k, j);
                }
            }
        }
        out
    }

    /// Ascending eigenvalues and orthonormal column eigenvectors.
    pub fn eigen(&self) -> (Vec<f64>, CMatrix) {
        let eig = hermitian_eigen(&self.to_cmatrix()).expect("symmetric matrix");
        (eig.values, eig.vectors)
    }

    /// Apply a scalar function through the eigendecomposition.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        let (values, vectors) = self.eigen();
        let d = self.dim;
        let mut entries = vec![0.0; d * d];
        for (k, &lk) in values.iter().enumerate() {
            let fl = f(lk);
            for i in 0..d {
                for j in 0..d {
                    entries[i * d + j] += fl * (vectors[(i, k)] * vectors[(j, k)].conj()).re;
                }
            }
        }
        // Symmetrise away rounding noise.
        for i in 0..d {
            for j in (i + 1)..d {
                let avg = 0.5 * (entries[i * d + j] + entries[j * d + i]);
                entries[i * d + j] = avg;
                entries[j * d + i] = avg;
            }
        }
        Self { dim: d, entries }
    }
}

/// Symmetric positive definite matrix: a Euclidean metric on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SPDMatrix {
    mat: SymMat,
}

impl SPDMatrix {
    pub fn new(mat: SymMat) -> Result<Self, BundleError> {
        let (values, _) = mat.eigen();
        let min = values.first().copied().unwrap_or(0.0);
        if min <= 1e-12 {
            return Err(BundleError::NotSpd(min));
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: SymMat::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn sym(&self) -> &SymMat {
        &self.mat
    }

    pub fn inverse(&self) -> SymMat {
        self.mat.map_spectrum(|l| 1.0 / l)
    }

    /// Matrix logarithm through the spectral decomposition.
    pub fn log(&self) -> SymMat {
        self.mat.map_spectrum(math::ln)
    }

    /// Integer power.
    pub fn powi(&self, k: i32) -> SPDMatrix {
        SPDMatrix {
            mat: self.mat.map_spectrum(|l| math::powi(l, k)),
        }
    }
}

/// `e^{sH}` for symmetric `H`.
pub fn sym_exp(h: &SymMat, s: f64) -> SPDMatrix {
    SPDMatrix {
        mat: h.map_spectrum(|l| math::exp(s * l)),
    }
}

/// Squared line element `ds² = Tr(Q^{-1} dQ Q^{-1} dQ) / d`.
pub fn spd_line_element(q: &SPDMatrix, dq: &SymMat) -> Result<f64, BundleError> {
    if dq.dim() != q.dim() {
        return Err(BundleError::DimMismatch);
    }
    let qinv = q.inverse();
    let a = SymMat {
        dim: q.dim(),
        entries: qinv.matmul(dq),
    };
    // Tr((Q^{-1}dQ)²); the product of two copies of a (generally
    // non-symmetric) matrix still has a well-defined trace.
    let d = q.dim();
    let mut tr = 0.0;
    for i in 0..d {
        for k in 0..d {
            tr += a.entries[i * d + k] * a.entries[k * d + i];
        }
    }
    Ok(tr / d as f64)
}

/// Geodesic distance between the powers `Q^m` and `Q^n`:
/// `|m-n| sqrt(Tr((ln Q)²)/d)`.
pub fn spd_power_distance(q: &SPDMatrix, m: i64, n: i64) -> f64 {
    let lq = q.log();
    let d = q.dim();
    let mut tr = 0.0;
    for i in 0..d {
        for k in 0..d {
            tr += lq.at(i, k) * lq.at(k, i);
        }
    }
    (m - n).abs() as f64 * math::sqrt(tr / d as f64)
}

/// Residual of the geodesic ODE on the curve `Q(s) = e^{sH}`, with the
/// derivatives evaluated by central finite differences of step `h`. The
/// curve is an exact solution, so the residual is `O(h²)`.
pub fn geodesic_residual(hmat: &SymMat, s: f64, h: f64) -> Result<f64, BundleError> {
    let d = hmat.dim();
    let q = sym_exp(hmat, s);
    let qp = sym_exp(hmat, s + h);
    let qm = sym_exp(hmat, s - h);
    let dq = qp.sym().sub(qm.sym()).scale(1.0 / (2.0 * h));
    let d2q = qp
        .sym()
        .add(qm.sym())
        .sub(&q.sym().scale(2.0))
        .scale(1.0 / (h * h));
    let qinv = q.inverse();
    let v = SymMat {
        dim: d,
        entries: qinv.matmul(&dq),
    }; // Q^{-1} Q'
    let trace_of = |m: &[f64]| (0..d).map(|i| m[i * d + i]).sum::<f64>();
    let v2 = SymMat {
        dim: d,
        entries: v.matmul(&v),
    };
    let denom = trace_of(&v2.entries);
    if math::abs(denom) < 1e-14 {
        return Ok(0.0); // constant curve convention
    }
    let v3 = SymMat {
        dim: d,
        entries: v.matmul(&v2),
    };
    let w = SymMat {
        dim: d,
        entries: qinv.matmul(&d2q),
    }; // Q^{-1} Q''
    let vw = SymMat {
        dim: d,
        entries: v.matmul(&w),
    };
    let coef = (trace_of(&v3.entries) - trace_of(&vw.entries)) / denom;
    // residual = Q'' - Q' Q^{-1} Q' - coef · Q'
    let qpq = SymMat {
        dim: d,
        entries: dq.matmul(&SymMat {
            dim: d,
            entries: qinv.matmul(&dq),
        }),
    };
    let res = d2q.sub(&qpq).sub(&dq.scale(coef));
    Ok(res.frobenius())
}

/// Riemann-sum length of a discrete SPD curve with midpoint metric
/// evaluation; second-order accurate in the number of segments.
pub fn discrete_path_length(curve: &[SPDMatrix]) -> Result<f64, BundleError> {
    if curve.len() < 2 {
        return Err(BundleError::CurveTooShort);
    }
    let mut length = 0.0;
    for pair in curve.windows(2) {
        let dq = pair[1].sym().sub(pair[0].sym());
        let mid = SPDMatrix::new(pair[0].sym().add(pair[1].sym()).scale(0.5))?;
        length += math::sqrt(spd_line_element(&mid, &dq)?.max(0.0));
    }
    Ok(length)
}

/// Sampled exponential curve `s ∈ [0,1] ↦ e^{sH}` with `segments + 1`
/// points.
pub fn exponential_curve(hmat: &SymMat, segments: usize) -> Vec<SPDMatrix> {
    (0..=segments)
        .map(|k| sym_exp(hmat, k as f64 / segments as f64))
        .collect()
}

/// Configuration of the metric bundle over a base triple.
#[derive(Debug, Clone)]
pub struct BundleConfig {
    pub window: Window,
    pub rmax: usize,
    pub lambda: f64,
    /// Shift-invariant profile `d_0 = 0 < d_1 ≤ … ≤ d_rmax = 1`,
    /// subadditive over the hop range.
    pub profile: Vec<f64>,
}

impl BundleConfig {
    /// Default profile `d_j = tanh(j)/tanh(rmax)`: subadditive, with the
    /// sup over the window pinned to exactly 1 at `j = rmax`.
    pub fn with_tanh_profile(
        window: Window,
        rmax: usize,
        lambda: f64,
    ) -> Result<Self, BundleError> {
        let norm = math::tanh(rmax as f64);
        let profile = (0..=rmax).map(|j| math::tanh(j as f64) / norm).collect();
        let cfg = Self {
            window,
            rmax,
            lambda,
            profile,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), BundleError> {
        if self.lambda == 0.0 {
            return Err(BundleError::ZeroLambda);
        }
        if self.rmax == 0 || self.rmax as i64 > 2 * self.window.half() {
            return Err(BundleError::ConfigInvalid("rmax must be in 1..=2N"));
        }
        if self.profile.len() != self.rmax + 1 || self.profile[0] != 0.0 {
            return Err(BundleError::ConfigInvalid(
                "profile must run d_0 = 0 ..= d_rmax",
            ));
        }
        if self.profile[1..].iter().any(|&d| !(d > 0.0)) {
            return Err(BundleError::ConfigInvalid(
                "profile entries must be positive",
            ));
        }
        let sup = self.profile.iter().fold(0.0f64, |m, &d| m.max(d));
        if math::abs(sup - 1.0) > 1e-12 {
            return Err(BundleError::ConfigInvalid("profile must have sup 1"));
        }
        let l = self.profile.len();
        for j in 1..l {
            for jp in 1..l {
                for jpp in 1..l {
                    if j <= jp + jpp
                        && self.profile[j] > self.profile[jp] + self.profile[jpp] + 1e-12
                    {
                        return Err(BundleError::ConfigInvalid("profile violates subadditivity"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The assembled metric bundle: base triple, configuration, and the
/// bundle Dirac operator on `H ⊗ ℓ²(window × {1..rmax}) ⊗ C⁴`.
#[derive(Debug, Clone)]
pub struct BundleTriple {
    base: BaseTriple,
    cfg: BundleConfig,
    layout: Layout,
    dirac: CMatrix,
}

impl BundleTriple {
    pub fn assemble(base: BaseTriple, cfg: BundleConfig) -> Result<Self, BundleError> {
        cfg.validate()?;
        let layout = Layout {
            window: cfg.window,
            ranges: cfg.rmax,
            base_dim: base.dim(),
            spin_dim: 4,
        };
        let gammas = dirac_gammas();
        let (up, down) = gamma_ladders(&gammas);
        let g3 = gammas.gamma(3);
        let g4 = gammas.gamma(4);
        let g5 = gammas.gamma(5);
        let d = base.dim();
        let w = cfg.window;
        let mut m = CMatrix::zeros(layout.dim(), layout.dim());
        for r in 1..=cfg.rmax {
            let ri = r - 1;
            let dr = cfg.profile[r];
            for n in w.iter() {
                // Ladder difference quotients (identity on H).
                if w.contains(n - r as i64) {
                    let wgt = C64::new(1.0 / dr, 0.0);
                    for h in 0..d {
                        for s1 in 0..4 {
                            for s2 in 0..4 {
                                let u = up[(s1, s2)];
                                if u != ZERO {
                                    m[(layout.index(n, ri, h, s1), layout.index(n, ri, h, s2))] +=
                                        u * wgt;
                                    m[(
                                        layout.index(n, ri, h, s1),
                                        layout.index(n - r as i64, ri, h, s2),
                                    )] -= u * wgt;
                                }
                                let dn = down[(s1, s2)];
                                if dn != ZERO {
                                    m[(layout.index(n, ri, h, s1), layout.index(n, ri, h, s2))] +=
                                        dn * wgt;
                                    m[(
                                        layout.index(n - r as i64, ri, h, s1),
                                        layout.index(n, ri, h, s2),
                                    )] -= dn * wgt;
                                }
                            }
                        }
                    }
                }
                // Diagonal λ(γ3 n + γ4 / d_r²) and the base term γ5 ⊗ D.
                for h1 in 0..d {
                    for s1 in 0..4 {
                        for s2 in 0..4 {
                            let diag = g3[(s1, s2)] * C64::new(cfg.lambda * n as f64, 0.0)
                                + g4[(s1, s2)] * C64::new(cfg.lambda / (dr * dr), 0.0);
                            if diag != ZERO {
                                m[(layout.index(n, ri, h1, s1), layout.index(n, ri, h1, s2))] +=
                                    diag;
                            }
                            let g5v = g5[(s1, s2)];
                            if g5v != ZERO {
                                for h2 in 0..d {
                                    let dv = base.dirac()[(h1, h2)];
                                    if dv != ZERO {
                                        m[(
                                            layout.index(n, ri, h1, s1),
                                            layout.index(n, ri, h2, s2),
                                        )] += g5v * dv;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(Self {
            base,
            cfg,
            layout,
            dirac: m,
        })
    }

    pub fn base(&self) -> &BaseTriple {
        &self.base
    }

    pub fn config(&self) -> &BundleConfig {
        &self.cfg
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn dirac(&self) -> TruncatedOperator {
        TruncatedOperator {
            matrix: self.dirac.clone(),
            layout: self.layout,
        }
    }

    /// Represent a window sequence `b = (b_n)` of base elements:
    /// block `(n, r)` carries `α^{-n}(b_n) ⊗ 1₄`.
    pub fn represent(&self, b: &[CMatrix]) -> Result<CMatrix, BundleError> {
        if b.len() != self.cfg.window.len() {
            return Err(BundleError::DimMismatch);
        }
        let d = self.base.dim();
        let mut m = CMatrix::zeros(self.layout.dim(), self.layout.dim());
        for n in self.cfg.window.iter() {
            let block = self.base.alpha(&b[(n - self.cfg.window.lo()) as usize], -n);
            for r in 0..self.cfg.rmax {
                for h1 in 0..d {
                    for h2 in 0..d {
                        let z = block[(h1, h2)];
                        if z == ZERO {
                            continue;
                        }
                        for s in 0..4 {
                            m[(
                                self.layout.index(n, r, h1, s),
                                self.layout.index(n, r, h2, s),
                            )] = z;
                        }
                    }
                }
            }
        }
        Ok(m)
    }

    /// The pushed-forward sequence `(α_*(b))_n = α(b_{n-1})`, window
    /// truncated at the lower edge.
    pub fn alpha_star(&self, b: &[CMatrix]) -> Vec<CMatrix> {
        let d = self.base.dim();
        let w = self.cfg.window;
        let mut out = Vec::with_capacity(w.len());
        for n in w.iter() {
            if n == w.lo() {
                out.push(CMatrix::zeros(d, d));
            } else {
                out.push(self.base.alpha(&b[(n - 1 - w.lo()) as usize], 1));
            }
        }
        out
    }

    /// `M · u` for the truncated shift `(uf)_{n,r} = f_{n-1,r}` (column
    /// remap; the lowest block column disappears).
    pub fn mul_u_right(&self, m: &CMatrix) -> CMatrix {
        let w = self.cfg.window;
        let per = self.cfg.rmax * self.base.dim() * 4;
        CMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            let nj = j / per;
            let rest = j % per;
            let n = w.lo() + nj as i64;
            if n + 1 > w.hi() {
                ZERO
            } else {
                m[(i, (nj + 1) * per + rest)]
            }
        })
    }

    /// `u · M` (row remap).
    pub fn mul_u_left(&self, m: &CMatrix) -> CMatrix {
        let w = self.cfg.window;
        let per = self.cfg.rmax * self.base.dim() * 4;
        CMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            let ni = i / per;
            let n = w.lo() + ni as i64;
            if n - 1 < w.lo() {
                ZERO
            } else {
                m[((ni - 1) * per + (i % per), j)]
            }
        })
    }

    /// `u* · M` (row remap the other way).
    pub fn mul_u_star_left(&self, m: &CMatrix) -> CMatrix {
        let w = self.cfg.window;
        let per = self.cfg.rmax * self.base.dim() * 4;
        CMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            let ni = i / per;
            let n = w.lo() + ni as i64;
            if n + 1 > w.hi() {
                ZERO
            } else {
                m[((ni + 1) * per + (i % per), j)]
            }
        })
    }
}

/// Report of the exact orbit-shift identity `u^{-1}[D_B, u] = λ γ3`.
#[derive(Debug, Clone)]
pub struct BundleUIdentity {
    /// Max-abs defect of `u*[D_B,u] - λγ3 ⊗ 1` over interior blocks
    /// (margin `rmax + 2` from both window edges). Exactly 0.
    pub identity_defect: f64,
    /// Max-abs of `[λγ3 ⊗ 1, π(b)]` over the sampled represented
    /// elements; exactly 0 since γ3 and the algebra act on different
    /// tensor factors.
    pub commutation_defect: f64,
}

pub fn bundle_u_identity(
    bt: &BundleTriple,
    sample: &[Vec<CMatrix>],
) -> Result<BundleUIdentity, BundleError> {
    let dbu = bt.mul_u_right(&bt.dirac);
    let udb = bt.mul_u_left(&bt.dirac);
    let comm = dbu.sub(&udb).expect("shape");
    let lhs = bt.mul_u_star_left(&comm);
    // λ γ3 ⊗ 1 on the same layout.
    let gammas = dirac_gammas();
    let g3 = gammas.gamma(3);
    let layout = bt.layout();
    let mut expect = CMatrix::zeros(layout.dim(), layout.dim());
    for n in bt.cfg.window.iter() {
        for r in 0..bt.cfg.rmax {
            for h in 0..bt.base.dim() {
                for s1 in 0..4 {
                    for s2 in 0..4 {
                        let v = g3[(s1, s2)] * C64::new(bt.cfg.lambda, 0.0);
                        if v != ZERO {
                            expect[(layout.index(n, r, h, s1), layout.index(n, r, h, s2))] = v;
                        }
                    }
                }
            }
        }
    }
    let diff = lhs.sub(&expect).expect("shape");
    let margin = bt.cfg.rmax as i64 + 2;
    let keep_lo = bt.cfg.window.lo() + margin;
    let keep_hi = bt.cfg.window.hi() - margin;
    let mut identity_defect = 0.0f64;
    let per = bt.cfg.rmax * bt.base.dim() * 4;
    for i in 0..diff.rows() {
        let ni = bt.cfg.window.lo() + (i / per) as i64;
        if ni < keep_lo || ni > keep_hi {
            continue;
        }
        for j in 0..diff.cols() {
            let nj = bt.cfg.window.lo() + (j / per) as i64;
            if nj < keep_lo || nj > keep_hi {
                continue;
            }
            identity_defect = identity_defect.max(diff[(i, j)].norm());
        }
    }
    // [λγ3 ⊗ 1, π(b)] vanishes identically.
    let mut commutation_defect = 0.0f64;
    for b in sample {
        let rep = bt.represent(b)?;
        let c = crate::matrix::commutator(&expect, &rep).expect("shape");
        commutation_defect = commutation_defect.max(c.max_abs());
    }
    Ok(BundleUIdentity {
        identity_defect,
        commutation_defect,
    })
}

/// A crossed element over the bundle algebra `B = A ⊗ c0(Z)`: finitely
/// many coefficients `c_{n, l} ∈ A` indexed by window site and mode.
#[derive(Debug, Clone)]
pub struct BundleCrossedElement {
    pub dim: usize,
    /// `(n, l) ↦ c_{n,l}`, sorted.
    pub coeffs: alloc::collections::BTreeMap<(i64, i64), CMatrix>,
}

impl BundleCrossedElement {
    pub fn from_terms(dim: usize, terms: Vec<((i64, i64), CMatrix)>) -> Self {
        let mut coeffs = alloc::collections::BTreeMap::new();
        for (key, a) in terms {
            if a.max_abs() > 0.0 {
                coeffs.insert(key, a);
            }
        }
        Self { dim, coeffs }
    }

    pub fn coefficient(&self, n: i64, l: i64) -> CMatrix {
        self.coeffs
            .get(&(n, l))
            .cloned()
            .unwrap_or_else(|| CMatrix::zeros(self.dim, self.dim))
    }

    pub fn modes(&self) -> Vec<i64> {
        let mut ls: Vec<i64> = self.coeffs.keys().map(|&(_, l)| l).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }
}

/// One violated-condition witness from [`lipschitz_extract`].
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzWitness {
    pub condition: u8,
    pub site: i64,
    pub mode: i64,
    pub hop: usize,
    pub excess: f64,
}

/// Outcome of the partial-trace Lipschitz-condition extraction.
#[derive(Debug, Clone)]
pub struct LipschitzReport {
    /// Worst excess of `‖α^{-n}(c_{n,l}) - α^{-n+r}(c_{n-r,l})‖ - d_r`.
    pub condition1_excess: f64,
    /// Worst excess of `‖[D, α^{-n}(c_{n,l})]‖ - 1`.
    pub condition2_excess: f64,
    /// Assembled `‖∂c‖` lower bound (γ3-component norm).
    pub derivation_norm_lower: f64,
    /// Coefficient upper bound `Σ_l |l| sup_n ‖c_{n,l}‖ ≥ ‖∂c‖`.
    pub derivation_norm_upper: f64,
    /// First witness of a violated condition, if any.
    pub witness: Option<LipschitzWitness>,
    /// Reconstruction defect of the γ-component extraction against the
    /// direct blockwise formulas (interior blocks).
    pub extraction_defect: f64,
}

impl LipschitzReport {
    /// All three necessary conditions certified (within `tol`).
    pub fn passes(&self, tol: f64) -> bool {
        self.condition1_excess <= tol
            && self.condition2_excess <= tol
            && self.derivation_norm_upper <= 1.0 + tol
    }

    /// Some condition certainly fails (beyond `tol`).
    pub fn rejected(&self, tol: f64) -> bool {
        self.condition1_excess > tol
            || self.condition2_excess > tol
            || self.derivation_norm_lower > 1.0 + tol
    }
}

/// Check the three necessary Lipschitz-ball conditions for a crossed
/// element of the bundle algebra, and cross-validate the γ-components
/// of `[D_B, π(c)]` extracted by partial trace against the blockwise
/// formulas.
pub fn lipschitz_extract(
    c: &BundleCrossedElement,
    bt: &BundleTriple,
) -> Result<LipschitzReport, BundleError> {
    if c.dim != bt.base().dim() {
        return Err(BundleError::DimMismatch);
    }
    let w = bt.config().window;
    let base = bt.base();
    let mut condition1_excess = f64::NEG_INFINITY;
    let mut condition2_excess = f64::NEG_INFINITY;
    let mut witness: Option<LipschitzWitness> = None;

    // Condition 1: window differences against the profile.
    for l in c.modes() {
        for r in 1..=bt.config().rmax {
            let dr = bt.config().profile[r];
            for n in w.iter() {
                let m = n - r as i64;
                if !w.contains(m) {
                    continue;
                }
                let cn = c.coefficient(n, l);
                let cm = c.coefficient(m, l);
                if cn.max_abs() == 0.0 && cm.max_abs() == 0.0 {
                    continue;
                }
                let diff = base
                    .alpha(&cn, -n)
                    .sub(&base.alpha(&cm, -m))
                    .expect("shape");
                let excess = operator_norm(&diff) - dr;
                if excess > condition1_excess {
                    condition1_excess = excess;
                    if excess > 0.0 && witness.is_none() {
                        witness = Some(LipschitzWitness {
                            condition: 1,
                            site: n,
                            mode: l,
                            hop: r,
                            excess,
                        });
                    }
                }
            }
        }
    }
    // Condition 2: base commutator norms sitewise.
    for (&(n, l), cnl) in &c.coeffs {
        let rotated = base.alpha(cnl, -n);
        let excess =
            operator_norm(&crate::matrix::commutator(base.dirac(), &rotated).expect("shape")) - 1.0;
        if excess > condition2_excess {
            condition2_excess = excess;
            if excess > 0.0 && witness.is_none() {
                witness = Some(LipschitzWitness {
                    condition: 2,
                    site: n,
                    mode: l,
                    hop: 0,
                    excess,
                });
            }
        }
    }
    if condition1_excess == f64::NEG_INFINITY {
        condition1_excess = -1.0;
    }
    if condition2_excess == f64::NEG_INFINITY {
        condition2_excess = -1.0;
    }

    // Condition 3 and the extraction cross-check. Assemble [D_B, π(c_l)u^l]
    // mode by mode and take partial traces over the gamma basis.
    let gammas = dirac_gammas();
    let basis = gammas.product_basis();
    let layout = bt.layout();
    let d = base.dim();
    let mut derivation_norm_lower = 0.0f64;
    let mut extraction_defect = 0.0f64;
    let margin = bt.config().rmax as i64 + 1;
    // γ3 component accumulates Σ_l l · rep(c_l) u^l; we assemble it mode
    // by mode and take the overall operator norm at the end.
    let mut gamma3_total = CMatrix::zeros(layout.dim() / 4, layout.dim() / 4);
    for l in c.modes() {
        // π(c_l) u^l : blocks (n, r) ← (n - l, r) with α^{-n}(c_{n,l}).
        let mut rep = CMatrix::zeros(layout.dim(), layout.dim());
        for n in w.iter() {
            let m = n - l;
            if !w.contains(m) {
                continue;
            }
            let block = base.alpha(&c.coefficient(n, l), -n);
            for r in 0..bt.config().rmax {
                for h1 in 0..d {
                    for h2 in 0..d {
                        let z = block[(h1, h2)];
                        if z == ZERO {
                            continue;
                        }
                        for s in 0..4 {
                            rep[(layout.index(n, r, h1, s), layout.index(m, r, h2, s))] = z;
                        }
                    }
                }
            }
        }
        let comm = crate::matrix::commutator(&bt.dirac, &rep).expect("shape");
        // The layout stores spin innermost, which is exactly the
        // `H ⊗ C^4` ordering the partial trace expects.
        let comps = crate::matrix::partial_trace_spin(&comm, &basis)
            .map_err(|_| BundleError::ConfigInvalid("partial trace failed"))?;
        // components: [identity, γ1..γ5, pair products]; γ3 is index 3,
        // γ5 index 5.
        let g3_comp = &comps[3];
        let g5_comp = &comps[5];
        // γ3 component should be λ-free: l · rep(c_l)u^l on the spinless
        // space; compare on interior blocks.
        let spinless = spinless_rep(bt, c, l);
        let expect3 = spinless.scale(C64::new(bt.config().lambda * l as f64, 0.0));
        extraction_defect = extraction_defect.max(interior_block_defect(
            &g3_comp.sub(&expect3).expect("shape"),
            bt,
            margin,
        ));
        // γ5 component carries [D, α^{-n}(c_{n,l})] blockwise.
        let expect5 = spinless_commutator_rep(bt, c, l);
        extraction_defect = extraction_defect.max(interior_block_defect(
            &g5_comp.sub(&expect5).expect("shape"),
            bt,
            margin,
        ));
        gamma3_total = gamma3_total
            .add(&spinless.scale(C64::new(l as f64, 0.0)))
            .expect("shape");
    }
    derivation_norm_lower = derivation_norm_lower.max(operator_norm(&gamma3_total));

    let mut derivation_norm_upper = 0.0;
    for l in c.modes() {
        if l == 0 {
            continue;
        }
        let sup = w
            .iter()
            .map(|n| operator_norm(&c.coefficient(n, l)))
            .fold(0.0f64, f64::max);
        derivation_norm_upper += l.abs() as f64 * sup;
    }

    // Condition-3 witness if certainly violated.
    if derivation_norm_lower > 1.0 && witness.is_none() {
        witness = Some(LipschitzWitness {
            condition: 3,
            site: 0,
            mode: 0,
            hop: 0,
            excess: derivation_norm_lower - 1.0,
        });
    }

    Ok(LipschitzReport {
        condition1_excess,
        condition2_excess,
        derivation_norm_lower,
        derivation_norm_upper,
        witness,
        extraction_defect,
    })
}

/// Spinless representation of `π(c_l) u^l` on `H ⊗ ℓ²(window × ranges)`.
fn spinless_rep(bt: &BundleTriple, c: &BundleCrossedElement, l: i64) -> CMatrix {
    let w = bt.config().window;
    let d = bt.base().dim();
    let per = bt.config().rmax * d;
    let dim = w.len() * per;
    let mut m = CMatrix::zeros(dim, dim);
    for n in w.iter() {
        let mcol = n - l;
        if !w.contains(mcol) {
            continue;
        }
        let block = bt.base().alpha(&c.coefficient(n, l), -n);
        for r in 0..bt.config().rmax {
            for h1 in 0..d {
                for h2 in 0..d {
                    let z = block[(h1, h2)];
                    if z == ZERO {
                        continue;
                    }
                    let row = ((n - w.lo()) as usize * bt.config().rmax + r) * d + h1;
                    let col = ((mcol - w.lo()) as usize * bt.config().rmax + r) * d + h2;
                    m[(row, col)] = z;
                }
            }
        }
    }
    m
}

/// Spinless blockwise `[D, α^{-n}(c_{n,l})]` at the same layout.
fn spinless_commutator_rep(bt: &BundleTriple, c: &BundleCrossedElement, l: i64) -> CMatrix {
    let w = bt.config().window;
    let d = bt.base().dim();
    let per = bt.config().rmax * d;
    let dim = w.len() * per;
    let mut m = CMatrix::zeros(dim, dim);
    for n in w.iter() {
        let mcol = n - l;
        if !w.contains(mcol) {
            continue;
        }
        let block = crate::matrix::commutator(
            bt.base().dirac(),
            &bt.base().alpha(&c.coefficient(n, l), -n),
        )
        .expect("shape");
        for r in 0..bt.config().rmax {
            for h1 in 0..d {
                for h2 in 0..d {
                    let z = block[(h1, h2)];
                    if z == ZERO {
                        continue;
                    }
                    let row = ((n - w.lo()) as usize * bt.config().rmax + r) * d + h1;
                    let col = ((mcol - w.lo()) as usize * bt.config().rmax + r) * d + h2;
                    m[(row, col)] = z;
                }
            }
        }
    }
    m
}

/// Max-abs over blocks at least `margin` away from both window edges.
fn interior_block_defect(m: &CMatrix, bt: &BundleTriple, margin: i64) -> f64 {
    let w = bt.config().window;
    let per = m.rows() / w.len();
    let keep_lo = w.lo() + margin;
    let keep_hi = w.hi() - margin;
    let mut worst = 0.0f64;
    for i in 0..m.rows() {
        let ni = w.lo() + (i / per) as i64;
        if ni < keep_lo || ni > keep_hi {
            continue;
        }
        for j in 0..m.cols() {
            let nj = w.lo() + (j / per) as i64;
            if nj < keep_lo || nj > keep_hi {
                continue;
            }
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

/// Norm contrast of the dual action on the bundle: uncompressed and
/// `h`-compressed norms of `[∇_k - ∇_{k'}, π(b)]` with
/// `h_n = 1/(1+|n|)`. The compressed norm is small uniformly in `rmax`
/// whenever `|k - k'|` is small; the uncompressed one is not.
pub fn dual_action_continuity_contrast(
    bt: &BundleTriple,
    b: &[CMatrix],
    k: f64,
    kp: f64,
) -> Result<(f64, f64), BundleError> {
    if b.len() != bt.config().window.len() {
        return Err(BundleError::DimMismatch);
    }
    let w = bt.config().window;
    let d = bt.base().dim();
    let rmax = bt.config().rmax;
    let per = rmax * d;
    let dim = w.len() * per;
    let mut m = CMatrix::zeros(dim, dim);
    for r in 1..=rmax {
        let dr = bt.config().profile[r];
        let phase_k = C64::new(math::cos(k * r as f64), math::sin(k * r as f64));
        let phase_kp = C64::new(math::cos(kp * r as f64), math::sin(kp * r as f64));
        let factor = (phase_k - phase_kp) / C64::new(dr, 0.0);
        if factor == ZERO {
            continue;
        }
        for n in w.iter() {
            let nm = n - r as i64;
            if !w.contains(nm) {
                continue;
            }
            let block = bt
                .base()
                .alpha(&b[(n - w.lo()) as usize], -n)
                .sub(&bt.base().alpha(&b[(nm - w.lo()) as usize], -nm))
                .expect("shape");
            for h1 in 0..d {
                for h2 in 0..d {
                    let z = block[(h1, h2)];
                    if z == ZERO {
                        continue;
                    }
                    let row = ((n - w.lo()) as usize * rmax + (r - 1)) * d + h1;
                    let col = ((nm - w.lo()) as usize * rmax + (r - 1)) * d + h2;
                    m[(row, col)] = factor * z;
                }
            }
        }
    }
    let uncompressed = operator_norm(&m);
    // Compress with h_n = 1/(1+|n|) on both sides.
    let mut hm = m.clone();
    for i in 0..dim {
        let ni = w.lo() + (i / per) as i64;
        let hi = 1.0 / (1.0 + ni.abs() as f64);
        for j in 0..dim {
            let nj = w.lo() + (j / per) as i64;
            let hj = 1.0 / (1.0 + nj.abs() as f64);
            hm[(i, j)] = hm[(i, j)] * C64::new(hi * hj, 0.0);
        }
    }
    let compressed = operator_norm(&hm);
    Ok((uncompressed, compressed))
}

/// Compactness profile of a family of bundle-algebra elements: sup norm,
/// greedy ε-net sizes at each site, and the tail sup over `|n| > N/2`.
#[derive(Debug, Clone)]
pub struct CompactnessProfile {
    pub sup_norm: f64,
    /// Per ε in the input order: the largest ε-net size over sites.
    pub max_net_sizes: Vec<usize>,
    pub tail_sup: f64,
}

pub fn compactness_profile(
    family: &[Vec<CMatrix>],
    bt: &BundleTriple,
    epsilons: &[f64],
) -> Result<CompactnessProfile, BundleError> {
    let w = bt.config().window;
    let mut sup_norm = 0.0f64;
    let mut tail_sup = 0.0f64;
    for b in family {
        if b.len() != w.len() {
            return Err(BundleError::DimMismatch);
        }
        for n in w.iter() {
            let norm = operator_norm(&b[(n - w.lo()) as usize]);
            sup_norm = sup_norm.max(norm);
            if 2 * n.abs() > w.half() {
                tail_sup = tail_sup.max(norm);
            }
        }
    }
    let mut max_net_sizes = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let mut worst = 0usize;
        for n in w.iter() {
            // Greedy farthest-point net on the site fibre.
            let points: Vec<&CMatrix> = family.iter().map(|b| &b[(n - w.lo()) as usize]).collect();
            let mut centers: Vec<usize> = Vec::new();
            for (i, p) in points.iter().enumerate() {
                let covered = centers
                    .iter()
                    .any(|&c| operator_norm(&points[c].sub(p).expect("shape")) <= eps);
                if !covered {
                    centers.push(i);
                }
            }
            worst = worst.max(centers.len());
        }
        max_net_sizes.push(worst);
    }
    Ok(CompactnessProfile {
        sup_norm,
        max_net_sizes,
        tail_sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn win(n: i64) -> Window {
        Window::new(n).unwrap()
    }

    fn random_sym(dim: usize, rng: &mut SplitMix64) -> SymMat {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = rng.next_symmetric();
                entries[i * dim + j] = v;
                entries[j * dim + i] = v;
            }
        }
        SymMat::new(dim, entries).unwrap()
    }

    fn random_hermitian(n: usize, rng: &mut SplitMix64) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(rng.next_symmetric(), 0.0);
            for j in (i + 1)..n {
                let z = C64::new(rng.next_symmetric(), rng.next_symmetric());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn cycle_base(dim: usize, rng: &mut SplitMix64) -> BaseTriple {
        let perm: Vec<usize> = (0..dim).map(|i| (i + 1) % dim).collect();
        BaseTriple::diagonal_permutation(&perm, random_hermitian(dim, rng)).unwrap()
    }

    #[test]
    fn line_element_examples() {
        // Q = I, dQ = I in d = 2: Tr(I)/2 = 1.
        let q = SPDMatrix::identity(2);
        let dq = SymMat::identity(2);
        assert!((spd_line_element(&q, &dq).unwrap() - 1.0).abs() < 1e-14);
        // Q = diag(4,1), dQ = diag(4,0): Tr(diag(1,0)²)/2 = 1/2.
        let q = SPDMatrix::new(SymMat::diag(&[4.0, 1.0])).unwrap();
        let dq = SymMat::diag(&[4.0, 0.0]);
        assert!((spd_line_element(&q, &dq).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn line_element_congruence_invariance() {
        let mut rng = SplitMix64::new(41);
        for _ in 0..10 {
            let h = random_sym(2, &mut rng);
            let q = sym_exp(&h, 1.0);
            let dq = random_sym(2, &mut rng);
            let base = spd_line_element(&q, &dq).unwrap();
            // congruence by a random invertible G
            let g: Vec<f64> = (0..4).map(|_| rng.next_symmetric() + 0.1).collect();
            let gmat = |i: usize, j: usize| g[i * 2 + j];
            let congr = |m: &SymMat| {
                let mut out = vec![0.0; 4];
                for i in 0..2 {
                    for j in i..2 {
                        let mut acc = 0.0;
                        for a in 0..2 {
                            for b in 0..2 {
                                acc += gmat(i, a) * m.at(a, b) * gmat(j, b);
                            }
                        }
                        out[i * 2 + j] = acc;
                        out[j * 2 + i] = acc;
                    }
                }
                SymMat::new(2, out).unwrap()
            };
            let q2 = match SPDMatrix::new(congr(q.sym())) {
                Ok(v) => v,
                Err(_) => continue, // G too close to singular
            };
            let dq2 = congr(&dq);
            let moved = spd_line_element(&q2, &dq2).unwrap();
            assert!(
                (base - moved).abs() < 1e-9 * base.abs().max(1.0),
                "{base} vs {moved}"
            );
        }
    }

    #[test]
    fn power_distance_examples() {
        let q = SPDMatrix::identity(3);
        assert_eq!(spd_power_distance(&q, -2, 5), 0.0);
        // Q = diag(e², e^{-2}), d = 2: H = diag(2, -2), Tr H²/2 = 4.
        let q = SPDMatrix::new(SymMat::diag(&[math::exp(2.0), math::exp(-2.0)])).unwrap();
        assert!((spd_power_distance(&q, 0, 1) - 2.0).abs() < 1e-12);
        // translation invariance along the power orbit
        let mut rng = SplitMix64::new(17);
        let h = random_sym(2, &mut rng);
        let q = sym_exp(&h, 0.7);
        for (m, n) in [(0i64, 3i64), (-2, 1), (5, 8)] {
            let a = spd_power_distance(&q, m, n);
            let b = spd_power_distance(&q, 0, n - m);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cat_map_per_step_distance() {
        // Q = M² for the cat matrix M = [[2,1],[1,1]]: per-step distance
        // 2 ln((3+√5)/2).
        let m = SymMat::new(2, vec![2.0, 1.0, 1.0, 1.0]).unwrap();
        let m2 = SymMat {
            dim: 2,
            entries: m.matmul(&m),
        };
        let q = SPDMatrix::new(m2).unwrap();
        let expect = 2.0 * math::ln((3.0 + math::sqrt(5.0)) / 2.0);
        assert!((spd_power_distance(&q, 0, 1) - expect).abs() < 1e-9);
    }

    #[test]
    fn geodesic_residual_second_order() {
        let h = SymMat::diag(&[1.0, -1.0]);
        let r = geodesic_residual(&h, 0.3, 1e-3).unwrap();
        assert!(r <= 1e-5, "residual {r}");
        // quarter-ratio test across halvings
        let r1 = geodesic_residual(&h, 0.3, 1e-2).unwrap();
        let r2 = geodesic_residual(&h, 0.3, 5e-3).unwrap();
        let r3 = geodesic_residual(&h, 0.3, 2.5e-3).unwrap();
        for ratio in [r2 / r1, r3 / r2] {
            assert!((0.15..=0.35).contains(&ratio), "ratio {ratio}");
        }
        // H = 0 convention
        assert_eq!(
            geodesic_residual(&SymMat::zeros(2), 0.2, 1e-3).unwrap(),
            0.0
        );
    }

    #[test]
    fn path_length_converges_to_closed_form() {
        // H = diag(1, -1): closed-form length sqrt(Tr H²/2) = 1.
        let h = SymMat::diag(&[1.0, -1.0]);
        let curve = exponential_curve(&h, 200);
        let len = discrete_path_length(&curve).unwrap();
        assert!((len - 1.0).abs() < 1e-4, "{len}");
        // constant curve
        let q = SPDMatrix::identity(2);
        assert_eq!(discrete_path_length(&[q.clone(), q]).unwrap(), 0.0);
    }

    #[test]
    fn perturbed_paths_are_never_shorter() {
        let mut rng = SplitMix64::new(23);
        let h = SymMat::diag(&[1.0, -1.0]);
        let segments = 60;
        let geodesic = exponential_curve(&h, segments);
        let geo_len = discrete_path_length(&geodesic).unwrap();
        let endpoint_dist = spd_power_distance(&sym_exp(&h, 1.0), 0, 1);
        for _ in 0..20 {
            let noise = random_sym(2, &mut rng);
            let curve: Vec<SPDMatrix> = (0..=segments)
                .map(|k| {
                    let s = k as f64 / segments as f64;
                    let bump = math::sin(math::PI * s) * 0.15;
                    let mut hs = h.scale(s);
                    hs = hs.add(&noise.scale(bump));
                    sym_exp(&hs, 1.0)
                })
                .collect();
            let len = discrete_path_length(&curve).unwrap();
            // discrete perturbed paths cannot undercut the geodesic distance
            assert!(len >= endpoint_dist - 1e-6, "{len} < {endpoint_dist}");
            assert!(len >= geo_len - 1e-3);
        }
    }

    #[test]
    fn bundle_dirac_is_hermitian_and_u_identity_exact() {
        let mut rng = SplitMix64::new(71);
        let base = cycle_base(2, &mut rng);
        let cfg = BundleConfig::with_tanh_profile(win(8), 3, 1.0).unwrap();
        let bt = BundleTriple::assemble(base.clone(), cfg).unwrap();
        assert_eq!(bt.dirac().hermiticity_defect(), 0.0);
        let sample: Vec<Vec<CMatrix>> = (0..5)
            .map(|_| {
                (0..bt.config().window.len())
                    .map(|_| {
                        let mut m = CMatrix::zeros(2, 2);
                        for i in 0..2 {
                            m[(i, i)] = C64::new(rng.next_symmetric(), 0.0);
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        let report = bundle_u_identity(&bt, &sample).unwrap();
        assert_eq!(report.identity_defect, 0.0);
        assert_eq!(report.commutation_defect, 0.0);

        // Both diagonal spin terms γ3 n and γ4/d_r² commute with every
        // represented element, exactly.
        let gammas = dirac_gammas();
        let layout = bt.layout();
        for (g, weight) in [(gammas.gamma(3), 0usize), (gammas.gamma(4), 1usize)] {
            let mut diag = CMatrix::zeros(layout.dim(), layout.dim());
            for n in bt.config().window.iter() {
                for r in 0..bt.config().rmax {
                    let scale = if weight == 0 {
                        n as f64
                    } else {
                        1.0 / (bt.config().profile[r + 1] * bt.config().profile[r + 1])
                    };
                    for h in 0..2 {
                        for s1 in 0..4 {
                            for s2 in 0..4 {
                                let v = g[(s1, s2)] * C64::new(scale, 0.0);
                                if v != crate::matrix::ZERO {
                                    diag[(layout.index(n, r, h, s1), layout.index(n, r, h, s2))] =
                                        v;
                                }
                            }
                        }
                    }
                }
            }
            let rep = bt.represent(&sample[0]).unwrap();
            let c = crate::matrix::commutator(&diag, &rep).unwrap();
            assert_eq!(c.max_abs(), 0.0);
        }
    }

    #[test]
    fn represent_covariance_under_shift() {
        // u · π(b) · u* = π(α_*(b)) on interior blocks, exactly.
        let mut rng = SplitMix64::new(5);
        let base = cycle_base(2, &mut rng);
        let cfg = BundleConfig::with_tanh_profile(win(6), 2, 1.0).unwrap();
        let bt = BundleTriple::assemble(base.clone(), cfg).unwrap();
        let b: Vec<CMatrix> = (0..bt.config().window.len())
            .map(|_| {
                let mut m = CMatrix::zeros(2, 2);
                for i in 0..2 {
                    m[(i, i)] = C64::new(rng.next_symmetric(), 0.0);
                }
                m
            })
            .collect();
        let rep = bt.represent(&b).unwrap();
        let pushed = bt.represent(&bt.alpha_star(&b)).unwrap();
        // (u π(b) u*)[(n,·),(n',·)] = π(b)[(n-1,·),(n'-1,·)]: compare the
        // shifted entries against π(α_*(b)) away from the lower edge.
        let per = bt.config().rmax * 2 * 4;
        let w = bt.config().window;
        let mut worst = 0.0f64;
        for i in 0..rep.rows() {
            let ni = w.lo() + (i / per) as i64;
            if ni <= w.lo() {
                continue;
            }
            for j in 0..rep.cols() {
                let nj = w.lo() + (j / per) as i64;
                if nj <= w.lo() {
                    continue;
                }
                let shifted = rep[(i - per, j - per)];
                let expect = pushed[(i, j)];
                worst = worst.max((shifted - expect).norm());
            }
        }
        assert_eq!(worst, 0.0);
    }

    #[test]
    fn lipschitz_extract_accepts_covariant_lipschitz_element() {
        let mut rng = SplitMix64::new(2025);
        let base = cycle_base(2, &mut rng);
        let cfg = BundleConfig::with_tanh_profile(win(6), 2, 1.0).unwrap();
        let bt = BundleTriple::assemble(base.clone(), cfg).unwrap();
        // c_n = α^n(a) with ‖[D, a]‖ ≤ 1: α^{-n}(c_n) = a is constant.
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = C64::new(0.3, 0.0);
        a[(1, 1)] = C64::new(-0.2, 0.0);
        let norm = operator_norm(&crate::matrix::commutator(base.dirac(), &a).unwrap());
        let a = a.scale(C64::new(0.9 / norm.max(1e-9), 0.0));
        let terms: Vec<((i64, i64), CMatrix)> = bt
            .config()
            .window
            .iter()
            .map(|n| ((n, 0i64), base.alpha(&a, n)))
            .collect();
        let c = BundleCrossedElement::from_terms(2, terms);
        let report = lipschitz_extract(&c, &bt).unwrap();
        assert!(report.passes(1e-9), "{report:?}");
        assert!(report.extraction_defect < 1e-10);
        assert!(report.witness.is_none());
    }

    #[test]
    fn lipschitz_extract_rejects_oversized_site() {
        let mut rng = SplitMix64::new(2026);
        let base = cycle_base(2, &mut rng);
        let cfg = BundleConfig::with_tanh_profile(win(6), 2, 1.0).unwrap();
        let bt = BundleTriple::assemble(base.clone(), cfg).unwrap();
        // ‖c_{0,0}‖ = 2 > sup_r d_r = 1 forces condition 1 to fail.
        let big = CMatrix::identity(2).scale(C64::new(2.0, 0.0));
        let c = BundleCrossedElement::from_terms(2, vec![((0, 0), big)]);
        let report = lipschitz_extract(&c, &bt).unwrap();
        assert!(report.rejected(1e-9));
        let w = report.witness.expect("witness");
        assert_eq!(w.condition, 1);
        assert_eq!(w.mode, 0);
    }

    #[test]
    fn continuity_contrast_behaviour() {
        let mut rng = SplitMix64::new(909);
        let base = cycle_base(2, &mut rng);
        // b supported near the origin, fixed across rmax.
        let make_b = |bt: &BundleTriple| -> Vec<CMatrix> {
            bt.config()
                .window
                .iter()
                .map(|n| {
                    if n.abs() <= 1 {
                        CMatrix::identity(2).scale(C64::new(1.0 / (1 + n.abs()) as f64, 0.0))
                    } else {
                        CMatrix::zeros(2, 2)
                    }
                })
                .collect()
        };
        // k = k' gives zero.
        let cfg = BundleConfig::with_tanh_profile(win(8), 4, 1.0).unwrap();
        let bt = BundleTriple::assemble(base.clone(), cfg).unwrap();
        let b = make_b(&bt);
        let (unc, comp) = dual_action_continuity_contrast(&bt, &b, 0.7, 0.7).unwrap();
        assert_eq!((unc, comp), (0.0, 0.0));
        // h ≡ 1 recovery is implicit: compressed ≤ uncompressed.
        let mut uncs = Vec::new();
        let mut comps = Vec::new();
        for rmax in [4usize, 8, 12] {
            let cfg = BundleConfig::with_tanh_profile(win(14), rmax, 1.0).unwrap();
            let bt = BundleTriple::assemble(base.clone(), cfg).unwrap();
            let b = make_b(&bt);
            let (unc, comp) = dual_action_continuity_contrast(&bt, &b, 0.0, 1e-3).unwrap();
            uncs.push(unc);
            comps.push(comp);
        }
        // The uncompressed norm does not shrink as rmax grows.
        assert!(uncs[1] >= 0.9 * uncs[0]);
        assert!(uncs[2] >= 0.9 * uncs[1]);
        // The compressed norm stays uniformly small in rmax.
        for (&c, &u) in comps.iter().zip(&uncs) {
            assert!(c <= u + 1e-15);
        }
        let spread = comps.iter().fold(0.0f64, |m, &c| m.max(c));
        // and it scales with |k - k'|: at 1e-3 it stays below ~C·1e-3.
        assert!(spread < 5e-3, "compressed {spread}");
    }

    #[test]
    fn compactness_profile_examples() {
        let mut rng = SplitMix64::new(3);
        let base = cycle_base(2, &mut rng);
        let cfg = BundleConfig::with_tanh_profile(win(6), 2, 1.0).unwrap();
        let bt = BundleTriple::assemble(base, cfg).unwrap();
        let zero: Vec<CMatrix> = (0..bt.config().window.len())
            .map(|_| CMatrix::zeros(2, 2))
            .collect();
        let profile = compactness_profile(&[zero], &bt, &[0.1, 0.01]).unwrap();
        assert_eq!(profile.sup_norm, 0.0);
        assert_eq!(profile.tail_sup, 0.0);
        assert!(profile.max_net_sizes.iter().all(|&s| s == 1));

        // An element sitting at the window edge is flagged by the tail.
        let mut edge: Vec<CMatrix> = (0..bt.config().window.len())
            .map(|_| CMatrix::zeros(2, 2))
            .collect();
        let hi = bt.config().window.hi();
        let idx = (hi - bt.config().window.lo()) as usize;
        edge[idx] = CMatrix::identity(2);
        let profile = compactness_profile(&[edge], &bt, &[0.1]).unwrap();
        assert!((profile.tail_sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            BundleConfig::with_tanh_profile(win(4), 3, 0.0),
            Err(BundleError::ZeroLambda)
        ));
        assert!(BundleConfig::with_tanh_profile(win(4), 9, 1.0).is_err());
    }
}
