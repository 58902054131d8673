//! Metrics on `Z` and the spectral triples over `c0(Z)` they induce.
//!
//! Two Dirac constructions are materialised on a finite window
//! `-N..=N`. The first, `D_λ = D_Z + λX`, couples only consecutive
//! points through the weighted difference `(∇f)_n = (f_n - f_{n-1}) /
//! (i d(n, n-1))`; its Lipschitz seminorm is the sup of consecutive
//! difference quotients. The second, `D_K`, carries one difference
//! operator per hop length `r` on `ℓ²(window × {1..rmax}) ⊗ C⁴` with a
//! Dirac-matrix spin factor; its seminorm is the sup over all pairs.
//!
//! Truncation is open-boundary: difference terms that would reach
//! outside the window are dropped, which keeps every assembled operator
//! exactly Hermitian while leaving commutators with interior-supported
//! elements untouched.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::matrix::{CMatrix, C64};
use crate::spin::{dirac_gammas, gamma_ladders};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ZlineError {
    #[error("window half-width must be at least 2, got {0}")]
    WindowTooNarrow(i64),
    #[error("index {0} outside the window")]
    OutOfWindow(i64),
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("weight violation: c_n * delta_n = {0} < 1 at n = {1}")]
    WeightViolation(f64, i64),
    #[error("range {0} exceeds window diameter")]
    RangeTooLarge(usize),
    #[error("window too small for witness cap {0}")]
    WindowTooSmall(i64),
    #[error("invalid metric data: {0}")]
    InvalidMetric(&'static str),
    #[error("sequence length {0} does not match window size {1}")]
    LengthMismatch(usize, usize),
}

/// Symmetric index window `-N..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    half: i64,
}

impl Window {
    pub fn new(half: i64) -> Result<Self, ZlineError> {
        if half < 2 {
            return Err(ZlineError::WindowTooNarrow(half));
        }
        Ok(Self { half })
    }

    #[inline]
    pub fn half(&self) -> i64 {
        self.half
    }

    #[inline]
    pub fn lo(&self) -> i64 {
        -self.half
    }

    #[inline]
    pub fn hi(&self) -> i64 {
        self.half
    }

    #[inline]
    pub fn len(&self) -> usize {
        (2 * self.half + 1) as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn contains(&self, n: i64) -> bool {
        -self.half <= n && n <= self.half
    }

    #[inline]
    pub fn index_of(&self, n: i64) -> Result<usize, ZlineError> {
        if !self.contains(n) {
            return Err(ZlineError::OutOfWindow(n));
        }
        Ok((n + self.half) as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo()..=self.hi()
    }
}

/// A metric on (a window of) `Z`.
#[derive(Debug, Clone)]
pub enum ZMetric {
    /// Consecutive gaps `δ_n = d(n, n-1) > 0` for `n = lo+1..=hi`; the
    /// induced distance is the sum of gaps between the endpoints, so the
    /// triangle inequality is automatic.
    PathGaps { window: Window, gaps: Vec<f64> },
    /// Shift-invariant profile `d(m, n) = d_{|m-n|}` with `d_0 = 0`.
    ShiftInvariant { profile: Vec<f64> },
    /// Explicit symmetric distance table over the window.
    Table { window: Window, entries: Vec<f64> },
}

impl ZMetric {
    pub fn path_gaps(window: Window, gaps: Vec<f64>) -> Result<Self, ZlineError> {
        if gaps.len() != window.len() - 1 {
            return Err(ZlineError::InvalidMetric(
                "gap count must be window size - 1",
            ));
        }
        if gaps.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
            return Err(ZlineError::InvalidMetric(
                "gaps must be positive and finite",
            ));
        }
        Ok(Self::PathGaps { window, gaps })
    }

    pub fn unit_gaps(window: Window) -> Self {
        let gaps = vec![1.0; window.len() - 1];
        Self::PathGaps { window, gaps }
    }

    /// Gaps `δ_j = 2^{-|j|}` indexed like [`ZMetric::path_gaps`]; summable,
    /// so the associated Lipschitz ball is norm bounded.
    pub fn summable_gaps(window: Window) -> Self {
        let gaps = (window.lo() + 1..=window.hi())
            .map(|n| math::powi(2.0, -(n.abs() as i32)))
            .collect();
        Self::PathGaps { window, gaps }
    }

    pub fn shift_invariant(profile: Vec<f64>) -> Result<Self, ZlineError> {
        if profile.is_empty() || profile[0] != 0.0 {
            return Err(ZlineError::InvalidMetric("profile must start with d_0 = 0"));
        }
        if profile[1..].iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(ZlineError::InvalidMetric(
                "profile entries must be positive",
            ));
        }
        let l = profile.len();
        for j in 1..l {
            for jp in 1..l {
                for jpp in 1..l {
                    if j <= jp + jpp && profile[j] > profile[jp] + profile[jpp] + 1e-12 {
                        return Err(ZlineError::InvalidMetric("profile violates subadditivity"));
                    }
                }
            }
        }
        Ok(Self::ShiftInvariant { profile })
    }

    /// `d(m, n) = tanh(|m - n|)`, the standard bounded shift-invariant
    /// metric on `Z`.
    pub fn tanh_profile(max_sep: usize) -> Self {
        let profile = (0..=max_sep).map(|j| math::tanh(j as f64)).collect();
        Self::ShiftInvariant { profile }
    }

    pub fn table(window: Window, entries: Vec<f64>) -> Result<Self, ZlineError> {
        let p = window.len();
        if entries.len() != p * p {
            return Err(ZlineError::InvalidMetric("table must be (2N+1)^2 entries"));
        }
        for i in 0..p {
            if entries[i * p + i] != 0.0 {
                return Err(ZlineError::InvalidMetric("table diagonal must vanish"));
            }
            for j in 0..p {
                let d = entries[i * p + j];
                if !d.is_finite() || (i != j && !(d > 0.0)) {
                    return Err(ZlineError::InvalidMetric(
                        "table must be positive off-diagonal",
                    ));
                }
                if (d - entries[j * p + i]).abs() > 0.0 {
                    return Err(ZlineError::InvalidMetric("table must be symmetric"));
                }
            }
        }
        for i in 0..p {
            for j in 0..p {
                for k in 0..p {
                    if entries[i * p + j] > entries[i * p + k] + entries[k * p + j] + 1e-12 {
                        return Err(ZlineError::InvalidMetric(
                            "table violates triangle inequality",
                        ));
                    }
                }
            }
        }
        Ok(Self::Table { window, entries })
    }

    pub fn distance(&self, m: i64, n: i64) -> Result<f64, ZlineError> {
        match self {
            Self::PathGaps { window, gaps } => {
                window.index_of(m)?;
                window.index_of(n)?;
                let (a, b) = if m <= n { (m, n) } else { (n, m) };
                let mut sum = 0.0;
                for k in (a + 1)..=b {
                    sum += gaps[(k - window.lo() - 1) as usize];
                }
                Ok(sum)
            }
            Self::ShiftInvariant { profile } => {
                let sep = (m - n).unsigned_abs() as usize;
                profile.get(sep).copied().ok_or(ZlineError::InvalidMetric(
                    "separation beyond profile length",
                ))
            }
            Self::Table { window, entries } => {
                let i = window.index_of(m)?;
                let j = window.index_of(n)?;
                Ok(entries[i * window.len() + j])
            }
        }
    }

    /// Consecutive gap `d(n, n-1)`.
    pub fn gap(&self, n: i64) -> Result<f64, ZlineError> {
        self.distance(n, n - 1)
    }
}

/// Path metric `d_p(m, n) = Σ_{k=m+1}^{n} d(k, k-1)` induced by the
/// consecutive gaps of any metric.
pub fn path_metric(m: i64, n: i64, metric: &ZMetric, window: Window) -> Result<f64, ZlineError> {
    window.index_of(m)?;
    window.index_of(n)?;
    let (a, b) = if m <= n { (m, n) } else { (n, m) };
    let mut sum = 0.0;
    for k in (a + 1)..=b {
        sum += metric.gap(k)?;
    }
    Ok(sum)
}

/// Diverging weights `c_n` with `c_n δ_n ≥ 1`, defined on `-N..=N+1`.
#[derive(Debug, Clone)]
pub struct WeightSeq {
    window: Window,
    /// Values for `n = -N..=N+1`.
    values: Vec<f64>,
}

impl WeightSeq {
    /// Default choice: the outward running maximum of
    /// `max(1, |n|) / min(δ_n, 1)`, which satisfies `c_n δ_n ≥ 1`, grows
    /// to infinity, and is nondecreasing toward both window edges.
    pub fn default_for(metric: &ZMetric, window: Window) -> Result<Self, ZlineError> {
        let mut raw = Vec::with_capacity(window.len() + 1);
        for n in window.lo()..=window.hi() + 1 {
            // Edge gaps fall back on the nearest in-window gap.
            let m = n.clamp(window.lo() + 1, window.hi());
            let delta = metric.gap(m)?;
            raw.push((1.0f64).max(n.abs() as f64) / delta.min(1.0));
        }
        // Running max outward from n = 0 on each side.
        let zero_idx = (-window.lo()) as usize;
        let mut values = raw.clone();
        for i in (zero_idx + 1)..values.len() {
            values[i] = values[i].max(values[i - 1]);
        }
        for i in (0..zero_idx).rev() {
            values[i] = values[i].max(values[i + 1]);
        }
        let w = Self { window, values };
        w.validate(metric)?;
        Ok(w)
    }

    pub fn from_values(
        window: Window,
        values: Vec<f64>,
        metric: &ZMetric,
    ) -> Result<Self, ZlineError> {
        if values.len() != window.len() + 1 {
            return Err(ZlineError::LengthMismatch(values.len(), window.len() + 1));
        }
        let w = Self { window, values };
        w.validate(metric)?;
        Ok(w)
    }

    fn validate(&self, metric: &ZMetric) -> Result<(), ZlineError> {
        for n in self.window.lo() + 1..=self.window.hi() {
            let prod = self.at(n) * metric.gap(n)?;
            if prod < 1.0 - 1e-12 {
                return Err(ZlineError::WeightViolation(prod, n));
            }
        }
        for n in 0..self.window.hi() {
            if self.at(n + 1) < self.at(n) {
                return Err(ZlineError::InvalidMetric(
                    "weights must grow toward the right edge",
                ));
            }
        }
        for n in (self.window.lo() + 1..=0).rev() {
            if self.at(n - 1) < self.at(n) {
                return Err(ZlineError::InvalidMetric(
                    "weights must grow toward the left edge",
                ));
            }
        }
        Ok(())
    }

    /// `c_n`, clamped into the stored range `-N..=N+1`.
    pub fn at(&self, n: i64) -> f64 {
        let idx = (n.clamp(self.window.lo(), self.window.hi() + 1) - self.window.lo()) as usize;
        self.values[idx]
    }
}

/// Tensor-factor layout of a truncated operator: index order is
/// `(n, r, h, s)` with `n` in the window, `r = 1..=ranges`, `h` a base
/// Hilbert-space index and `s` a spin index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub window: Window,
    pub ranges: usize,
    pub base_dim: usize,
    pub spin_dim: usize,
}

impl Layout {
    pub fn dim(&self) -> usize {
        self.window.len() * self.ranges * self.base_dim * self.spin_dim
    }

    #[inline]
    pub fn index(&self, n: i64, r: usize, h: usize, s: usize) -> usize {
        let ni = (n + self.window.half()) as usize;
        ((ni * self.ranges + r) * self.base_dim + h) * self.spin_dim + s
    }
}

/// A dense matrix tagged with the window and tensor layout it acts on.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    pub matrix: CMatrix,
    pub layout: Layout,
}

impl TruncatedOperator {
    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.hermiticity_defect()
    }
}

/// Assemble `D_λ = D_Z + λX` on `ℓ²(window) ⊗ C²`.
pub fn build_dirac_lambda(
    metric: &ZMetric,
    window: Window,
    weights: &WeightSeq,
    lambda: f64,
) -> Result<TruncatedOperator, ZlineError> {
    if lambda == 0.0 {
        return Err(ZlineError::ZeroLambda);
    }
    weights.validate(metric)?;
    let layout = Layout {
        window,
        ranges: 1,
        base_dim: 1,
        spin_dim: 2,
    };
    let mut m = CMatrix::zeros(layout.dim(), layout.dim());
    // Off-diagonal spin blocks [[0, ∇], [∇*, 0]].
    for n in window.lo() + 1..=window.hi() {
        let delta = metric.gap(n)?;
        let w = C64::new(0.0, -1.0 / delta); // 1/(i δ) = -i/δ
        let row = n;
        // (∇f)_n = w (f_n - f_{n-1})
        let entries = [(row, w), (row - 1, -w)];
        for (col, val) in entries {
            let up = layout.index(row, 0, 0, 0);
            let dn = layout.index(col, 0, 0, 1);
            m[(up, dn)] += val;
            // Hermitian partner: ∇* block.
            m[(dn, up)] += val.conj();
        }
    }
    for n in window.iter() {
        let x = lambda * weights.at(n) * weights.at(n + 1);
        let i0 = layout.index(n, 0, 0, 0);
        let i1 = layout.index(n, 0, 0, 1);
        m[(i0, i0)] += C64::new(x, 0.0);
        m[(i1, i1)] -= C64::new(x, 0.0);
    }
    Ok(TruncatedOperator { matrix: m, layout })
}

/// Assemble `D_K` on `ℓ²(window × {1..rmax}) ⊗ C⁴` with the gamma-matrix
/// spin factor: ladder terms carry the hop-`r` differences, and the
/// diagonal `λ(X + R)` carries `c_n c_{n+r} γ3 + r γ4`.
pub fn build_dirac_k(
    metric: &ZMetric,
    window: Window,
    rmax: usize,
    lambda: f64,
    weights: &WeightSeq,
) -> Result<TruncatedOperator, ZlineError> {
    if lambda == 0.0 {
        return Err(ZlineError::ZeroLambda);
    }
    if rmax == 0 || rmax as i64 > 2 * window.half() {
        return Err(ZlineError::RangeTooLarge(rmax));
    }
    let gammas = dirac_gammas();
    let (up, down) = gamma_ladders(&gammas);
    let g3 = gammas.gamma(3);
    let g4 = gammas.gamma(4);
    let layout = Layout {
        window,
        ranges: rmax,
        base_dim: 1,
        spin_dim: 4,
    };
    let mut m = CMatrix::zeros(layout.dim(), layout.dim());
    for r in 1..=rmax {
        let ri = r - 1;
        for n in window.iter() {
            // Ladder terms: (∇f)_{n,r} = (f_{n,r} - f_{n-r,r}) / d(n, n-r),
            // dropped when the hop leaves the window.
            if window.contains(n - r as i64) {
                let d = metric.distance(n, n - r as i64)?;
                let w = C64::new(1.0 / d, 0.0);
                for s in 0..4 {
                    for sp in 0..4 {
                        let u = up[(s, sp)];
                        if u != C64::new(0.0, 0.0) {
                            m[(layout.index(n, ri, 0, s), layout.index(n, ri, 0, sp))] += u * w;
                            m[(
                                layout.index(n, ri, 0, s),
                                layout.index(n - r as i64, ri, 0, sp),
                            )] -= u * w;
                        }
                        let dw = down[(s, sp)];
                        if dw != C64::new(0.0, 0.0) {
                            // ∇* is the adjoint: +w at (n, n), -w at (n-r, n).
                            m[(layout.index(n, ri, 0, s), layout.index(n, ri, 0, sp))] += dw * w;
                            m[(
                                layout.index(n - r as i64, ri, 0, s),
                                layout.index(n, ri, 0, sp),
                            )] -= dw * w;
                        }
                    }
                }
            }
            // Diagonal λ(X + R).
            let x = weights.at(n) * weights.at(n + r as i64);
            for s in 0..4 {
                for sp in 0..4 {
                    let val = g3[(s, sp)] * C64::new(lambda * x, 0.0)
                        + g4[(s, sp)] * C64::new(lambda * r as f64, 0.0);
                    if val != C64::new(0.0, 0.0) {
                        m[(layout.index(n, ri, 0, s), layout.index(n, ri, 0, sp))] += val;
                    }
                }
            }
        }
    }
    Ok(TruncatedOperator { matrix: m, layout })
}

/// Wait-free check of the compact-resolvent estimate from the proof of
/// the `D_λ` lemma: `|i - c_n c_{n+1}|^{-2} δ_n^{-2} ≤ c_{n+1}^{-2}`.
pub fn dirac_lambda_proof_bound(
    metric: &ZMetric,
    window: Window,
    weights: &WeightSeq,
) -> Result<f64, ZlineError> {
    let mut worst = f64::NEG_INFINITY;
    for n in window.lo() + 1..=window.hi() {
        let delta = metric.gap(n)?;
        let c = weights.at(n) * weights.at(n + 1);
        let lhs = 1.0 / ((1.0 + c * c) * delta * delta);
        let rhs = 1.0 / (weights.at(n + 1) * weights.at(n + 1));
        worst = worst.max(lhs - rhs);
    }
    Ok(worst)
}

/// `sup_n |a_n - a_{n+1}| / d(n, n+1)` over the window: the closed form
/// of `‖[D_λ, a]‖` for real `a`.
pub fn lipschitz_seminorm_consecutive(
    a: &[f64],
    metric: &ZMetric,
    window: Window,
) -> Result<f64, ZlineError> {
    if a.len() != window.len() {
        return Err(ZlineError::LengthMismatch(a.len(), window.len()));
    }
    let mut sup: f64 = 0.0;
    for n in window.lo()..window.hi() {
        let i = (n - window.lo()) as usize;
        sup = sup.max(math::abs(a[i] - a[i + 1]) / metric.distance(n, n + 1)?);
    }
    Ok(sup)
}

/// `sup_{m≠n} |a_m - a_n| / d(m, n)` over all window pairs: the closed
/// form of `‖[D_K, a]‖` for real `a` when every hop fits in `rmax`.
pub fn lipschitz_seminorm_allpairs(
    a: &[f64],
    metric: &ZMetric,
    window: Window,
) -> Result<f64, ZlineError> {
    if a.len() != window.len() {
        return Err(ZlineError::LengthMismatch(a.len(), window.len()));
    }
    let mut sup: f64 = 0.0;
    for m in window.iter() {
        for n in (m + 1)..=window.hi() {
            let i = (m - window.lo()) as usize;
            let j = (n - window.lo()) as usize;
            sup = sup.max(math::abs(a[i] - a[j]) / metric.distance(m, n)?);
        }
    }
    Ok(sup)
}

/// Embed a real window sequence as the diagonal algebra element
/// `diag(a) ⊗ 1` on the layout of a truncated operator.
pub fn diagonal_element(a: &[f64], layout: &Layout) -> Result<CMatrix, ZlineError> {
    if a.len() != layout.window.len() {
        return Err(ZlineError::LengthMismatch(a.len(), layout.window.len()));
    }
    let mut m = CMatrix::zeros(layout.dim(), layout.dim());
    for n in layout.window.iter() {
        let v = C64::new(a[(n - layout.window.lo()) as usize], 0.0);
        for r in 0..layout.ranges {
            for h in 0..layout.base_dim {
                for s in 0..layout.spin_dim {
                    let i = layout.index(n, r, h, s);
                    m[(i, i)] = v;
                }
            }
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// Ramp of consecutive gaps; Lipschitz-1 for the consecutive seminorm.
    Path,
    /// Ramp of distances to the origin; Lipschitz-1 for the all-pairs
    /// seminorm.
    AllPairs,
}

/// The Lipschitz-1 witness `a^N`: zero left of the origin, a ramp up to
/// its peak at `n = N`, then a ramp back down clamped at zero. Its sup
/// norm witnesses whether the Lipschitz ball is norm bounded.
pub fn ball_witness(
    metric: &ZMetric,
    window: Window,
    n_cap: i64,
    kind: WitnessKind,
) -> Result<Vec<f64>, ZlineError> {
    if n_cap < 1 || window.hi() < 2 * n_cap {
        return Err(ZlineError::WindowTooSmall(n_cap));
    }
    let mut a = vec![0.0; window.len()];
    match kind {
        WitnessKind::Path => {
            let mut peak = 0.0;
            for n in 1..=n_cap {
                peak += metric.gap(n)?;
                a[(n - window.lo()) as usize] = peak;
            }
            let mut tail = peak;
            for n in (n_cap + 1)..=window.hi() {
                tail -= metric.gap(n)?;
                a[(n - window.lo()) as usize] = tail.max(0.0);
            }
        }
        WitnessKind::AllPairs => {
            for n in 1..=n_cap {
                a[(n - window.lo()) as usize] = metric.distance(0, n)?;
            }
            let peak = metric.distance(0, n_cap)?;
            for n in (n_cap + 1)..=window.hi() {
                a[(n - window.lo()) as usize] = (peak - metric.distance(n_cap, n)?).max(0.0);
            }
        }
    }
    Ok(a)
}

/// Sup norm of a window sequence.
pub fn sup_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, &x| m.max(math::abs(x)))
}
