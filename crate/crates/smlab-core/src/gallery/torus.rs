//! Toral automorphisms acting on trigonometric polynomials.
//!
//! A matrix `A ∈ GL_2(Z)` with `|det| = 1` acts on the 2-torus, hence on
//! Fourier modes by `α^k(e_λ) = e_{(Aᵀ)^{-k} λ}`. Against the flat Dirac
//! operator the commutator with a single mode has norm `2π|λ|`, so the
//! seminorm of a transported mode is read off the mode lattice: it grows
//! geometrically (rate = spectral radius) for a hyperbolic matrix and
//! linearly for a parabolic one. That growth is exactly the failure of
//! equicontinuity.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::GalleryError;
use crate::eigen::operator_norm;
use crate::math;
use crate::matrix::{CMatrix, C64, ZERO};

/// Integer 2x2 matrix with determinant ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatAuto {
    pub m: [[i64; 2]; 2],
}

impl CatAuto {
    pub fn new(m: [[i64; 2]; 2]) -> Result<Self, GalleryError> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() != 1 {
            return Err(GalleryError::NotUnimodular(det));
        }
        Ok(Self { m })
    }

    /// The Arnold cat matrix `[[2,1],[1,1]]`.
    pub fn arnold() -> Self {
        Self {
            m: [[2, 1], [1, 1]],
        }
    }

    /// The parabolic matrix `[[1,1],[0,1]]`.
    pub fn parabolic() -> Self {
        Self {
            m: [[1, 1], [0, 1]],
        }
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: [[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]],
        }
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        // adj/det with det = ±1 stays integral.
        Self {
            m: [
                [d * self.m[1][1], -d * self.m[0][1]],
                [-d * self.m[1][0], d * self.m[0][0]],
            ],
        }
    }

    pub fn apply(&self, v: (i64, i64)) -> Result<(i64, i64), GalleryError> {
        let x = (self.m[0][0] as i128) * (v.0 as i128) + (self.m[0][1] as i128) * (v.1 as i128);
        let y = (self.m[1][0] as i128) * (v.0 as i128) + (self.m[1][1] as i128) * (v.1 as i128);
        if x.abs() > i64::MAX as i128 || y.abs() > i64::MAX as i128 {
            return Err(GalleryError::Overflow);
        }
        Ok((x as i64, y as i64))
    }

    pub fn pow_apply(&self, v: (i64, i64), k: i64) -> Result<(i64, i64), GalleryError> {
        let step = if k >= 0 { *self } else { self.inverse() };
        let mut out = v;
        for _ in 0..k.abs() {
            out = step.apply(out)?;
        }
        Ok(out)
    }

    /// Spectral radius from the closed 2x2 form.
    pub fn spectral_radius(&self) -> f64 {
        let t = (self.m[0][0] + self.m[1][1]) as f64;
        let d = self.det() as f64;
        let disc = t * t - 4.0 * d;
        if disc >= 0.0 {
            let r = math::sqrt(disc);
            math::abs((t + r) / 2.0).max(math::abs((t - r) / 2.0))
        } else {
            math::sqrt(math::abs(d))
        }
    }
}

/// Trigonometric polynomial on the 2-torus, stored by Fourier modes
/// inside the box `|n|, |m| ≤ cutoff`.
#[derive(Debug, Clone)]
pub struct TorusPoly {
    pub cutoff: i64,
    pub coeffs: BTreeMap<(i64, i64), C64>,
}

impl TorusPoly {
    pub fn new(cutoff: i64, terms: Vec<((i64, i64), C64)>) -> Result<Self, GalleryError> {
        let mut coeffs = BTreeMap::new();
        for (mode, c) in terms {
            if mode.0.abs() > cutoff || mode.1.abs() > cutoff {
                return Err(GalleryError::CutoffTooSmall(
                    cutoff,
                    mode.0.abs().max(mode.1.abs()),
                ));
            }
            if c != ZERO {
                coeffs.insert(mode, c);
            }
        }
        Ok(Self { cutoff, coeffs })
    }

    pub fn single_mode(cutoff: i64, mode: (i64, i64)) -> Result<Self, GalleryError> {
        Self::new(cutoff, alloc::vec![(mode, C64::new(1.0, 0.0))])
    }

    pub fn support_radius(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|&(n, m)| n.abs().max(m.abs()))
            .max()
            .unwrap_or(0)
    }
}

/// Pull back by `A^{-k}`: modes transform by `(Aᵀ)^{-k}`; coefficients
/// are carried along unchanged, so the map is a *-automorphism on the
/// span of modes.
pub fn cat_pullback(f: &TorusPoly, a: &CatAuto, k: i64) -> Result<TorusPoly, GalleryError> {
    let t = a.transpose();
    let mut terms = Vec::new();
    for (&mode, &c) in &f.coeffs {
        let image = t.pow_apply(mode, -k)?;
        if image.0.abs() > f.cutoff || image.1.abs() > f.cutoff {
            return Err(GalleryError::CutoffTooSmall(
                f.cutoff,
                image.0.abs().max(image.1.abs()),
            ));
        }
        terms.push((image, c));
    }
    TorusPoly::new(f.cutoff, terms)
}

/// Spin factor of the flat Dirac operator at mode `μ`:
/// `2π [[0, μ1 - iμ2], [μ1 + iμ2, 0]]`.
fn dirac_spin(mode: (i64, i64)) -> CMatrix {
    let two_pi = 2.0 * math::PI;
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = C64::new(two_pi * mode.0 as f64, -two_pi * mode.1 as f64);
    m[(1, 0)] = C64::new(two_pi * mode.0 as f64, two_pi * mode.1 as f64);
    m
}

/// `‖[D, f]‖` from the assembled matrix on modes `|·| ≤ cutoff` (spinor
/// dimension 2). Requires `cutoff ≥ 2 × support radius` so the band of
/// the commutator is fully represented around the interior columns.
pub fn torus_commutator_norm(f: &TorusPoly) -> Result<f64, GalleryError> {
    let radius = f.support_radius();
    if f.cutoff < 2 * radius {
        return Err(GalleryError::CutoffTooSmall(f.cutoff, 2 * radius));
    }
    if f.coeffs.is_empty() {
        return Ok(0.0);
    }
    let m = f.cutoff;
    let side = (2 * m + 1) as usize;
    let dim = side * side * 2;
    let idx = |mode: (i64, i64), s: usize| -> usize {
        ((((mode.0 + m) as usize) * side + (mode.1 + m) as usize) << 1) + s
    };
    let mut mat = CMatrix::zeros(dim, dim);
    for (&lam, &c) in &f.coeffs {
        for n1 in -m..=m {
            for n2 in -m..=m {
                let nu = (n1, n2);
                let target = (nu.0 + lam.0, nu.1 + lam.1);
                if target.0.abs() > m || target.1.abs() > m {
                    continue;
                }
                let block = dirac_spin(target)
                    .sub(&dirac_spin(nu))
                    .expect("shape")
                    .scale(c);
                for s1 in 0..2 {
                    for s2 in 0..2 {
                        let z = block[(s1, s2)];
                        if z != ZERO {
                            mat[(idx(target, s1), idx(nu, s2))] += z;
                        }
                    }
                }
            }
        }
    }
    Ok(operator_norm(&mat))
}

/// Closed-form seminorm of a transported single mode:
/// `‖[D, α^k(e_λ)]‖ = 2π |(Aᵀ)^{-k} λ|`.
pub fn transported_mode_seminorm(
    a: &CatAuto,
    mode: (i64, i64),
    k: i64,
) -> Result<f64, GalleryError> {
    let image = a.transpose().pow_apply(mode, -k)?;
    Ok(2.0 * math::PI * math::hypot(image.0 as f64, image.1 as f64))
}

/// Seminorm trajectory of a full polynomial along the orbit, through the
/// assembled-matrix norm at the stated cutoff. Feasible for modest `k`
/// only: the transported support must stay within half the cutoff, and
/// the hyperbolic case blows that up at rate `ρ(A)^k` — which is exactly
/// why single modes carry the long-range growth measurements.
pub fn poly_growth_norms(
    a: &CatAuto,
    f: &TorusPoly,
    kmax: i64,
    cutoff: i64,
) -> Result<Vec<f64>, GalleryError> {
    let widened = TorusPoly::new(cutoff, f.coeffs.iter().map(|(&m, &c)| (m, c)).collect())?;
    let mut norms = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax {
        let moved = cat_pullback(&widened, a, k)?;
        norms.push(torus_commutator_norm(&moved)?);
    }
    Ok(norms)
}

#[derive(Debug, Clone)]
pub struct GrowthReport {
    /// Successive seminorm ratios `s_{k+1}/s_k` for `k = 0..kmax-1`.
    pub ratios: Vec<f64>,
    /// The last ratio, the measured growth rate.
    pub final_ratio: f64,
    /// Log-log slope of `s_k` against `k` over the upper half of the
    /// range: ≈ 1 for linear (parabolic) growth.
    pub power_exponent: f64,
}

/// Growth of `‖[D, α^k(e_λ)]‖` along the orbit of a single mode.
pub fn growth_exponent(
    a: &CatAuto,
    mode: (i64, i64),
    kmax: i64,
) -> Result<GrowthReport, GalleryError> {
    let norms: Vec<f64> = (0..=kmax)
        .map(|k| transported_mode_seminorm(a, mode, k))
        .collect::<Result<_, _>>()?;
    let ratios: Vec<f64> = norms.windows(2).map(|w| w[1] / w[0]).collect();
    let final_ratio = *ratios.last().expect("kmax >= 1");
    // least-squares slope of ln s_k vs ln k on k in [kmax/2, kmax]
    let lo = (kmax / 2).max(1);
    let points: Vec<(f64, f64)> = (lo..=kmax)
        .map(|k| (math::ln(k as f64), math::ln(norms[k as usize])))
        .collect();
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let power_exponent = if math::abs(denom) < 1e-14 {
        0.0
    } else {
        (n * sxy - sx * sy) / denom
    };
    Ok(GrowthReport {
        ratios,
        final_ratio,
        power_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_norm_single_modes() {
        // constant → 0
        let f = TorusPoly::new(4, alloc::vec![((0, 0), C64::new(1.0, 0.0))]).unwrap();
        assert_eq!(torus_commutator_norm(&f).unwrap(), 0.0);
        // e_(1,0) → 2π
        let f = TorusPoly::single_mode(2, (1, 0)).unwrap();
        let got = torus_commutator_norm(&f).unwrap();
        assert!((got - 2.0 * math::PI).abs() < 1e-10, "{got}");
        // e_(3,4) → 10π
        let f = TorusPoly::single_mode(10, (3, 4)).unwrap();
        let got = torus_commutator_norm(&f).unwrap();
        assert!((got - 10.0 * math::PI).abs() < 1e-9, "{got}");
    }

    #[test]
    fn cutoff_guard() {
        let f = TorusPoly::single_mode(3, (2, 0)).unwrap();
        assert!(matches!(
            torus_commutator_norm(&f),
            Err(GalleryError::CutoffTooSmall(3, 4))
        ));
    }

    #[test]
    fn pullback_examples() {
        let cat = CatAuto::arnold();
        let f = TorusPoly::single_mode(8, (1, 0)).unwrap();
        // k = 0 is the identity.
        let same = cat_pullback(&f, &cat, 0).unwrap();
        assert_eq!(same.coeffs, f.coeffs);
        // k = -1 sends (1,0) to M(1,0) = (2,1) for the symmetric cat matrix.
        let moved = cat_pullback(&f, &cat, -1).unwrap();
        assert!(moved.coeffs.contains_key(&(2, 1)));
        // α ∘ α^{-1} = id.
        let back = cat_pullback(&cat_pullback(&f, &cat, 3).unwrap(), &cat, -3).unwrap();
        assert_eq!(back.coeffs, f.coeffs);
    }

    #[test]
    fn transported_seminorm_matches_assembled_matrix() {
        // ‖[D, α^k(e_λ)]‖ = 2π|(Mᵀ)^{-k}λ| against the dense oracle.
        let cat = CatAuto::arnold();
        let lam = (1, 0);
        for k in 0..=2 {
            let image = cat.transpose().pow_apply(lam, -k).unwrap();
            let radius = image.0.abs().max(image.1.abs());
            let f = TorusPoly::single_mode(2 * radius, image).unwrap();
            let assembled = torus_commutator_norm(&f).unwrap();
            let formula = transported_mode_seminorm(&cat, lam, k).unwrap();
            assert!(
                (assembled - formula).abs() <= 1e-10 * formula.max(1.0),
                "{assembled} vs {formula}"
            );
        }
    }

    #[test]
    fn growth_identity_matrix() {
        let id = CatAuto::new([[1, 0], [0, 1]]).unwrap();
        let report = growth_exponent(&id, (1, 1), 6).unwrap();
        for r in &report.ratios {
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_hyperbolic_reaches_spectral_radius() {
        let cat = CatAuto::arnold();
        let rho = cat.spectral_radius();
        assert!((rho - (3.0 + math::sqrt(5.0)) / 2.0).abs() < 1e-12);
        let report = growth_exponent(&cat, (1, 0), 8).unwrap();
        assert!(
            (report.final_ratio - rho).abs() <= 0.01 * rho,
            "ratio {} vs spectral radius {}",
            report.final_ratio,
            rho
        );
        // The golden-ratio values (√5 ± 1)/2 sometimes quoted for this
        // matrix do not match its trace-3 spectrum (3 ± √5)/2; the
        // measured ratio stays well away from them.
        let golden = (math::sqrt(5.0) + 1.0) / 2.0;
        assert!((report.final_ratio - golden).abs() > 0.5);
    }

    #[test]
    fn poly_growth_brackets() {
        // Multi-mode polynomial: the assembled seminorm sits between the
        // largest single-mode term and the sum of the terms.
        let cat = CatAuto::arnold();
        let f = TorusPoly::new(
            4,
            alloc::vec![((1, 0), C64::new(1.0, 0.0)), ((0, 1), C64::new(0.5, 0.0)),],
        )
        .unwrap();
        let norms = poly_growth_norms(&cat, &f, 2, 10).unwrap();
        for (k, norm) in norms.iter().enumerate() {
            let t = cat.transpose();
            let modes = [(1i64, 0i64), (0, 1)];
            let weights = [1.0, 0.5];
            let mut lower = 0.0f64;
            let mut upper = 0.0;
            for (mode, wgt) in modes.iter().zip(weights.iter()) {
                let image = t.pow_apply(*mode, -(k as i64)).unwrap();
                let term = wgt * 2.0 * math::PI * math::hypot(image.0 as f64, image.1 as f64);
                lower = lower.max(term);
                upper += term;
            }
            assert!(*norm >= lower - 1e-9, "k={k}: {norm} < {lower}");
            assert!(*norm <= upper + 1e-9, "k={k}: {norm} > {upper}");
        }
        // Single-mode polynomials reproduce the closed form exactly.
        let single = TorusPoly::single_mode(4, (1, 0)).unwrap();
        let norms = poly_growth_norms(&cat, &single, 2, 8).unwrap();
        for (k, norm) in norms.iter().enumerate() {
            let formula = transported_mode_seminorm(&cat, (1, 0), k as i64).unwrap();
            assert!((norm - formula).abs() <= 1e-10 * formula.max(1.0));
        }
        // The hyperbolic orbit escapes a too-small cutoff.
        assert!(matches!(
            poly_growth_norms(&cat, &single, 8, 8),
            Err(GalleryError::CutoffTooSmall(_, _))
        ));
    }

    #[test]
    fn growth_parabolic_is_linear() {
        let n = CatAuto::parabolic();
        let report = growth_exponent(&n, (1, 0), 16).unwrap();
        assert!(
            (report.power_exponent - 1.0).abs() <= 0.1,
            "exponent {}",
            report.power_exponent
        );
        // non-equicontinuity certificate: growth ratio exceeds 1.5 by k = 2
        // for the hyperbolic map but not the parabolic one.
        let cat_report = growth_exponent(&CatAuto::arnold(), (1, 0), 2).unwrap();
        assert!(cat_report.ratios[1] > 1.5);
    }
}
