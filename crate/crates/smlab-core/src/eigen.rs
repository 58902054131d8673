//! Hermitian eigensolving and operator norms.
//!
//! The eigensolver is a cyclic Jacobi iteration on the complex Hermitian
//! matrix: each rotation annihilates one off-diagonal entry through a
//! phased Givens rotation. Quadratic convergence and unconditional
//! stability make it the right tool at desk scale, where determinism and
//! accuracy matter more than asymptotics.
//!
//! Operator norms go through `sqrt(λ_max(A*A))`: directly via Jacobi for
//! small matrices, via a fully reorthogonalised Lanczos iteration for
//! larger ones.

use alloc::vec::Vec;

use crate::math;
use crate::matrix::{CMatrix, MatrixError, C64, ZERO};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EigenError {
    #[error("matrix must be square")]
    NonSquare,
    #[error("matrix is not Hermitian within 1e-12 relative tolerance")]
    NotHermitian,
}

/// Spectral decomposition of a Hermitian matrix: ascending eigenvalues
/// and a unitary matrix of column eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `‖A·V − V·diag(values)‖_F`, the reconstruction defect.
    pub fn reconstruction_defect(&self, a: &CMatrix) -> f64 {
        let n = self.values.len();
        let av = a.mul(&self.vectors).expect("shape");
        let mut defect = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = av[(i, j)] - self.vectors[(i, j)] * C64::new(self.values[j], 0.0);
                defect += d.norm_sqr();
            }
        }
        math::sqrt(defect)
    }

    /// `‖V*V − 1‖_F`, the orthonormality defect.
    pub fn orthonormality_defect(&self) -> f64 {
        let vv = self.vectors.adjoint().mul(&self.vectors).expect("shape");
        let n = self.values.len();
        let mut defect = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let e = if i == j { C64::new(1.0, 0.0) } else { ZERO };
                defect += (vv[(i, j)] - e).norm_sqr();
            }
        }
        math::sqrt(defect)
    }
}

/// Cyclic Jacobi diagonalisation of a complex Hermitian matrix.
///
/// Deterministic for a fixed input: sweep order, rotation choices and the
/// final ascending sort do not depend on anything but the entries.
pub fn hermitian_eigen(a: &CMatrix) -> Result<HermitianEigen, EigenError> {
    if !a.is_square() {
        return Err(EigenError::NonSquare);
    }
    let n = a.rows();
    let scale = a.max_abs().max(1.0);
    if a.hermiticity_defect() > 1e-12 * scale {
        return Err(EigenError::NotHermitian);
    }
    // Work on the exact Hermitian part so rounding in the input cannot
    // leak into the rotations.
    let mut w = CMatrix::from_fn(n, n, |i, j| {
        (a[(i, j)] + a[(j, i)].conj()) * C64::new(0.5, 0.0)
    });
    let mut v = CMatrix::identity(n);

    let fro = w.frobenius_norm().max(1e-300);
    let tol = 1e-14 * fro;
    for _sweep in 0..80 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += w[(p, q)].norm_sqr();
            }
        }
        if math::sqrt(2.0 * off) <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                let beta = apq.norm();
                if beta <= 1e-300 {
                    continue;
                }
                let phase = apq / beta;
                let app = w[(p, p)].re;
                let aqq = w[(q, q)].re;
                let tau = (aqq - app) / (2.0 * beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + math::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + math::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                let cp = C64::new(c, 0.0);
                let sp = C64::new(s, 0.0);
                let ph = phase;
                let phc = phase.conj();
                // Column update W ← W·U with U the phased rotation.
                for r in 0..n {
                    let wp = w[(r, p)];
                    let wq = w[(r, q)];
                    w[(r, p)] = cp * wp - sp * phc * wq;
                    w[(r, q)] = sp * wp + cp * phc * wq;
                }
                // Row update W ← U*·W.
                for r in 0..n {
                    let wp = w[(p, r)];
                    let wq = w[(q, r)];
                    w[(p, r)] = cp * wp - sp * ph * wq;
                    w[(q, r)] = sp * wp + cp * ph * wq;
                }
                // Accumulate eigenvectors.
                for r in 0..n {
                    let vp = v[(r, p)];
                    let vq = v[(r, q)];
                    v[(r, p)] = cp * vp - sp * phc * vq;
                    v[(r, q)] = sp * vp + cp * phc * vq;
                }
                // The rotation is unitary, so the pair entry is zero up to
                // rounding; pin it to keep the off-diagonal mass honest.
                w[(p, q)] = ZERO;
                w[(q, p)] = ZERO;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite"));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Largest singular value of `A`, i.e. `sqrt(λ_max(A*A))`.
///
/// Matrices up to 64 on the short side are handled by the Jacobi solver;
/// larger ones by Lanczos with full reorthogonalisation on the positive
/// operator `x ↦ A*(Ax)` (or its adjoint twin, whichever is smaller).
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 || a.max_abs() == 0.0 {
        return 0.0;
    }
    let use_adjoint_side = a.rows() < a.cols();
    let dim = a.rows().min(a.cols());
    if dim <= 64 {
        let b = if use_adjoint_side {
            a.mul(&a.adjoint()).expect("shape")
        } else {
            a.adjoint().mul(a).expect("shape")
        };
        let eig = hermitian_eigen(&b).expect("A*A is Hermitian");
        let top = eig.values.last().copied().unwrap_or(0.0);
        return math::sqrt(top.max(0.0));
    }
    let apply = |x: &[C64]| -> Vec<C64> {
        if use_adjoint_side {
            a.matvec(&a.adjoint_matvec(x))
        } else {
            a.adjoint_matvec(&a.matvec(x))
        }
    };
    math::sqrt(lanczos_top_eigenvalue(dim, apply).max(0.0))
}

/// Independent oracle: plain power iteration on `A*A`.
pub fn power_iteration_norm(a: &CMatrix, iters: usize) -> f64 {
    let dim = a.cols();
    if dim == 0 || a.max_abs() == 0.0 {
        return 0.0;
    }
    let mut v = start_vector(dim);
    let mut lambda = 0.0f64;
    for _ in 0..iters {
        let w = a.adjoint_matvec(&a.matvec(&v));
        let norm = math::sqrt(w.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        v = w.into_iter().map(|z| z / norm).collect();
    }
    math::sqrt(lambda)
}

fn start_vector(dim: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|i| C64::new(1.0 + 0.1 * ((i % 7) as f64), 0.01 * ((i % 13) as f64)))
        .collect();
    let norm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Top eigenvalue of a Hermitian positive semidefinite operator given by
/// its action, via Lanczos with full reorthogonalisation.
fn lanczos_top_eigenvalue(dim: usize, apply: impl Fn(&[C64]) -> Vec<C64>) -> f64 {
    let max_steps = dim.min(480);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(max_steps);
    let mut alphas: Vec<f64> = Vec::with_capacity(max_steps);
    let mut betas: Vec<f64> = Vec::with_capacity(max_steps);

    basis.push(start_vector(dim));
    let mut previous_top = f64::NEG_INFINITY;
    let mut stagnant = 0usize;

    for step in 0..max_steps {
        let vj = basis[step].clone();
        let mut w = apply(&vj);
        let alpha = w
            .iter()
            .zip(&vj)
            .map(|(wz, vz)| (vz.conj() * wz).re)
            .sum::<f64>();
        alphas.push(alpha);
        // Full reorthogonalisation keeps the Ritz values honest.
        for _ in 0..2 {
            for b in &basis {
                let proj: C64 = b.iter().zip(&w).map(|(bz, wz)| bz.conj() * wz).sum();
                for (wz, bz) in w.iter_mut().zip(b) {
                    *wz -= proj * bz;
                }
            }
        }
        let beta = math::sqrt(w.iter().map(|z| z.norm_sqr()).sum::<f64>());
        let scale = alphas
            .iter()
            .fold(0.0f64, |m, &x| m.max(math::abs(x)))
            .max(1e-300);
        if beta <= 1e-14 * scale {
            break; // Krylov space exhausted: the tridiagonal is exact.
        }
        betas.push(beta);
        basis.push(w.into_iter().map(|z| z / beta).collect());

        if (step + 1) % 16 == 0 {
            let top = tridiag_top_eigenvalue(&alphas, &betas[..betas.len() - 1]);
            if top - previous_top <= 1e-14 * top.max(1e-300) {
                stagnant += 1;
                if stagnant >= 2 {
                    break;
                }
            } else {
                stagnant = 0;
            }
            previous_top = top;
        }
    }
    let nb = alphas.len().saturating_sub(1);
    tridiag_top_eigenvalue(&alphas, &betas[..nb.min(betas.len())])
}

/// Top eigenvalue of a real symmetric tridiagonal matrix by Sturm-count
/// bisection.
fn tridiag_top_eigenvalue(alpha: &[f64], beta: &[f64]) -> f64 {
    let n = alpha.len();
    if n == 0 {
        return 0.0;
    }
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for i in 0..n {
        let left = if i > 0 { math::abs(beta[i - 1]) } else { 0.0 };
        let right = if i < n - 1 { math::abs(beta[i]) } else { 0.0 };
        hi = hi.max(alpha[i] + left + right);
        lo = lo.min(alpha[i] - left - right);
    }
    // Count of eigenvalues strictly below x via the LDL^T recurrence.
    let count_below = |x: f64| -> usize {
        let mut d = alpha[0] - x;
        let mut count = if d < 0.0 { 1 } else { 0 };
        for i in 1..n {
            let b2 = beta[i - 1] * beta[i - 1];
            let denom = if math::abs(d) < 1e-300 {
                1e-300_f64.copysign(if d < 0.0 { -1.0 } else { 1.0 })
            } else {
                d
            };
            d = alpha[i] - x - b2 / denom;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut a = lo;
    let mut b = hi + 1e-12 * math::abs(hi).max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if count_below(mid) >= n {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// Convenience: `‖[D, A]‖` for conformable square matrices.
pub fn commutator_norm(d: &CMatrix, a: &CMatrix) -> Result<f64, MatrixError> {
    Ok(operator_norm(&crate::matrix::commutator(d, a)?))
}

/// Singular values (ascending) of the matrix whose columns are given,
/// by one-sided Jacobi: columns are rotated pairwise until mutually
/// orthogonal, so even tiny singular values keep high relative accuracy
/// (the two-sided route through the Gram matrix loses them to rounding).
pub fn column_singular_values(mut cols: Vec<Vec<C64>>) -> Vec<f64> {
    let k = cols.len();
    if k == 0 {
        return Vec::new();
    }
    let inner = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let g11 = inner(&cols[p], &cols[p]).re;
                let g22 = inner(&cols[q], &cols[q]).re;
                let g12 = inner(&cols[p], &cols[q]);
                let beta = g12.norm();
                if beta <= 1e-30 || beta * beta <= 1e-30 * g11 * g22 {
                    continue;
                }
                rotated = true;
                let phase = g12 / beta;
                let tau = (g22 - g11) / (2.0 * beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + math::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + math::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                let phc = phase.conj();
                let (cp, cs) = (C64::new(c, 0.0), C64::new(s, 0.0));
                for r in 0..cols[p].len() {
                    let up = cols[p][r];
                    let uq = cols[q][r];
                    cols[p][r] = cp * up - cs * phc * uq;
                    cols[q][r] = cs * up + cp * phc * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma: Vec<f64> = cols
        .iter()
        .map(|c| math::sqrt(c.iter().map(|z| z.norm_sqr()).sum::<f64>()))
        .collect();
    sigma.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::kron;
    use crate::rng::SplitMix64;
    use crate::spin::pauli;

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

    #[test]
    fn sigma3_and_sigma1_spectra() {
        let p = pauli();
        for m in [&p.sigma3, &p.sigma1] {
            let e = hermitian_eigen(m).unwrap();
            assert!((e.values[0] + 1.0).abs() < 1e-14);
            assert!((e.values[1] - 1.0).abs() < 1e-14);
        }
    }

    /// Cubic-root oracle: eigenvalues of a 3x3 Hermitian matrix are the
    /// roots of its characteristic polynomial, located by bisection.
    fn char_poly_roots_3x3(m: &CMatrix) -> [f64; 3] {
        // det(M - x) = -x^3 + c2 x^2 + c1 x + c0.
        let tr = m.trace().re;
        let m2 = m.mul(m).unwrap();
        let tr2 = m2.trace().re;
        // Determinant by explicit 3x3 expansion.
        let det = (m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]))
            .re;
        // p(x) = x^3 - tr x^2 + e2 x - det with e2 = (tr^2 - tr2)/2.
        let e2 = 0.5 * (tr * tr - tr2);
        let p = |x: f64| ((x - tr) * x + e2) * x - det;
        // Roots are real; bracket them on a Gershgorin interval.
        let bound = (0..3)
            .map(|i| (0..3).map(|j| m[(i, j)].norm()).sum::<f64>())
            .fold(0.0f64, f64::max)
            + 1.0;
        let mut roots = alloc::vec::Vec::new();
        let samples = 20000;
        let mut prev_x = -bound;
        let mut prev_v = p(prev_x);
        for k in 1..=samples {
            let x = -bound + 2.0 * bound * (k as f64) / (samples as f64);
            let v = p(x);
            if prev_v == 0.0 {
                roots.push(prev_x);
            } else if prev_v * v < 0.0 {
                let (mut a, mut b) = (prev_x, x);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if p(a) * p(mid) <= 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            prev_x = x;
            prev_v = v;
        }
        assert_eq!(roots.len(), 3, "expected three simple roots");
        [roots[0], roots[1], roots[2]]
    }

    #[test]
    fn random_3x3_matches_characteristic_roots() {
        let mut rng = SplitMix64::new(0x5eed_0303);
        for _ in 0..5 {
            let m = random_hermitian(3, &mut rng);
            let eig = hermitian_eigen(&m).unwrap();
            let roots = char_poly_roots_3x3(&m);
            for (v, r) in eig.values.iter().zip(roots.iter()) {
                assert!((v - r).abs() < 1e-9, "{v} vs {r}");
            }
        }
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let mut rng = SplitMix64::new(7);
        for &n in &[2usize, 5, 9, 16] {
            let m = random_hermitian(n, &mut rng);
            let eig = hermitian_eigen(&m).unwrap();
            let scale = m.max_abs().max(1.0);
            assert!(eig.reconstruction_defect(&m) <= 1e-10 * scale);
            assert!(eig.orthonormality_defect() <= 1e-10);
            let mut sorted = eig.values.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(sorted, eig.values);
        }
    }

    #[test]
    fn spectrum_invariant_under_random_unitary_conjugation() {
        // U from the Gram-Schmidt of a random matrix.
        let mut rng = SplitMix64::new(42);
        let n = 6;
        let m = random_hermitian(n, &mut rng);
        let raw = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.next_symmetric(), rng.next_symmetric())
        });
        let u = gram_schmidt(&raw);
        let conj = u.adjoint().mul(&m).unwrap().mul(&u).unwrap();
        let e1 = hermitian_eigen(&m).unwrap();
        let e2 = hermitian_eigen(&conj).unwrap();
        for (a, b) in e1.values.iter().zip(e2.values.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    fn gram_schmidt(a: &CMatrix) -> CMatrix {
        let n = a.rows();
        let mut cols: alloc::vec::Vec<alloc::vec::Vec<C64>> = Vec::new();
        for j in 0..n {
            let mut v: alloc::vec::Vec<C64> = (0..n).map(|i| a[(i, j)]).collect();
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(uz, vz)| uz.conj() * vz).sum();
                for (vz, uz) in v.iter_mut().zip(u) {
                    *vz -= proj * uz;
                }
            }
            let norm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
            for z in &mut v {
                *z /= norm;
            }
            cols.push(v);
        }
        CMatrix::from_fn(n, n, |i, j| cols[j][i])
    }

    #[test]
    fn operator_norm_basics() {
        assert!((operator_norm(&CMatrix::identity(2)) - 1.0).abs() < 1e-12);
        let mut r1 = CMatrix::zeros(2, 2);
        r1[(0, 1)] = C64::new(2.0, 0.0);
        assert!((operator_norm(&r1) - 2.0).abs() < 1e-12);
        assert_eq!(operator_norm(&CMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn operator_norm_matches_power_iteration_oracle() {
        let mut rng = SplitMix64::new(99);
        let a = CMatrix::from_fn(4, 4, |_, _| {
            C64::new(rng.next_symmetric(), rng.next_symmetric())
        });
        let direct = operator_norm(&a);
        let oracle = power_iteration_norm(&a, 5000);
        assert!((direct - oracle).abs() < 1e-8, "{direct} vs {oracle}");
    }

    #[test]
    fn operator_norm_of_kron_with_identity() {
        let mut rng = SplitMix64::new(4);
        let a = CMatrix::from_fn(5, 5, |_, _| {
            C64::new(rng.next_symmetric(), rng.next_symmetric())
        });
        let id = CMatrix::identity(4);
        let lhs = operator_norm(&kron(&a, &id));
        let rhs = operator_norm(&a);
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn lanczos_path_agrees_with_jacobi_path() {
        // 80 > 64 forces the Lanczos branch; compare against the dense route.
        let mut rng = SplitMix64::new(11);
        let n = 80;
        let a = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.next_symmetric(), rng.next_symmetric())
        });
        let fast = operator_norm(&a);
        let b = a.adjoint().mul(&a).unwrap();
        let eig = hermitian_eigen(&b).unwrap();
        let slow = math::sqrt(eig.values.last().unwrap().max(0.0));
        assert!(
            (fast - slow).abs() < 1e-9 * slow.max(1.0),
            "{fast} vs {slow}"
        );
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(hermitian_eigen(&m), Err(EigenError::NotHermitian)));
    }

    #[test]
    fn dirichlet_laplacian_closed_form_spectrum() {
        // Analytic oracle: the n-point second-difference matrix has
        // eigenvalues 2 - 2cos(kπ/(n+1)), k = 1..n, with degeneracy-free
        // ordering; also a clustered spectrum exercise for the norm.
        for n in [5usize, 23, 40] {
            let mut m = CMatrix::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = C64::new(2.0, 0.0);
                if i + 1 < n {
                    m[(i, i + 1)] = C64::new(-1.0, 0.0);
                    m[(i + 1, i)] = C64::new(-1.0, 0.0);
                }
            }
            let eig = hermitian_eigen(&m).unwrap();
            for (k, v) in eig.values.iter().enumerate() {
                let expect = 2.0 - 2.0 * math::cos((k + 1) as f64 * math::PI / (n as f64 + 1.0));
                assert!((v - expect).abs() < 1e-11, "n={n} k={k}: {v} vs {expect}");
            }
            let norm = operator_norm(&m);
            let expect = 2.0 - 2.0 * math::cos(n as f64 * math::PI / (n as f64 + 1.0));
            assert!((norm - expect).abs() < 1e-10);
        }
    }
}
