//! The regular representation of a finite base spectral triple crossed
//! by `Z`, its dual circle action, and the harmonic analysis of Fourier
//! coefficients: conditional expectation, the derivation generating the
//! dual action, Fejér approximants, and the Sobolev/Fejér norm bounds.
//!
//! A [`BaseTriple`] is a finite-dimensional triple `(A, C^d, D)` with an
//! automorphism `α` implemented by a unitary. A [`CrossedElement`] is a
//! finitely supported Fourier series `b = Σ_l b_l u^l` multiplied by the
//! twisted convolution `(bc)_l = Σ_m b_m α^m(c_{l-m})`. The regular
//! representation acts on `C^d ⊗ ℓ²(window) ⊗ C²` with
//! `D̂ = D ⊗ σ1 + n ⊗ σ2` blockwise.
//!
//! Truncation conventions: `û` is assembled as the cyclic shift so it
//! stays exactly unitary, and the algebraic identities it enters are
//! checked away from the wrap-around block. Norms of crossed elements
//! are taken from the compressed (non-cyclic) assembly, which bounds the
//! C*-norm from below and converges as the window grows.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::eigen::{hermitian_eigen, operator_norm};
use crate::math;
use crate::matrix::{commutator, kron, CMatrix, C64, ZERO};
use crate::spin::pauli;
use crate::zline::{Layout, TruncatedOperator, Window};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CrossedError {
    #[error("dimension mismatch between element and base triple")]
    DimMismatch,
    #[error("base Dirac operator must be Hermitian")]
    DiracNotHermitian,
    #[error("automorphism data invalid: {0}")]
    BadAutomorphism(&'static str),
    #[error("algebra basis invalid: {0}")]
    BadBasis(&'static str),
    #[error("window {0} too small for support {1} (need window >= 4x)")]
    WindowTooSmall(i64, i64),
}

/// A finite-dimensional spectral triple with an automorphism of its
/// represented algebra.
#[derive(Debug, Clone)]
pub struct BaseTriple {
    dim: usize,
    algebra_basis: Vec<CMatrix>,
    dirac: CMatrix,
    alpha_unitary: CMatrix,
    /// Coefficients of `α(basis_j)` in the basis, column j.
    alpha_coeffs: CMatrix,
}

impl BaseTriple {
    /// Build and validate. `alpha_unitary` must implement an automorphism
    /// that maps the linear span of `algebra_basis` onto itself.
    pub fn new(
        algebra_basis: Vec<CMatrix>,
        dirac: CMatrix,
        alpha_unitary: CMatrix,
    ) -> Result<Self, CrossedError> {
        if algebra_basis.is_empty() {
            return Err(CrossedError::BadBasis("empty basis"));
        }
        let dim = dirac.rows();
        if !dirac.is_hermitian(1e-12 * dirac.max_abs().max(1.0)) {
            return Err(CrossedError::DiracNotHermitian);
        }
        if alpha_unitary.rows() != dim || alpha_unitary.cols() != dim {
            return Err(CrossedError::BadAutomorphism("unitary dimension mismatch"));
        }
        let uu = alpha_unitary.adjoint().mul(&alpha_unitary).expect("shape");
        if uu.sub(&CMatrix::identity(dim)).expect("shape").max_abs() > 1e-10 {
            return Err(CrossedError::BadAutomorphism(
                "implementing operator is not unitary",
            ));
        }
        for b in &algebra_basis {
            if b.rows() != dim || b.cols() != dim {
                return Err(CrossedError::BadBasis("basis dimension mismatch"));
            }
        }
        let triple = Self {
            dim,
            algebra_basis,
            dirac,
            alpha_unitary,
            alpha_coeffs: CMatrix::zeros(0, 0),
        };
        // Identity and adjoints must lie in the span.
        if triple.expand(&CMatrix::identity(dim)).is_none() {
            return Err(CrossedError::BadBasis("identity not in the basis span"));
        }
        for b in &triple.algebra_basis {
            if triple.expand(&b.adjoint()).is_none() {
                return Err(CrossedError::BadBasis("basis not closed under adjoints"));
            }
        }
        // α must map the span onto itself; record its coefficient matrix.
        let k = triple.algebra_basis.len();
        let mut coeffs = CMatrix::zeros(k, k);
        for (j, b) in triple.algebra_basis.iter().enumerate() {
            let image = triple.alpha(b, 1);
            let Some(c) = triple.expand(&image) else {
                return Err(CrossedError::BadAutomorphism("alpha leaves the basis span"));
            };
            for i in 0..k {
                coeffs[(i, j)] = c[i];
            }
        }
        Ok(Self {
            alpha_coeffs: coeffs,
            ..triple
        })
    }

    /// Diagonal algebra on `C^d` with `α` the permutation `i ↦ perm[i]`.
    pub fn diagonal_permutation(perm: &[usize], dirac: CMatrix) -> Result<Self, CrossedError> {
        let dim = perm.len();
        if dirac.rows() != dim {
            return Err(CrossedError::DimMismatch);
        }
        let mut seen = alloc::vec![false; dim];
        for &p in perm {
            if p >= dim || seen[p] {
                return Err(CrossedError::BadAutomorphism("not a permutation"));
            }
            seen[p] = true;
        }
        let basis: Vec<CMatrix> = (0..dim)
            .map(|i| {
                let mut e = CMatrix::zeros(dim, dim);
                e[(i, i)] = C64::new(1.0, 0.0);
                e
            })
            .collect();
        let mut u = CMatrix::zeros(dim, dim);
        for (i, &p) in perm.iter().enumerate() {
            u[(p, i)] = C64::new(1.0, 0.0);
        }
        Self::new(basis, dirac, u)
    }

    /// Full matrix algebra `M_d(C)` with `α = Ad(u)`.
    pub fn matrix_conjugation(u: CMatrix, dirac: CMatrix) -> Result<Self, CrossedError> {
        let dim = u.rows();
        let mut basis = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut e = CMatrix::zeros(dim, dim);
                e[(i, j)] = C64::new(1.0, 0.0);
                basis.push(e);
            }
        }
        Self::new(basis, dirac, u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dirac(&self) -> &CMatrix {
        &self.dirac
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.algebra_basis
    }

    pub fn alpha_coefficients(&self) -> &CMatrix {
        &self.alpha_coeffs
    }

    /// `α^k(a) = u^k a u^{-k}`.
    pub fn alpha(&self, a: &CMatrix, k: i64) -> CMatrix {
        if k == 0 {
            return a.clone();
        }
        let (mut acc, steps) = if k > 0 {
            (a.clone(), k)
        } else {
            (a.clone(), -k)
        };
        let u = if k > 0 {
            self.alpha_unitary.clone()
        } else {
            self.alpha_unitary.adjoint()
        };
        let ustar = u.adjoint();
        for _ in 0..steps {
            acc = u.mul(&acc).expect("shape").mul(&ustar).expect("shape");
        }
        acc
    }

    /// Coordinates of `a` in the algebra basis, if the least-squares
    /// expansion reconstructs `a` to `1e-10`.
    pub fn expand(&self, a: &CMatrix) -> Option<Vec<C64>> {
        let k = self.algebra_basis.len();
        let d2 = self.dim * self.dim;
        // Gram system G c = B* vec(a); for a dependent basis, fall back on
        // a ridge-regularised solve, which still certifies span membership
        // through the residual.
        let mut gram = CMatrix::zeros(k, k);
        let mut rhs = alloc::vec![ZERO; k];
        for i in 0..k {
            for j in 0..k {
                let mut acc = ZERO;
                for t in 0..d2 {
                    let bi = self.algebra_basis[i].data()[t];
                    let bj = self.algebra_basis[j].data()[t];
                    acc += bi.conj() * bj;
                }
                gram[(i, j)] = acc;
            }
            let mut acc = ZERO;
            for t in 0..d2 {
                acc += self.algebra_basis[i].data()[t].conj() * a.data()[t];
            }
            rhs[i] = acc;
        }
        let mut ridge = gram.clone();
        for i in 0..k {
            ridge[(i, i)] += C64::new(1e-12, 0.0);
        }
        let inv = ridge.invert().ok()?;
        let coords: Vec<C64> = (0..k)
            .map(|i| (0..k).map(|j| inv[(i, j)] * rhs[j]).sum())
            .collect();
        // residual check
        let mut recon = CMatrix::zeros(self.dim, self.dim);
        for (c, b) in coords.iter().zip(&self.algebra_basis) {
            recon = recon.add(&b.scale(*c)).expect("shape");
        }
        if recon.sub(a).expect("shape").max_abs() <= 1e-8 * a.max_abs().max(1.0) {
            Some(coords)
        } else {
            None
        }
    }

    /// Spot-check that `α` is a *-homomorphism on sampled basis pairs.
    pub fn automorphism_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in self.algebra_basis.iter().take(4) {
            for b in self.algebra_basis.iter().take(4) {
                let lhs = self.alpha(&a.mul(b).expect("shape"), 1);
                let rhs = self.alpha(a, 1).mul(&self.alpha(b, 1)).expect("shape");
                worst = worst.max(lhs.sub(&rhs).expect("shape").max_abs());
            }
            let star = self.alpha(&a.adjoint(), 1);
            let star2 = self.alpha(a, 1).adjoint();
            worst = worst.max(star.sub(&star2).expect("shape").max_abs());
        }
        worst
    }
}

/// Finitely supported Fourier series `b = Σ_l b_l u^l` over a base
/// algebra of `dim x dim` matrices.
#[derive(Debug, Clone)]
pub struct CrossedElement {
    dim: usize,
    coeffs: BTreeMap<i64, CMatrix>,
}

impl CrossedElement {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn single(l: i64, a: CMatrix) -> Self {
        let dim = a.rows();
        let mut coeffs = BTreeMap::new();
        if a.max_abs() > 0.0 {
            coeffs.insert(l, a);
        }
        Self { dim, coeffs }
    }

    pub fn from_terms(dim: usize, terms: Vec<(i64, CMatrix)>) -> Result<Self, CrossedError> {
        let mut coeffs = BTreeMap::new();
        for (l, a) in terms {
            if a.rows() != dim || a.cols() != dim {
                return Err(CrossedError::DimMismatch);
            }
            if a.max_abs() > 0.0 {
                coeffs.insert(l, a);
            }
        }
        Ok(Self { dim, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn max_mode(&self) -> i64 {
        self.coeffs.keys().map(|l| l.abs()).max().unwrap_or(0)
    }

    /// Fourier coefficient `b_l = E(b u^{-l})`; zero when absent.
    pub fn fourier_coefficient(&self, l: i64) -> CMatrix {
        self.coeffs
            .get(&l)
            .cloned()
            .unwrap_or_else(|| CMatrix::zeros(self.dim, self.dim))
    }

    /// Canonical conditional expectation `E(b) = b_0`.
    pub fn conditional_expectation(&self) -> CMatrix {
        self.fourier_coefficient(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self, CrossedError> {
        if self.dim != other.dim {
            return Err(CrossedError::DimMismatch);
        }
        let mut out = self.clone();
        for (&l, a) in &other.coeffs {
            let entry = out
                .coeffs
                .entry(l)
                .or_insert_with(|| CMatrix::zeros(self.dim, self.dim));
            *entry = entry.add(a).expect("shape");
        }
        out.coeffs.retain(|_, a| a.max_abs() > 0.0);
        Ok(out)
    }

    pub fn scale(&self, z: C64) -> Self {
        let coeffs = self.coeffs.iter().map(|(&l, a)| (l, a.scale(z))).collect();
        Self {
            dim: self.dim,
            coeffs,
        }
    }

    /// Twisted convolution `(bc)_l = Σ_m b_m α^m(c_{l-m})`.
    pub fn mul(&self, other: &Self, base: &BaseTriple) -> Result<Self, CrossedError> {
        if self.dim != other.dim || self.dim != base.dim() {
            return Err(CrossedError::DimMismatch);
        }
        let mut out: BTreeMap<i64, CMatrix> = BTreeMap::new();
        for (&m, bm) in &self.coeffs {
            for (&j, cj) in &other.coeffs {
                let l = m + j;
                let term = bm.mul(&base.alpha(cj, m)).expect("shape");
                let entry = out
                    .entry(l)
                    .or_insert_with(|| CMatrix::zeros(self.dim, self.dim));
                *entry = entry.add(&term).expect("shape");
            }
        }
        out.retain(|_, a| a.max_abs() > 0.0);
        Ok(Self {
            dim: self.dim,
            coeffs: out,
        })
    }

    /// Adjoint: `(b*)_l = α^l(b_{-l}*)`.
    pub fn star(&self, base: &BaseTriple) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&l, a)| (-l, base.alpha(&a.adjoint(), -l)))
            .collect();
        Self {
            dim: self.dim,
            coeffs,
        }
    }

    /// Generator of the dual action: `∂b = Σ il b_l u^l`.
    pub fn derivation(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&l, _)| l != 0)
            .map(|(&l, a)| (l, a.scale(C64::new(0.0, l as f64))))
            .collect();
        Self {
            dim: self.dim,
            coeffs,
        }
    }

    /// Fejér approximant `b^(N) = Σ_{|l|<N} (1 - |l|/N) b_l u^l`.
    pub fn fejer_approximant(&self, order: usize) -> Self {
        let n = order as i64;
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&l, _)| l.abs() < n)
            .map(|(&l, a)| (l, a.scale(C64::new(1.0 - l.abs() as f64 / n as f64, 0.0))))
            .collect();
        Self {
            dim: self.dim,
            coeffs,
        }
    }

    /// Upper bound `Σ_l ‖b_l‖` on the C*-norm.
    pub fn norm_upper_bound(&self) -> f64 {
        self.coeffs.values().map(operator_norm).sum()
    }

    /// Upper bound `Σ_l |l| ‖b_l‖ ≥ ‖∂b‖`.
    pub fn derivation_norm_upper_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(&l, a)| l.abs() as f64 * operator_norm(a))
            .sum()
    }
}

/// The regular representation of `(A, α)` on `C^d ⊗ ℓ²(window) ⊗ C²`.
///
/// Blocks are computed on demand; powers of the implementing unitary
/// are cheap at desk scale, so nothing is cached.
#[derive(Debug, Clone)]
pub struct RegularRep {
    base: BaseTriple,
    window: Window,
    layout: Layout,
}

impl RegularRep {
    pub fn new(base: BaseTriple, window: Window) -> Self {
        let layout = Layout {
            window,
            ranges: 1,
            base_dim: base.dim(),
            spin_dim: 2,
        };
        Self {
            base,
            window,
            layout,
        }
    }

    pub fn base(&self) -> &BaseTriple {
        &self.base
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    fn block_set<F: Fn(i64) -> CMatrix>(
        &self,
        f: F,
        spin: &CMatrix,
        out: &mut CMatrix,
        col_shift: i64,
    ) {
        // Adds blocks out[(n, ·), (n - col_shift, ·)] += f(n) ⊗ spin.
        let d = self.base.dim();
        for n in self.window.iter() {
            let m = n - col_shift;
            if !self.window.contains(m) {
                continue;
            }
            let block = f(n);
            for h1 in 0..d {
                for h2 in 0..d {
                    let z = block[(h1, h2)];
                    if z == ZERO {
                        continue;
                    }
                    for s1 in 0..2 {
                        for s2 in 0..2 {
                            let sp = spin[(s1, s2)];
                            if sp == ZERO {
                                continue;
                            }
                            let r = self.layout.index(n, 0, h1, s1);
                            let c = self.layout.index(m, 0, h2, s2);
                            out[(r, c)] += z * sp;
                        }
                    }
                }
            }
        }
    }

    /// `D̂ = D ⊗ σ1 + n ⊗ σ2`, block-diagonal over the window.
    pub fn dhat(&self) -> TruncatedOperator {
        let p = pauli();
        let mut m = CMatrix::zeros(self.layout.dim(), self.layout.dim());
        self.block_set(|_| self.base.dirac.clone(), &p.sigma1, &mut m, 0);
        let d = self.base.dim();
        self.block_set(
            |n| CMatrix::identity(d).scale(C64::new(n as f64, 0.0)),
            &p.sigma2,
            &mut m,
            0,
        );
        TruncatedOperator {
            matrix: m,
            layout: self.layout,
        }
    }

    /// `π̂(a)`: block `n` carries `α^{-n}(a) ⊗ 1`.
    pub fn pi_hat(&self, a: &CMatrix) -> CMatrix {
        let mut m = CMatrix::zeros(self.layout.dim(), self.layout.dim());
        self.block_set(|n| self.base.alpha(a, -n), &CMatrix::identity(2), &mut m, 0);
        m
    }

    /// Compressed representation of a crossed element: blocks
    /// `(n, n-l) = α^{-n}(b_l) ⊗ 1`, hops leaving the window dropped.
    pub fn represent(&self, b: &CrossedElement) -> CMatrix {
        let mut m = CMatrix::zeros(self.layout.dim(), self.layout.dim());
        let id2 = CMatrix::identity(2);
        for (&l, bl) in &b.coeffs {
            self.block_set(|n| self.base.alpha(bl, -n), &id2, &mut m, l);
        }
        m
    }

    /// Operator norm of the compressed representation: a lower bound on
    /// the crossed-product C*-norm that converges as the window grows.
    pub fn norm(&self, b: &CrossedElement) -> f64 {
        operator_norm(&self.represent(b))
    }

    /// The cyclic shift implementing `α`: exactly unitary; the
    /// wrap-around column is the price of unitarity at finite volume.
    pub fn u_hat(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.layout.dim(), self.layout.dim());
        let d = self.base.dim();
        for n in self.window.iter() {
            let mcol = if n == self.window.lo() {
                self.window.hi()
            } else {
                n - 1
            };
            for h in 0..d {
                for s in 0..2 {
                    m[(
                        self.layout.index(n, 0, h, s),
                        self.layout.index(mcol, 0, h, s),
                    )] = C64::new(1.0, 0.0);
                }
            }
        }
        m
    }

    /// Dual-action unitary `(v_k f)_n = e^{ink} f_n`.
    pub fn v_k(&self, k: f64) -> CMatrix {
        let mut m = CMatrix::zeros(self.layout.dim(), self.layout.dim());
        let d = self.base.dim();
        for n in self.window.iter() {
            let phase = C64::new(math::cos(n as f64 * k), math::sin(n as f64 * k));
            for h in 0..d {
                for s in 0..2 {
                    let i = self.layout.index(n, 0, h, s);
                    m[(i, i)] = phase;
                }
            }
        }
        m
    }

    /// Max entry of `M` over the blocks with `n` in `[lo_keep, hi_keep]`
    /// on both row and column index.
    pub fn interior_max_abs(&self, m: &CMatrix, lo_keep: i64, hi_keep: i64) -> f64 {
        let d = self.base.dim();
        let mut worst = 0.0f64;
        for n in lo_keep..=hi_keep {
            for np in lo_keep..=hi_keep {
                for h1 in 0..d {
                    for h2 in 0..d {
                        for s1 in 0..2 {
                            for s2 in 0..2 {
                                let v = m[(
                                    self.layout.index(n, 0, h1, s1),
                                    self.layout.index(np, 0, h2, s2),
                                )];
                                worst = worst.max(v.norm());
                            }
                        }
                    }
                }
            }
        }
        worst
    }
}

/// Assemble `D̂` for a base triple over a window.
pub fn assemble_dhat(base: &BaseTriple, window: Window) -> TruncatedOperator {
    RegularRep::new(base.clone(), window).dhat()
}

/// Multiset comparison of the computed spectrum of `D̂` against the
/// closed form `{±sqrt(λ_k² + n²)}`; returns the worst relative defect.
pub fn dhat_spectrum_defect(base: &BaseTriple, window: Window) -> f64 {
    let rep = RegularRep::new(base.clone(), window);
    let dhat = rep.dhat();
    let eig = hermitian_eigen(&dhat.matrix).expect("dhat Hermitian");
    let base_eig = hermitian_eigen(&base.dirac).expect("base Dirac Hermitian");
    let mut formula: Vec<f64> = Vec::new();
    for n in window.iter() {
        for &lk in &base_eig.values {
            let mag = math::hypot(lk, n as f64);
            formula.push(mag);
            formula.push(-mag);
        }
    }
    formula.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut worst = 0.0f64;
    for (computed, expected) in eig.values.iter().zip(&formula) {
        worst = worst.max(math::abs(computed - expected) / expected.abs().max(1.0));
    }
    worst
}

/// Both sides of the commutator norm identity
/// `‖[D̂, π̂(a)]‖ = max_n ‖[D, α^{-n}(a)]‖`.
pub fn commutator_dhat_norm_identity(base: &BaseTriple, window: Window, a: &CMatrix) -> (f64, f64) {
    let rep = RegularRep::new(base.clone(), window);
    let dhat = rep.dhat();
    let pia = rep.pi_hat(a);
    let lhs = operator_norm(&commutator(&dhat.matrix, &pia).expect("shape"));
    let mut rhs = 0.0f64;
    for n in window.iter() {
        let block = commutator(&base.dirac, &base.alpha(a, -n)).expect("shape");
        rhs = rhs.max(operator_norm(&block));
    }
    (lhs, rhs)
}

/// Defect of `û^{-1} [D̂, û] = 1 ⊗ 1 ⊗ σ2` away from the cyclic seam
/// (all blocks except `n = hi`). Zero in exact arithmetic.
pub fn uhat_conjugation_defect(base: &BaseTriple, window: Window) -> f64 {
    let rep = RegularRep::new(base.clone(), window);
    let dhat = rep.dhat().matrix;
    let u = rep.u_hat();
    let comm = commutator(&dhat, &u).expect("shape");
    let lhs = u.adjoint().mul(&comm).expect("shape");
    let p = pauli();
    let sigma2_full = kron(&CMatrix::identity(window.len() * base.dim()), &p.sigma2);
    let diff = lhs.sub(&sigma2_full).expect("shape");
    rep.interior_max_abs(&diff, window.lo(), window.hi() - 1)
}

/// Defect of `û π̂(a) û^{-1} = π̂(α(a))` away from the seam block
/// `n = lo`.
pub fn uhat_covariance_defect(base: &BaseTriple, window: Window, a: &CMatrix) -> f64 {
    let rep = RegularRep::new(base.clone(), window);
    let u = rep.u_hat();
    let lhs = u
        .mul(&rep.pi_hat(a))
        .expect("shape")
        .mul(&u.adjoint())
        .expect("shape");
    let rhs = rep.pi_hat(&base.alpha(a, 1));
    let diff = lhs.sub(&rhs).expect("shape");
    rep.interior_max_abs(&diff, window.lo() + 1, window.hi())
}

/// Dual-action checks for `v_k`: returns the worst defect of
/// (i) `v_k π̂(a) v_k^{-1} = π̂(a)` over the basis, (ii)
/// `v_k û v_k^{-1} = e^{ik} û` away from the seam, (iii)
/// `v_k D̂ v_k^{-1} = D̂`.
///
/// (i) and (iii) are checked as commutators `[v_k, ·]`, which vanish
/// entrywise in exact floating point since `v_k` is diagonal and both
/// operators are block-diagonal over the same blocks.
pub fn dual_action_defects(base: &BaseTriple, window: Window, k: f64) -> (f64, f64, f64) {
    let rep = RegularRep::new(base.clone(), window);
    let v = rep.v_k(k);
    let mut fixes_algebra = 0.0f64;
    for a in base.basis() {
        let pia = rep.pi_hat(a);
        let c = commutator(&v, &pia).expect("shape");
        fixes_algebra = fixes_algebra.max(c.max_abs());
    }
    let u = rep.u_hat();
    let vinv = rep.v_k(-k);
    let lhs = v.mul(&u).expect("shape").mul(&vinv).expect("shape");
    let phase = C64::new(math::cos(k), math::sin(k));
    let diff = lhs.sub(&u.scale(phase)).expect("shape");
    let scales_u = rep.interior_max_abs(&diff, window.lo() + 1, window.hi());
    let dhat = rep.dhat().matrix;
    let fixes_dirac = commutator(&v, &dhat).expect("shape").max_abs();
    (fixes_algebra, scales_u, fixes_dirac)
}

/// Fejér kernel in closed sin² form, with the removable singularity at
/// `k ∈ 2πZ` patched by its limit `N`.
pub fn fejer_kernel(order: usize, k: f64) -> f64 {
    let n = order as f64;
    let s = math::sin(k / 2.0);
    if s * s < 1e-24 {
        return n;
    }
    let t = math::sin(n * k / 2.0);
    (t * t) / (n * s * s)
}

/// The same kernel as its cosine sum `Σ_{|l|<N} (1 - |l|/N) e^{ilk}`.
pub fn fejer_kernel_cosine_form(order: usize, k: f64) -> f64 {
    let n = order as f64;
    let mut acc = 1.0;
    for l in 1..order {
        acc += 2.0 * (1.0 - l as f64 / n) * math::cos(l as f64 * k);
    }
    acc
}

#[derive(Debug, Clone)]
pub struct FejerReport {
    pub order: usize,
    /// Minimum over the evaluation grid (nonnegative kernel).
    pub min_value: f64,
    /// Trapezoid mean over `[-π, π]` against `dk/2π` (should be 1).
    pub mean: f64,
    /// Exact mass of `{|k| ≥ π/√N}` (bounded by `1/√N`).
    pub tail_mass: f64,
    /// Largest discrepancy between the sin² and cosine forms on the grid.
    pub form_defect: f64,
}

pub fn fejer_report(order: usize, grid: usize) -> FejerReport {
    let mut min_value = f64::INFINITY;
    let mut form_defect = 0.0f64;
    let mut mean = 0.0f64;
    for i in 0..grid {
        let k = -math::PI + 2.0 * math::PI * (i as f64) / (grid as f64);
        let f = fejer_kernel(order, k);
        min_value = min_value.min(f);
        form_defect = form_defect.max(math::abs(f - fejer_kernel_cosine_form(order, k)));
        mean += f;
    }
    // Periodic trapezoid rule over a full period: the endpoint pair
    // collapses, so the plain average against dk/2π is exact for
    // trigonometric polynomials of degree < grid.
    mean /= grid as f64;
    // Exact tail mass via termwise integration of the cosine sum.
    let a = math::PI / math::sqrt(order as f64);
    let mut inner = a / math::PI;
    for l in 1..order {
        inner +=
            (2.0 / math::PI) * (1.0 - l as f64 / order as f64) * math::sin(l as f64 * a) / l as f64;
    }
    FejerReport {
        order,
        min_value,
        mean,
        tail_mass: 1.0 - inner,
        form_defect,
    }
}

/// Slack report for the appendix estimates on one crossed element.
///
/// Left-hand norms come from the compressed assembly (a lower bound on
/// the C*-norm), right-hand sides from exact base-algebra computations
/// or the coefficient upper bounds `Σ‖b_l‖`, `Σ|l|‖b_l‖`; every reported
/// slack is therefore nonnegative whenever the true inequality holds.
#[derive(Debug, Clone)]
pub struct AppendixReport {
    /// `(π²/3) ‖E(∂b ∂b*)‖ - ‖b - E(b)‖²`.
    pub sobolev_slack: f64,
    /// Per Fejér order: `π/√N ‖∂b‖ + 2/√N ‖b‖ - ‖b - b^(N)‖`.
    pub fejer_slacks: Vec<(usize, f64)>,
    /// `π/√3 - ‖bk‖` for the B(K)-projected element.
    pub bk_norm_slack: f64,
    /// Per order: `2.2π/√N - ‖bk - bk^(N)‖`.
    pub bk_fejer_slacks: Vec<(usize, f64)>,
    /// Fejér approximation errors of `bk` in order of increasing N
    /// (nonincreasing sequence expected).
    pub bk_fejer_errors: Vec<(usize, f64)>,
    /// `‖b‖` recomputed at twice the window minus at the window.
    pub window_doubling_delta: f64,
}

/// Verify the Sobolev and Fejér estimates on `b` at the given window,
/// and the `B(K)` membership bounds on its projection into `B(K)` form
/// (`E = 0`, `‖b_l‖ ≤ 1/|l|`, `‖∂b‖ ≤ 1`).
pub fn verify_appendix_bounds(
    b: &CrossedElement,
    base: &BaseTriple,
    window: Window,
    fejer_orders: &[usize],
) -> Result<AppendixReport, CrossedError> {
    let support = b.max_mode();
    if window.half() < 4 * support {
        return Err(CrossedError::WindowTooSmall(window.half(), support));
    }
    let rep = RegularRep::new(base.clone(), window);

    // Sobolev: ‖b - E(b)‖² ≤ (π²/3) ‖Σ l² b_l b_l*‖.
    let centered = b.add(&CrossedElement::single(
        0,
        b.conditional_expectation().scale(C64::new(-1.0, 0.0)),
    ))?;
    let lhs = rep.norm(&centered);
    let mut second_moment = CMatrix::zeros(base.dim(), base.dim());
    for l in b.support() {
        if l == 0 {
            continue;
        }
        let bl = b.fourier_coefficient(l);
        second_moment = second_moment
            .add(
                &bl.mul(&bl.adjoint())
                    .expect("shape")
                    .scale(C64::new((l * l) as f64, 0.0)),
            )
            .expect("shape");
    }
    let sobolev_rhs = math::PI * math::PI / 3.0 * operator_norm(&second_moment);
    let sobolev_slack = sobolev_rhs - lhs * lhs;

    // Fejér approximation bound with coefficient upper bounds on the RHS.
    let ub_b = b.norm_upper_bound();
    let ub_db = b.derivation_norm_upper_bound();
    let mut fejer_slacks = Vec::new();
    for &order in fejer_orders {
        let diff = b.add(&b.fejer_approximant(order).scale(C64::new(-1.0, 0.0)))?;
        let err = rep.norm(&diff);
        let bound =
            math::PI / math::sqrt(order as f64) * ub_db + 2.0 / math::sqrt(order as f64) * ub_b;
        fejer_slacks.push((order, bound - err));
    }

    // Project into B(K): drop the zero mode, cap ‖b_l‖ at 1/|l|, then
    // scale so Σ|l|‖b_l‖ ≤ 1, which dominates the true ‖∂b‖.
    let mut terms: Vec<(i64, CMatrix)> = Vec::new();
    for l in b.support() {
        if l == 0 {
            continue;
        }
        let bl = b.fourier_coefficient(l);
        let norm = operator_norm(&bl);
        if norm == 0.0 {
            continue;
        }
        let cap = 1.0 / l.abs() as f64;
        let factor = if norm > cap { cap / norm } else { 1.0 };
        terms.push((l, bl.scale(C64::new(factor, 0.0))));
    }
    let mut bk = CrossedElement::from_terms(base.dim(), terms)?;
    let s = bk.derivation_norm_upper_bound();
    if s > 1.0 {
        bk = bk.scale(C64::new(1.0 / s, 0.0));
    }
    let bk_norm = rep.norm(&bk);
    let bk_norm_slack = math::PI / math::sqrt(3.0) - bk_norm;
    let mut bk_fejer_slacks = Vec::new();
    let mut bk_fejer_errors = Vec::new();
    for &order in fejer_orders {
        let diff = bk.add(&bk.fejer_approximant(order).scale(C64::new(-1.0, 0.0)))?;
        let err = rep.norm(&diff);
        bk_fejer_errors.push((order, err));
        bk_fejer_slacks.push((order, 2.2 * math::PI / math::sqrt(order as f64) - err));
    }

    // Truncation quality: how much the norm moves when the window doubles.
    let big = Window::new(2 * window.half()).expect("window");
    let rep_big = RegularRep::new(base.clone(), big);
    let window_doubling_delta = rep_big.norm(b) - rep.norm(b);

    Ok(AppendixReport {
        sobolev_slack,
        fejer_slacks,
        bk_norm_slack,
        bk_fejer_slacks,
        bk_fejer_errors,
        window_doubling_delta,
    })
}

/// Dimension of the numerical kernel of `x ↦ [D̂, x]` over the span of
/// the represented monomials `π̂(a_i û^l)`, `|l| ≤ lmax`: the count of
/// singular values below `1e-8` relative to the largest column. A
/// trivial commutant gives exactly 1 (the multiples of the identity).
pub fn dhat_commutant_dimension(base: &BaseTriple, window: Window, lmax: i64) -> usize {
    let rep = RegularRep::new(base.clone(), window);
    let dhat = rep.dhat().matrix;
    let mut columns: Vec<Vec<C64>> = Vec::new();
    for l in -lmax..=lmax {
        for a in base.basis() {
            let elem = CrossedElement::single(l, a.clone());
            let m = rep.represent(&elem);
            let c = commutator(&dhat, &m).expect("shape");
            columns.push(c.data().to_vec());
        }
    }
    let sigma = crate::eigen::column_singular_values(columns);
    let top = sigma.last().copied().unwrap_or(0.0).max(1.0);
    sigma.iter().filter(|&&s| s < 1e-8 * top).count()
}

/// Finite witness of the metric equivalence between the base distance
/// and the crossed-product distance: seminorm ratios bound the distance
/// ratio on sampled states.
#[derive(Debug, Clone)]
pub struct MetricEquivalence {
    /// `K = max sn_Y(a) / sn_X(a)` over the sample.
    pub k_ratio: f64,
    /// Worst violation of `d_Y ≤ d_X ≤ K d_Y` on candidate-restricted
    /// distances over the sampled state pairs (nonpositive when it holds).
    pub violation: f64,
}

/// For commutative (diagonal) base triples: sample self-adjoint diagonal
/// elements, measure `sn_X(a) = ‖[D, a]‖` and the orbit seminorm
/// `sn_Y(a) = max_{|n| ≤ orbit} ‖[D, α^n(a)]‖`, and verify the
/// equivalence of the induced distances on sampled probability pairs.
pub fn metric_equivalence_witness(
    base: &BaseTriple,
    orbit: i64,
    elements: &[Vec<f64>],
    state_pairs: &[(Vec<f64>, Vec<f64>)],
) -> MetricEquivalence {
    let d = base.dim();
    let sn = |a: &CMatrix| operator_norm(&commutator(&base.dirac, a).expect("shape"));
    let mut k_ratio = 1.0f64;
    let mut data: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    for a in elements {
        let mut m = CMatrix::zeros(d, d);
        for (i, &v) in a.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        let sx = sn(&m);
        if sx < 1e-12 {
            continue;
        }
        let mut sy = 0.0f64;
        for n in -orbit..=orbit {
            sy = sy.max(sn(&base.alpha(&m, n)));
        }
        k_ratio = k_ratio.max(sy / sx);
        data.push((a.clone(), sx, sy));
    }
    let mut violation = f64::NEG_INFINITY;
    for (rho, omega) in state_pairs {
        let pair = |a: &[f64]| -> f64 {
            a.iter()
                .enumerate()
                .map(|(i, &v)| (rho[i] - omega[i]) * v)
                .sum::<f64>()
        };
        let mut dx = 0.0f64;
        let mut dy = 0.0f64;
        for (a, sx, sy) in &data {
            let p = math::abs(pair(a));
            dx = dx.max(p / sx);
            dy = dy.max(p / sy);
        }
        // d_Y ≤ d_X and d_X ≤ K d_Y on the candidate-restricted metrics.
        violation = violation.max(dy - dx);
        violation = violation.max(dx - k_ratio * dy);
    }
    MetricEquivalence { k_ratio, violation }
}
