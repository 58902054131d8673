//! Dense complex matrices in row-major order.
//!
//! Every operator in this crate — Dirac truncations, represented algebra
//! elements, couplings of spin factors — lives in a [`CMatrix`]. The type
//! rejects non-finite entries at construction so that downstream
//! eigensolves never see NaN.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;

pub type C64 = Complex<f64>;

pub const ONE: C64 = Complex::new(1.0, 0.0);
pub const ZERO: C64 = Complex::new(0.0, 0.0);
pub const I: C64 = Complex::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("entry count {got} does not match {rows}x{cols}")]
    BadEntryCount {
        rows: usize,
        cols: usize,
        got: usize,
    },
    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("bad tensor layout: {0}")]
    BadLayout(&'static str),
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::BadEntryCount {
                rows,
                cols,
                got: data.len(),
            });
        }
        for (k, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(MatrixError::NonFinite(k / cols, k % cols));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from rows of real entries; convenience for small constants.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| Complex::new(rows[i][j], 0.0))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        // i-k-j order keeps the inner loop contiguous in both operands.
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row_b = &other.data[k * other.cols..(k + 1) * other.cols];
                let row_o = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for j in 0..other.cols {
                    row_o[j] += a * row_b[j];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, z: C64) -> Self {
        let data = self.data.iter().map(|&a| a * z).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        crate::math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_defect() <= tol
    }

    /// `A*v` for a dense vector.
    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.cols);
        let mut out = vec![ZERO; self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut acc = ZERO;
            for (a, x) in row.iter().zip(v) {
                acc += a * x;
            }
            out[i] = acc;
        }
        out
    }

    /// `A^* v`, computed without materialising the adjoint.
    pub fn adjoint_matvec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![ZERO; self.cols];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let x = v[i];
            if x == ZERO {
                continue;
            }
            for (j, a) in row.iter().enumerate() {
                out[j] += a.conj() * x;
            }
        }
        out
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl CMatrix {
    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn invert(&self) -> Result<Self, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[(col, col)].norm();
            for r in (col + 1)..n {
                let v = a[(r, col)].norm();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best < 1e-300 {
                return Err(MatrixError::BadLayout("singular matrix"));
            }
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a[(col, j)], a[(pivot, j)]);
                    a[(col, j)] = y;
                    a[(pivot, j)] = x;
                    let (x, y) = (inv[(col, j)], inv[(pivot, j)]);
                    inv[(col, j)] = y;
                    inv[(pivot, j)] = x;
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == ZERO {
                    continue;
                }
                for j in 0..n {
                    let acj = a[(col, j)];
                    let icj = inv[(col, j)];
                    a[(r, j)] -= f * acj;
                    inv[(r, j)] -= f * icj;
                }
            }
        }
        Ok(inv)
    }
}

/// `AB - BA`, exact arithmetic on the entries.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, MatrixError> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(MatrixError::ShapeMismatch(
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
        ));
    }
    a.mul(b)?.sub(&b.mul(a)?)
}

/// `{A, B} = AB + BA`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, MatrixError> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(MatrixError::ShapeMismatch(
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
        ));
    }
    a.mul(b)?.add(&b.mul(a)?)
}

/// Kronecker product; `(A ⊗ B)(C ⊗ D) = AC ⊗ BD`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let z = a[(i, j)];
            if z == ZERO {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = z * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Decompose `A` on `H ⊗ C^s` as `Σ_i M_i ⊗ e_i` for a trace-orthogonal
/// spin basis `e_i` and return the components `M_i`.
///
/// The basis must satisfy `Tr(e_i^* e_j) = c δ_ij` with a common `c > 0`;
/// if it spans all of `M_s(C)` the decomposition reconstructs `A` exactly.
pub fn partial_trace_spin(a: &CMatrix, basis: &[CMatrix]) -> Result<Vec<CMatrix>, MatrixError> {
    if basis.is_empty() {
        return Err(MatrixError::BadLayout("empty spin basis"));
    }
    let s = basis[0].rows();
    for e in basis {
        if e.rows() != s || e.cols() != s {
            return Err(MatrixError::BadLayout("spin basis dimensions differ"));
        }
    }
    if !a.is_square() || a.rows() % s != 0 {
        return Err(MatrixError::BadLayout(
            "matrix dimension not divisible by spin dimension",
        ));
    }
    // Trace-orthogonality of the basis, checked exhaustively.
    let c = basis[0].adjoint().mul(&basis[0])?.trace().re;
    if c <= 0.0 {
        return Err(MatrixError::BadLayout(
            "spin basis element with zero trace norm",
        ));
    }
    for (i, ei) in basis.iter().enumerate() {
        for (j, ej) in basis.iter().enumerate() {
            let t = ei.adjoint().mul(ej)?.trace();
            let expect = if i == j { c } else { 0.0 };
            if (t - Complex::new(expect, 0.0)).norm() > 1e-12 * (1.0 + c) {
                return Err(MatrixError::BadLayout("spin basis is not trace-orthogonal"));
            }
        }
    }
    let h = a.rows() / s;
    let mut comps = Vec::with_capacity(basis.len());
    for e in basis {
        let mut m = CMatrix::zeros(h, h);
        for h1 in 0..h {
            for h2 in 0..h {
                let mut acc = ZERO;
                for s1 in 0..s {
                    for s2 in 0..s {
                        acc += a[(h1 * s + s1, h2 * s + s2)] * e[(s1, s2)].conj();
                    }
                }
                m[(h1, h2)] = acc / c;
            }
        }
        comps.push(m);
    }
    Ok(comps)
}

/// Rebuild `Σ_i M_i ⊗ e_i`; inverse of [`partial_trace_spin`] for a
/// spanning basis.
pub fn assemble_from_spin(comps: &[CMatrix], basis: &[CMatrix]) -> Result<CMatrix, MatrixError> {
    if comps.len() != basis.len() || comps.is_empty() {
        return Err(MatrixError::BadLayout("component/basis count mismatch"));
    }
    let mut out = kron(&comps[0], &basis[0]);
    for (m, e) in comps.iter().zip(basis).skip(1) {
        out = out.add(&kron(m, e))?;
    }
    Ok(out)
}
