//! Pauli matrices and a fixed 4x4 realization of five anticommuting
//! Dirac matrices.
//!
//! The gamma set is `γ1 = σ1⊗σ3, γ2 = σ2⊗σ3, γ3 = σ3⊗σ3, γ4 = 1⊗σ1,
//! γ5 = 1⊗σ2`: the smallest irreducible representation of the Clifford
//! algebra hosting five mutually anticommuting involutions. All entries
//! are 0, ±1 or ±i, so the anticommutation relations hold exactly.

use alloc::vec::Vec;

use crate::matrix::{kron, CMatrix, C64};

pub struct SpinFactor {
    pub sigma1: CMatrix,
    pub sigma2: CMatrix,
    pub sigma3: CMatrix,
}

pub fn pauli() -> SpinFactor {
    let sigma1 = CMatrix::from_fn(2, 2, |i, j| {
        if i != j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let sigma2 = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => C64::new(0.0, -1.0),
        (1, 0) => C64::new(0.0, 1.0),
        _ => C64::new(0.0, 0.0),
    });
    let sigma3 = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => C64::new(1.0, 0.0),
        (1, 1) => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 0.0),
    });
    SpinFactor {
        sigma1,
        sigma2,
        sigma3,
    }
}

pub struct DiracMatrixSet {
    pub gamma: [CMatrix; 5],
}

impl DiracMatrixSet {
    pub fn gamma(&self, k: usize) -> &CMatrix {
        &self.gamma[k - 1]
    }

    /// The sixteen products `{1, γ_a, γ_a γ_b (a<b)}`: a trace-orthogonal
    /// basis of the full 4x4 matrix algebra.
    pub fn product_basis(&self) -> Vec<CMatrix> {
        let mut basis = Vec::with_capacity(16);
        basis.push(CMatrix::identity(4));
        for g in &self.gamma {
            basis.push(g.clone());
        }
        for a in 0..5 {
            for b in (a + 1)..5 {
                basis.push(self.gamma[a].mul(&self.gamma[b]).unwrap());
            }
        }
        basis
    }
}

pub fn dirac_gammas() -> DiracMatrixSet {
    let p = pauli();
    let id2 = CMatrix::identity(2);
    DiracMatrixSet {
        gamma: [
            kron(&p.sigma1, &p.sigma3),
            kron(&p.sigma2, &p.sigma3),
            kron(&p.sigma3, &p.sigma3),
            kron(&id2, &p.sigma1),
            kron(&id2, &p.sigma2),
        ],
    }
}

/// `(γ1 + iγ2)/2` and `(γ1 - iγ2)/2`, the ladder factors in front of the
/// finite differences of the Dirac operators built on `Z`.
pub fn gamma_ladders(gammas: &DiracMatrixSet) -> (CMatrix, CMatrix) {
    let i = C64::new(0.0, 1.0);
    let half = C64::new(0.5, 0.0);
    let up = gammas
        .gamma(1)
        .add(&gammas.gamma(2).scale(i))
        .unwrap()
        .scale(half);
    let down = gammas
        .gamma(1)
        .sub(&gammas.gamma(2).scale(i))
        .unwrap()
        .scale(half);
    (up, down)
}
