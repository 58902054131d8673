//! The worked dynamical examples, each materialised as finite matrices:
//! toral automorphisms acting on Fourier polynomials ([`torus`]), the
//! bilateral shift on the Cantor set with its choice-map spectral
//! triples ([`cantor`]), and noncommutative tori with real
//! multiplication ([`rm`]).

pub mod cantor;
pub mod rm;
pub mod torus;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GalleryError {
    #[error("mode cutoff {0} too small (need at least {1})")]
    CutoffTooSmall(i64, i64),
    #[error("matrix must have determinant +-1, got {0}")]
    NotUnimodular(i64),
    #[error("integer overflow in matrix power")]
    Overflow,
    #[error("exhaustive search capped at depth 3, got {0}")]
    DepthTooLarge(usize),
    #[error("sequences must share a coordinate window")]
    RadiusMismatch,
    #[error("{0} is not squarefree (or < 2)")]
    NotSquarefree(u64),
    #[error("no totally positive fundamental unit found in the search range")]
    UnitNotFound,
    #[error("mode left the truncation box")]
    ModeEscape,
    #[error("the zero mode has no orbit decomposition")]
    ZeroMode,
}
