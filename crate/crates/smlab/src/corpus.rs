//! Seeded random corpora: every generator is a pure function of a
//! SplitMix64 stream, so a seed pins the whole experiment byte-for-byte.

use smlab_core::crossed::{BaseTriple, CrossedElement};
use smlab_core::matrix::{CMatrix, C64};
use smlab_core::rng::SplitMix64;
use smlab_core::transport::ProbOnZ;
use smlab_core::zline::{Window, ZMetric};

/// Positive gap profile on a window, gaps in `[0.1, 1.1)`.
pub fn random_gaps(rng: &mut SplitMix64, window: Window) -> ZMetric {
    let gaps: Vec<f64> = (0..window.len() - 1)
        .map(|_| 0.1 + rng.next_f64())
        .collect();
    ZMetric::path_gaps(window, gaps).expect("positive gaps")
}

/// Random bounded shift-invariant metric: partial sums of a decreasing
/// summable sequence, per the standard construction.
pub fn random_bounded_profile(rng: &mut SplitMix64, max_sep: usize) -> ZMetric {
    let mut profile = vec![0.0];
    let mut acc = 0.0;
    let mut step = 0.4 + 0.4 * rng.next_f64();
    for _ in 1..=max_sep {
        acc += step;
        profile.push(acc);
        step *= 0.3 + 0.4 * rng.next_f64(); // strictly decreasing increments
    }
    ZMetric::shift_invariant(profile).expect("partial sums of decreasing gaps")
}

/// Finitely supported probability on the window with up to `max_atoms`
/// atoms.
pub fn random_prob(rng: &mut SplitMix64, window: Window, max_atoms: usize) -> ProbOnZ {
    let atoms = 1 + rng.next_below(max_atoms as u64) as usize;
    let mut pairs: Vec<(i64, f64)> = Vec::new();
    let mut used = std::collections::BTreeSet::new();
    while pairs.len() < atoms {
        let n = window.lo() + rng.next_below(window.len() as u64) as i64;
        if used.insert(n) {
            pairs.push((n, 0.05 + rng.next_f64()));
        }
    }
    let total: f64 = pairs.iter().map(|&(_, w)| w).sum();
    ProbOnZ::new(pairs.into_iter().map(|(n, w)| (n, w / total)).collect()).expect("normalised")
}

/// Dense random Hermitian matrix with entries in the unit square.
pub fn random_hermitian(rng: &mut SplitMix64, dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = C64::new(rng.next_symmetric(), 0.0);
        for j in (i + 1)..dim {
            let z = C64::new(rng.next_symmetric(), rng.next_symmetric());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Diagonal-algebra base triple with the cyclic permutation and a random
/// Hermitian Dirac operator.
pub fn cycle_base(rng: &mut SplitMix64, dim: usize) -> BaseTriple {
    let perm: Vec<usize> = (0..dim).map(|i| (i + 1) % dim).collect();
    BaseTriple::diagonal_permutation(&perm, random_hermitian(rng, dim)).expect("valid base")
}

/// Random crossed element with modes `|l| ≤ support`.
pub fn random_crossed(rng: &mut SplitMix64, base: &BaseTriple, support: i64) -> CrossedElement {
    let d = base.dim();
    let mut terms = Vec::new();
    for l in -support..=support {
        terms.push((l, {
            let mut m = CMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] = C64::new(rng.next_symmetric(), rng.next_symmetric());
                }
            }
            m
        }));
    }
    CrossedElement::from_terms(d, terms).expect("dims agree")
}

/// Random real symmetric matrix with entries in `(-1, 1)`.
pub fn random_sym(rng: &mut SplitMix64, dim: usize) -> smlab_core::bundle::SymMat {
    let mut entries = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v = rng.next_symmetric();
            entries[i * dim + j] = v;
            entries[j * dim + i] = v;
        }
    }
    smlab_core::bundle::SymMat::new(dim, entries).expect("symmetric by construction")
}

/// Real diagonal (self-adjoint) algebra element as a window sequence.
pub fn random_diagonal(rng: &mut SplitMix64, dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = C64::new(rng.next_symmetric(), 0.0);
    }
    m
}
