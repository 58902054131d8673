//! Property tests for the structural invariants that hold on every
//! input, not just the curated examples.

use proptest::prelude::*;

use smlab_core::eigen::hermitian_eigen;
use smlab_core::gallery::cantor::{ultrametric, Seq};
use smlab_core::matrix::{kron, CMatrix, C64};
use smlab_core::transport::{wasserstein_p, ProbOnZ};
use smlab_core::zline::{Window, ZMetric};

fn hermitian_strategy(n: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec(-1.0f64..1.0, n * n * 2).prop_map(move |vals| {
        let mut m = CMatrix::zeros(n, n);
        let mut it = vals.into_iter();
        for i in 0..n {
            m[(i, i)] = C64::new(it.next().unwrap(), 0.0);
            let _ = it.next();
            for j in (i + 1)..n {
                let z = C64::new(it.next().unwrap(), it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    })
}

fn prob_strategy(window: Window) -> impl Strategy<Value = ProbOnZ> {
    proptest::collection::vec(0.01f64..1.0, window.len()).prop_map(move |raw| {
        let total: f64 = raw.iter().sum();
        let pairs = window
            .iter()
            .zip(raw.iter())
            .map(|(n, &w)| (n, w / total))
            .collect::<Vec<_>>();
        ProbOnZ::new(pairs).expect("normalised")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn eigen_reconstructs_and_is_orthonormal(m in hermitian_strategy(5)) {
        let eig = hermitian_eigen(&m).unwrap();
        let scale = m.max_abs().max(1.0);
        prop_assert!(eig.reconstruction_defect(&m) <= 1e-10 * scale);
        prop_assert!(eig.orthonormality_defect() <= 1e-10);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn kron_mixed_product(a in hermitian_strategy(3), b in hermitian_strategy(2),
                          c in hermitian_strategy(3), d in hermitian_strategy(2)) {
        let lhs = kron(&a, &b).mul(&kron(&c, &d)).unwrap();
        let rhs = kron(&a.mul(&c).unwrap(), &b.mul(&d).unwrap());
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn wasserstein_is_a_metric_with_certificates(
        seed_rho in prob_strategy(Window::new(4).unwrap()),
        seed_omega in prob_strategy(Window::new(4).unwrap()),
    ) {
        let metric = ZMetric::tanh_profile(8);
        let fwd = wasserstein_p(&seed_rho, &seed_omega, &metric, 1.0).unwrap();
        let bwd = wasserstein_p(&seed_omega, &seed_rho, &metric, 1.0).unwrap();
        prop_assert!((fwd.value - bwd.value).abs() <= 1e-9);
        prop_assert!(fwd.value >= -1e-12);
        prop_assert!(fwd.duality_gap() <= 1e-9);
        prop_assert!(fwd.coupling.marginal_defect(&seed_rho, &seed_omega) <= 1e-10);
        let self_dist = wasserstein_p(&seed_rho, &seed_rho, &metric, 1.0).unwrap();
        prop_assert!(self_dist.value <= 1e-12);
    }

    #[test]
    fn cantor_ultrametric_inequality(a in 0u64..128, b in 0u64..128, c in 0u64..128) {
        let r = 3;
        let (sa, sb, sc) = (Seq::new(r, a), Seq::new(r, b), Seq::new(r, c));
        let ab = ultrametric(&sa, &sb).unwrap();
        let bc = ultrametric(&sb, &sc).unwrap();
        let ac = ultrametric(&sa, &sc).unwrap();
        prop_assert!(ac <= ab.max(bc));
        prop_assert!((ultrametric(&sa, &sa).unwrap() - 0.0).abs() == 0.0);
        prop_assert_eq!(ab, ultrametric(&sb, &sa).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn code_entropy_equals_rate(word_bits in proptest::collection::btree_set(0u32..32, 2..6)) {
        // random distinct binary words of length 5
        let words: Vec<Vec<u32>> = word_bits
            .into_iter()
            .map(|w| (0..5).map(|j| w >> j & 1).collect())
            .collect();
        let code = smlab_core::codes::Code::new(2, 5, words).unwrap();
        let params = smlab_core::codes::code_params(&code).unwrap();
        for m in 1..=4 {
            prop_assert!((smlab_core::codes::entropy(&code, m) - params.rate).abs() <= 1e-9);
        }
        // extension preserves the rate and never increases delta
        let ext = smlab_core::codes::extend_code(&code, 2).unwrap();
        let pe = smlab_core::codes::code_params(&ext).unwrap();
        prop_assert!((pe.rate - params.rate).abs() <= 1e-12);
        prop_assert!(pe.delta <= params.delta + 1e-12);
    }
}
