//! Acceptance suite: each criterion runs at its stated size and
//! tolerance and prints one pass/fail line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use std::process::Command;

use smlab::corpus;
use smlab_core::bundle::{
    bundle_u_identity, discrete_path_length, exponential_curve, geodesic_residual,
    lipschitz_extract, spd_power_distance, sym_exp, BundleConfig, BundleCrossedElement,
    BundleTriple, SPDMatrix, SymMat,
};
use smlab_core::codes::{
    code_params, code_zeta, coordinate_plane_check, entropy, extend_code, Code,
};
use smlab_core::crossed::{
    dhat_spectrum_defect, dual_action_defects, fejer_report, uhat_conjugation_defect,
    verify_appendix_bounds,
};
use smlab_core::eigen::operator_norm;
use smlab_core::gallery::cantor::{connes_sup_over_choices, ultrametric, Seq};
use smlab_core::gallery::rm::{rm_growth_ratios, rm_setup};
use smlab_core::gallery::torus::{growth_exponent, CatAuto};
use smlab_core::matrix::{commutator, CMatrix, C64};
use smlab_core::rng::SplitMix64;
use smlab_core::transport::{connes_dual_lp, w1_line_oracle, wasserstein_p, ProbOnZ};
use smlab_core::zline::{
    ball_witness, lipschitz_seminorm_allpairs, lipschitz_seminorm_consecutive, path_metric,
    sup_norm, Window, WitnessKind, ZMetric,
};

fn verdict(criterion: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {criterion}: {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_01_path_metric_recovery() {
    let window = Window::new(12).unwrap();
    let mut rng = SplitMix64::new(101);
    let mut worst: f64 = 0.0;
    let mut pairs = 0usize;
    for _ in 0..5 {
        let metric = corpus::random_gaps(&mut rng, window);
        for m in window.iter() {
            for n in (m + 1)..=window.hi() {
                let lp = connes_dual_lp(&ProbOnZ::dirac(m), &ProbOnZ::dirac(n), &metric).unwrap();
                let pm = path_metric(m, n, &metric, window).unwrap();
                worst = worst.max((lp.value - pm).abs());
                pairs += 1;
            }
        }
    }
    assert_eq!(pairs, 5 * 300);
    verdict(
        "01 path-metric recovery",
        worst <= 1e-8,
        format!("worst LP vs path-metric defect {worst:.3e} over {pairs} pairs (tol 1e-8)"),
    );
}

#[test]
fn criterion_02_kantorovich_rubinstein() {
    let window = Window::new(8).unwrap();
    let mut rng = SplitMix64::new(202);
    let mut worst_gap: f64 = 0.0;
    for _ in 0..200 {
        let metric = corpus::random_bounded_profile(&mut rng, 2 * window.half() as usize);
        let rho = corpus::random_prob(&mut rng, window, 5);
        let omega = corpus::random_prob(&mut rng, window, 5);
        let primal = wasserstein_p(&rho, &omega, &metric, 1.0).unwrap();
        let dual = connes_dual_lp(&rho, &omega, &metric).unwrap();
        worst_gap = worst_gap.max((primal.value - dual.dual_value).abs());
    }
    let mut worst_cdf: f64 = 0.0;
    for _ in 0..200 {
        let metric = corpus::random_gaps(&mut rng, window);
        let rho = corpus::random_prob(&mut rng, window, 5);
        let omega = corpus::random_prob(&mut rng, window, 5);
        let lp = wasserstein_p(&rho, &omega, &metric, 1.0).unwrap();
        let dual = connes_dual_lp(&rho, &omega, &metric).unwrap();
        let cdf = w1_line_oracle(&rho, &omega, &metric).unwrap();
        worst_cdf = worst_cdf
            .max((lp.value - cdf).abs())
            .max((dual.value - cdf).abs());
    }
    verdict(
        "02 Kantorovich-Rubinstein",
        worst_gap <= 1e-7 && worst_cdf <= 1e-9,
        format!("worst dual/primal gap {worst_gap:.3e} (tol 1e-7), worst CDF-oracle defect {worst_cdf:.3e} (tol 1e-9), 200 pairs each"),
    );
}

#[test]
fn criterion_03_crossed_product_spectrum() {
    let window = Window::new(6).unwrap();
    let mut rng = SplitMix64::new(303);
    let mut worst_spec: f64 = 0.0;
    let mut worst_uhat: f64 = 0.0;
    let mut worst_vk: f64 = 0.0;
    for dim in [2usize, 3, 4] {
        let base = corpus::cycle_base(&mut rng, dim);
        worst_spec = worst_spec.max(dhat_spectrum_defect(&base, window));
        worst_uhat = worst_uhat.max(uhat_conjugation_defect(&base, window));
        for k in [0.9f64, 2.4] {
            let (fa, _, fd) = dual_action_defects(&base, window, k);
            worst_vk = worst_vk.max(fa).max(fd);
        }
    }
    verdict(
        "03 crossed-product spectrum",
        worst_spec <= 1e-9 && worst_uhat == 0.0 && worst_vk == 0.0,
        format!(
            "spectrum defect {worst_spec:.3e} (tol 1e-9), u-identity defect {worst_uhat:.1e} (tol 0), v_k invariance defect {worst_vk:.1e} (tol 0)"
        ),
    );
}

#[test]
fn criterion_04_appendix_bounds() {
    let window = Window::new(24).unwrap();
    let mut rng = SplitMix64::new(404);
    let base = corpus::cycle_base(&mut rng, 2);
    let mut min_slack = f64::INFINITY;
    for _ in 0..100 {
        let b = corpus::random_crossed(&mut rng, &base, 5);
        let rep = verify_appendix_bounds(&b, &base, window, &[4, 16, 64]).unwrap();
        min_slack = min_slack.min(rep.sobolev_slack).min(rep.bk_norm_slack);
        for &(_, s) in rep.fejer_slacks.iter().chain(&rep.bk_fejer_slacks) {
            min_slack = min_slack.min(s);
        }
    }
    let mut worst_mean: f64 = 0.0;
    let mut worst_tail = f64::NEG_INFINITY;
    for order in [4usize, 16, 64] {
        let rep = fejer_report(order, 4096);
        worst_mean = worst_mean.max((rep.mean - 1.0).abs());
        worst_tail = worst_tail.max(rep.tail_mass - 1.0 / (order as f64).sqrt());
    }
    verdict(
        "04 appendix bounds",
        min_slack >= -1e-9 && worst_mean <= 1e-8 && worst_tail <= 1e-8,
        format!(
            "minimum slack {min_slack:.3e} over 100 elements (tol -1e-9), Fejer mean defect {worst_mean:.3e}, tail excess {worst_tail:.3e}"
        ),
    );
}

#[test]
fn criterion_05_lipschitz_ball_dichotomies() {
    let window = Window::new(12).unwrap();
    let summable = ZMetric::summable_gaps(window);
    let unit = ZMetric::unit_gaps(window);
    let tanh = ZMetric::tanh_profile(2 * window.half() as usize);
    let mut summable_ok = true;
    let mut unit_ok = true;
    let mut tanh_ok = true;
    for cap in 1..=6 {
        let a = ball_witness(&summable, window, cap, WitnessKind::Path).unwrap();
        summable_ok &= sup_norm(&a) <= 1.0
            && lipschitz_seminorm_consecutive(&a, &summable, window).unwrap() <= 1.0 + 1e-12;
        let a = ball_witness(&unit, window, cap, WitnessKind::Path).unwrap();
        unit_ok &= sup_norm(&a) == cap as f64;
        let a = ball_witness(&tanh, window, cap, WitnessKind::AllPairs).unwrap();
        tanh_ok &= sup_norm(&a) <= 1.0
            && lipschitz_seminorm_allpairs(&a, &tanh, window).unwrap() <= 1.0 + 1e-12;
    }
    verdict(
        "05 Lipschitz-ball dichotomies",
        summable_ok && unit_ok && tanh_ok,
        format!("summable bounded: {summable_ok}, unit gaps norms = N: {unit_ok}, tanh all-pairs bounded: {tanh_ok}"),
    );
}

#[test]
fn criterion_06_metric_bundle_identity() {
    let mut rng = SplitMix64::new(606);
    let mut worst_identity: f64 = 0.0;
    let mut worst_commutation: f64 = 0.0;
    for dim in [2usize, 3, 4] {
        for (half, rmax) in [(8i64, 4usize), (12, 6)] {
            let window = Window::new(half).unwrap();
            let base = corpus::cycle_base(&mut rng, dim);
            let cfg = BundleConfig::with_tanh_profile(window, rmax, 1.0).unwrap();
            let bt = BundleTriple::assemble(base, cfg).unwrap();
            let sample: Vec<Vec<CMatrix>> = (0..2)
                .map(|_| {
                    (0..window.len())
                        .map(|_| corpus::random_diagonal(&mut rng, dim))
                        .collect()
                })
                .collect();
            let id = bundle_u_identity(&bt, &sample).unwrap();
            worst_identity = worst_identity.max(id.identity_defect);
            worst_commutation = worst_commutation.max(id.commutation_defect);
        }
    }
    // Lipschitz extraction: accepts the covariant base-Lipschitz-1
    // element, rejects the oversized single site with a witness.
    let base = corpus::cycle_base(&mut rng, 2);
    let window = Window::new(8).unwrap();
    let cfg = BundleConfig::with_tanh_profile(window, 4, 1.0).unwrap();
    let bt = BundleTriple::assemble(base.clone(), cfg).unwrap();
    let mut a = corpus::random_diagonal(&mut rng, 2);
    let sn = operator_norm(&commutator(base.dirac(), &a).unwrap());
    a = a.scale(C64::new(0.9 / sn.max(1e-9), 0.0));
    let accepted = BundleCrossedElement::from_terms(
        2,
        window
            .iter()
            .map(|n| ((n, 0i64), base.alpha(&a, n)))
            .collect(),
    );
    let ok = lipschitz_extract(&accepted, &bt).unwrap();
    let violator = BundleCrossedElement::from_terms(
        2,
        vec![((0, 0), CMatrix::identity(2).scale(C64::new(2.0, 0.0)))],
    );
    let bad = lipschitz_extract(&violator, &bt).unwrap();
    let extract_ok = ok.passes(1e-9)
        && bad.rejected(1e-9)
        && bad.witness.as_ref().map(|w| w.condition) == Some(1);
    verdict(
        "06 metric-bundle identity",
        worst_identity == 0.0 && worst_commutation == 0.0 && extract_ok,
        format!(
            "u-conjugation defect {worst_identity:.1e} (tol 0) and algebra commutation defect {worst_commutation:.1e} (tol 0) over 3 dims x 2 sizes; extraction accept/reject: {extract_ok}"
        ),
    );
}

#[test]
fn criterion_07_hyperbolic_growth() {
    let cat = CatAuto::arnold();
    let rho = cat.spectral_radius();
    let growth = growth_exponent(&cat, (1, 0), 8).unwrap();
    let cat_ok = (growth.final_ratio - rho).abs() <= 0.01 * rho;
    let golden = (5.0f64.sqrt() + 1.0) / 2.0;
    println!(
        "criterion 07 note: golden-ratio candidate {golden:.12}, computed spectral radius {rho:.12}, measured ratio {:.12}",
        growth.final_ratio
    );
    let parabolic = growth_exponent(&CatAuto::parabolic(), (1, 0), 16).unwrap();
    let para_ok = (parabolic.power_exponent - 1.0).abs() <= 0.1;
    let mut rm_ok = true;
    let mut rm_detail = String::new();
    for d in [2u64, 5] {
        let field = rm_setup(d).unwrap();
        let ratios = rm_growth_ratios(&field, (1, 0), 8).unwrap();
        let last = *ratios.last().unwrap();
        rm_ok &= (last - field.eps).abs() <= 0.01 * field.eps;
        rm_detail.push_str(&format!("D={d}: ratio {last:.6} vs eps {:.6}; ", field.eps));
    }
    verdict(
        "07 hyperbolic growth",
        cat_ok && para_ok && rm_ok,
        format!(
            "cat ratio {:.6} vs spectral radius {rho:.6} (1%), parabolic exponent {:.3} (1 +- 0.1), {rm_detail}",
            growth.final_ratio, parabolic.power_exponent
        ),
    );
}

#[test]
fn criterion_08_cantor_recovery() {
    let depth = 3usize;
    let count = 1u64 << (2 * depth + 1);
    let mut exact = true;
    let mut pairs = 0u64;
    for a in 0..count {
        for b in a..count {
            let (sa, sb) = (Seq::new(depth, a), Seq::new(depth, b));
            let classical = ultrametric(&sa, &sb).unwrap();
            let connes = connes_sup_over_choices(&sa, &sb, depth).unwrap();
            exact &= connes == classical;
            pairs += 1;
        }
    }
    verdict(
        "08 Cantor recovery",
        exact,
        format!("exhaustive Connes sup equals the ultrametric on all {pairs} cylinder pairs at depth {depth}, zero tolerance"),
    );
}

#[test]
fn criterion_09_spd_geometry() {
    let mut rng = SplitMix64::new(909);
    let mut worst_path: f64 = 0.0;
    for _ in 0..10 {
        let h = corpus::random_sym(&mut rng, 2);
        let len = discrete_path_length(&exponential_curve(&h, 200)).unwrap();
        let closed = spd_power_distance(&sym_exp(&h, 1.0), 0, 1);
        worst_path = worst_path.max((len - closed).abs());
    }
    let mut ratio_ok = true;
    for _ in 0..3 {
        let h = corpus::random_sym(&mut rng, 2);
        let r1 = geodesic_residual(&h, 0.3, 1e-2).unwrap();
        let r2 = geodesic_residual(&h, 0.3, 5e-3).unwrap();
        let r3 = geodesic_residual(&h, 0.3, 2.5e-3).unwrap();
        for ratio in [r2 / r1, r3 / r2] {
            ratio_ok &= (0.15..=0.35).contains(&ratio);
        }
    }
    let m = SymMat::new(2, vec![2.0, 1.0, 1.0, 1.0]).unwrap();
    let cat_q = {
        let mm = |i: usize, j: usize| (0..2).map(|k| m.at(i, k) * m.at(k, j)).sum::<f64>();
        SPDMatrix::new(SymMat::new(2, vec![mm(0, 0), mm(0, 1), mm(1, 0), mm(1, 1)]).unwrap())
            .unwrap()
    };
    let per_step = spd_power_distance(&cat_q, 0, 1);
    let direct = 2.0 * ((3.0 + 5.0f64.sqrt()) / 2.0).ln();
    let cat_ok = (per_step - direct).abs() <= 1e-9;
    verdict(
        "09 SPD geometry",
        worst_path <= 1e-4 && ratio_ok && cat_ok,
        format!(
            "worst path-length error {worst_path:.3e} over 10 curves (tol 1e-4), quarter-ratio test {ratio_ok}, cat per-step defect {:.3e} (tol 1e-9)",
            (per_step - direct).abs()
        ),
    );
}

#[test]
fn criterion_10_codes() {
    let mut ok = true;
    let mut detail = String::new();
    for (name, code) in [
        ("repetition3", Code::repetition(3)),
        ("hamming74", Code::hamming_7_4()),
    ] {
        let p = code_params(&code).unwrap();
        for m in 1..=6 {
            ok &= (entropy(&code, m) - p.rate).abs() <= 1e-9;
        }
        for ds in [0.1, 0.5, 1.0] {
            let z = code_zeta(&code, p.rate + ds, 25);
            ok &= (z.closed_form.unwrap() - z.partial_sum).abs()
                <= z.remainder_bound.unwrap() + 1e-12;
        }
        for ell in 0..p.d {
            ok &= coordinate_plane_check(&code, ell).max_points == 1;
        }
        ok &= coordinate_plane_check(&code, p.d).max_points >= 2;
        for m in 1..=3usize {
            let ext = extend_code(&code, m).unwrap();
            ok &= ext.len() as u64 == (code.len() as u64).pow(m as u32);
            let pe = code_params(&ext).unwrap();
            ok &= (pe.rate - p.rate).abs() <= 1e-12 && pe.delta <= p.delta + 1e-12;
        }
        detail.push_str(&format!("{name}: k={:.1} d={} R={:.4}; ", p.k, p.d, p.rate));
    }
    verdict(
        "10 codes",
        ok,
        format!(
            "{detail}entropy = R (1e-9), zeta remainder bound, plane property, extensions m <= 3"
        ),
    );
}

#[test]
fn criterion_11_determinism() {
    let bin = env!("CARGO_BIN_EXE_smlab");
    let tmp = std::env::temp_dir().join("smlab-acceptance-determinism");
    let (dir_a, dir_b) = (tmp.join("a"), tmp.join("b"));
    let _ = std::fs::remove_dir_all(&tmp);
    for dir in [&dir_a, &dir_b] {
        let status = Command::new(bin)
            .args(["all", "--seed", "1", "--out", dir.to_str().unwrap()])
            .status()
            .expect("run smlab");
        assert!(status.success(), "smlab all --seed 1 must pass");
    }
    let mut files: Vec<String> = std::fs::read_dir(&dir_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert!(files.contains(&"report.json".to_string()));
    let mut identical = true;
    for f in &files {
        let a = std::fs::read(dir_a.join(f)).unwrap();
        let b = std::fs::read(dir_b.join(f)).unwrap_or_default();
        identical &= a == b;
    }
    verdict(
        "11 determinism",
        identical,
        format!(
            "two runs of `smlab all --seed 1` produced byte-identical outputs ({} files)",
            files.len()
        ),
    );
}
