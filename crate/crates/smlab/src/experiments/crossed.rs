//! The regular representation of the crossed product: spectrum formula,
//! shift-unitary identities, dual action, Fejér kernel estimates and the
//! appendix norm bounds.

use std::path::Path;

use smlab_core::crossed::{
    commutator_dhat_norm_identity, dhat_commutant_dimension, dhat_spectrum_defect,
    dual_action_defects, fejer_report, metric_equivalence_witness, uhat_conjugation_defect,
    uhat_covariance_defect, verify_appendix_bounds, RegularRep,
};
use smlab_core::math;
use smlab_core::rng::SplitMix64;
use smlab_core::zline::Window;

use super::{core_err, RunError};
use crate::config::ExperimentConfig;
use crate::corpus;
use crate::report::{write_csv, Check, Convergence, Report};

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let window = Window::new(cfg.i64("window")?).map_err(|e| core_err("crossed", e))?;
    let bound_window = Window::new(cfg.i64("bound_window")?).map_err(|e| core_err("crossed", e))?;
    let elements = cfg.usize("elements")?;
    let support = cfg.i64("support")?;
    let tol_spec = cfg.f64("tol_spec")?;
    let tol_slack = cfg.f64("tol_slack")?;
    let mut rng = SplitMix64::new(cfg.u64("seed")?);
    let mut report = Report::new("crossed", cfg.echo());

    // Spectrum, shift-unitary and dual-action identities per base dim.
    let mut worst_spec: f64 = 0.0;
    let mut worst_uhat: f64 = 0.0;
    let mut worst_cov: f64 = 0.0;
    let mut worst_valg: f64 = 0.0;
    let mut worst_vu: f64 = 0.0;
    let mut worst_vdir: f64 = 0.0;
    let mut worst_norm_identity: f64 = 0.0;
    for dim in [2usize, 3, 4] {
        let base = corpus::cycle_base(&mut rng, dim);
        worst_spec = worst_spec.max(dhat_spectrum_defect(&base, window));
        worst_uhat = worst_uhat.max(uhat_conjugation_defect(&base, window));
        for a in base.basis() {
            worst_cov = worst_cov.max(uhat_covariance_defect(&base, window, a));
        }
        for k in [0.7f64, math::PI] {
            let (fa, su, fd) = dual_action_defects(&base, window, k);
            worst_valg = worst_valg.max(fa);
            worst_vu = worst_vu.max(su);
            worst_vdir = worst_vdir.max(fd);
        }
        for _ in 0..4 {
            let a = corpus::random_diagonal(&mut rng, dim);
            let (lhs, rhs) = commutator_dhat_norm_identity(&base, window, &a);
            worst_norm_identity = worst_norm_identity.max((lhs - rhs).abs());
        }
    }
    report.push(Check::at_most(
        "dhat_spectrum_formula_defect",
        worst_spec,
        0.0,
        tol_spec,
    ));
    report.push(Check::close(
        "uhat_conjugation_identity",
        worst_uhat,
        0.0,
        0.0,
    ));
    report.push(Check::close(
        "uhat_covariance_identity",
        worst_cov,
        0.0,
        0.0,
    ));
    report.push(Check::close(
        "dual_action_fixes_algebra",
        worst_valg,
        0.0,
        0.0,
    ));
    report.push(Check::at_most("dual_action_scales_u", worst_vu, 0.0, 1e-12));
    report.push(Check::close(
        "dual_action_fixes_dirac",
        worst_vdir,
        0.0,
        0.0,
    ));
    report.push(Check::at_most(
        "commutator_norm_identity",
        worst_norm_identity,
        0.0,
        1e-10,
    ));

    // Trivial commutant at truncation.
    let base2 = corpus::cycle_base(&mut rng, 2);
    let base3 = corpus::cycle_base(&mut rng, 3);
    let k2 = dhat_commutant_dimension(&base2, window, 2) as f64;
    let k3 = dhat_commutant_dimension(&base3, window, 2) as f64;
    report.push(Check::close("dhat_commutant_dimension_dim2", k2, 1.0, 0.0));
    report.push(Check::close("dhat_commutant_dimension_dim3", k3, 1.0, 0.0));

    // Fejér kernel estimates at orders 4, 16, 64.
    let mut fejer_rows = Vec::new();
    let mut worst_mean: f64 = 0.0;
    let mut worst_tail = f64::NEG_INFINITY;
    let mut worst_min: f64 = 0.0;
    let mut worst_form: f64 = 0.0;
    for order in [4usize, 16, 64] {
        let rep = fejer_report(order, 4096);
        worst_mean = worst_mean.max((rep.mean - 1.0).abs());
        worst_tail = worst_tail.max(rep.tail_mass - 1.0 / math::sqrt(order as f64));
        worst_min = worst_min.min(rep.min_value);
        worst_form = worst_form.max(rep.form_defect);
        fejer_rows.push(vec![
            order as f64,
            rep.mean,
            rep.tail_mass,
            1.0 / math::sqrt(order as f64),
        ]);
    }
    report.push(Check::at_most("fejer_mean_defect", worst_mean, 0.0, 1e-8));
    report.push(Check::at_most(
        "fejer_tail_bound_excess",
        worst_tail,
        0.0,
        1e-8,
    ));
    report.push(Check::at_least("fejer_nonnegative", worst_min, 0.0, 0.0));
    report.push(Check::at_most("fejer_forms_agree", worst_form, 0.0, 1e-10));
    let info = write_csv(
        out,
        "crossed_fejer.csv",
        &["order", "mean", "tail_mass", "tail_bound"],
        &fejer_rows,
        "Fejer kernel trapezoid mean and exact tail mass against the 1/sqrt(N) bound",
    )?;
    report.csv_files.push(info);

    // Appendix estimates on seeded crossed elements.
    let base = corpus::cycle_base(&mut rng, 2);
    let mut worst_sobolev = f64::INFINITY;
    let mut worst_fejer_slack = f64::INFINITY;
    let mut worst_bk_norm = f64::INFINITY;
    let mut worst_bk_fejer = f64::INFINITY;
    let mut worst_monotonicity: f64 = 0.0;
    let mut error_rows = Vec::new();
    for i in 0..elements {
        let b = corpus::random_crossed(&mut rng, &base, support);
        let rep = verify_appendix_bounds(&b, &base, bound_window, &[4, 9, 16, 25])
            .map_err(|e| core_err("crossed", e))?;
        worst_sobolev = worst_sobolev.min(rep.sobolev_slack);
        for &(_, s) in &rep.fejer_slacks {
            worst_fejer_slack = worst_fejer_slack.min(s);
        }
        worst_bk_norm = worst_bk_norm.min(rep.bk_norm_slack);
        for &(_, s) in &rep.bk_fejer_slacks {
            worst_bk_fejer = worst_bk_fejer.min(s);
        }
        for pair in rep.bk_fejer_errors.windows(2) {
            worst_monotonicity = worst_monotonicity.max(pair[1].1 - pair[0].1);
        }
        if i == 0 {
            for &(order, e) in &rep.bk_fejer_errors {
                error_rows.push(vec![
                    order as f64,
                    e,
                    2.2 * math::PI / math::sqrt(order as f64),
                ]);
            }
            report.convergence.push(Convergence {
                name: "representation_norm_window_doubling_delta".into(),
                parameter: bound_window.half() as f64,
                value: rep.window_doubling_delta,
            });
        }
    }
    report.push(Check::at_least(
        "sobolev_bound_slack",
        worst_sobolev,
        0.0,
        tol_slack,
    ));
    report.push(Check::at_least(
        "fejer_bound_slack",
        worst_fejer_slack,
        0.0,
        tol_slack,
    ));
    report.push(Check::at_least(
        "bk_norm_bound_slack",
        worst_bk_norm,
        0.0,
        tol_slack,
    ));
    report.push(Check::at_least(
        "bk_fejer_bound_slack",
        worst_bk_fejer,
        0.0,
        tol_slack,
    ));
    report.push(Check::at_most(
        "fejer_error_monotone_defect",
        worst_monotonicity,
        0.0,
        1e-9,
    ));
    let info = write_csv(
        out,
        "crossed_fejer_error.csv",
        &["order", "error", "bound"],
        &error_rows,
        "Fejer approximation error of the first B(K)-projected element vs 2.2 pi / sqrt(N)",
    )?;
    report.csv_files.push(info);

    // Expectation contraction under the assembled norm.
    let rep_asm = RegularRep::new(base.clone(), window);
    let mut worst_contract = f64::NEG_INFINITY;
    for _ in 0..5 {
        let b = corpus::random_crossed(&mut rng, &base, support.min(window.half() / 2));
        let eb = smlab_core::crossed::CrossedElement::single(0, b.conditional_expectation());
        worst_contract = worst_contract.max(rep_asm.norm(&eb) - rep_asm.norm(&b));
    }
    report.push(Check::at_most(
        "expectation_contracts_norm",
        worst_contract,
        0.0,
        1e-9,
    ));

    // Metric equivalence witness on a permutation base.
    let base4 = corpus::cycle_base(&mut rng, 4);
    let elements_sample: Vec<Vec<f64>> = (0..40)
        .map(|_| (0..4).map(|_| rng.next_symmetric()).collect())
        .collect();
    let state_pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..10)
        .map(|_| {
            let normalise = |mut v: Vec<f64>| {
                let s: f64 = v.iter().sum();
                v.iter_mut().for_each(|x| *x /= s);
                v
            };
            (
                normalise((0..4).map(|_| rng.next_f64() + 0.01).collect()),
                normalise((0..4).map(|_| rng.next_f64() + 0.01).collect()),
            )
        })
        .collect();
    let witness = metric_equivalence_witness(&base4, 8, &elements_sample, &state_pairs);
    report.push(Check::at_most(
        "metric_equivalence_violation",
        witness.violation,
        0.0,
        1e-9,
    ));
    report.push(Check::at_least(
        "metric_equivalence_k_ratio",
        witness.k_ratio,
        1.0,
        1e-12,
    ));

    Ok(report)
}
