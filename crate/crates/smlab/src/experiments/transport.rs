//! Transportation LPs: Kantorovich-Rubinstein duality with certificates,
//! the 1-D CDF oracle, Dobrushin couplings and D-tightness.

use std::path::Path;

use smlab_core::rng::SplitMix64;
use smlab_core::transport::{
    connes_dual_lp, d_tight_radius, dobrushin_cost_and_bound, dobrushin_coupling,
    moment_bounds_check, w1_line_oracle, wasserstein_p, ProbOnZ,
};
use smlab_core::zline::Window;

use super::{core_err, RunError};
use crate::config::ExperimentConfig;
use crate::corpus;
use crate::report::{write_csv, Check, Convergence, Report};

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let window = Window::new(cfg.i64("window")?).map_err(|e| core_err("transport", e))?;
    let pairs = cfg.usize("pairs")?;
    let tol_kr = cfg.f64("tol_kr")?;
    let tol_cdf = cfg.f64("tol_cdf")?;
    let mut rng = SplitMix64::new(cfg.u64("seed")?);
    let mut report = Report::new("transport", cfg.echo());

    // Kantorovich-Rubinstein on seeded pairs with bounded metrics, with
    // full certificates: coupling marginals and Lipschitz potentials.
    let mut worst_gap: f64 = 0.0;
    let mut worst_cert_gap: f64 = 0.0;
    let mut worst_marginal: f64 = 0.0;
    let mut worst_lip: f64 = 0.0;
    let mut kr_rows = Vec::new();
    for i in 0..pairs {
        let metric = corpus::random_bounded_profile(&mut rng, 2 * window.half() as usize);
        let rho = corpus::random_prob(&mut rng, window, 5);
        let omega = corpus::random_prob(&mut rng, window, 5);
        let primal =
            wasserstein_p(&rho, &omega, &metric, 1.0).map_err(|e| core_err("transport", e))?;
        let dual = connes_dual_lp(&rho, &omega, &metric).map_err(|e| core_err("transport", e))?;
        let gap = (primal.value - dual.dual_value).abs();
        worst_gap = worst_gap.max(gap);
        worst_cert_gap = worst_cert_gap
            .max(primal.duality_gap())
            .max(dual.duality_gap());
        worst_marginal = worst_marginal.max(primal.coupling.marginal_defect(&rho, &omega));
        worst_lip = worst_lip
            .max(dual.lipschitz_defect(|m, n| metric.distance(m, n).expect("window pair")));
        kr_rows.push(vec![i as f64, primal.value, dual.dual_value, gap]);
    }
    report.push(Check::at_most(
        format!("kantorovich_rubinstein_gap_{pairs}_pairs"),
        worst_gap,
        0.0,
        tol_kr,
    ));
    report.push(Check::at_most(
        "duality_certificate_gap",
        worst_cert_gap,
        0.0,
        1e-9,
    ));
    report.push(Check::at_most(
        "coupling_marginal_defect",
        worst_marginal,
        0.0,
        1e-10,
    ));
    report.push(Check::at_most(
        "potential_lipschitz_defect",
        worst_lip,
        0.0,
        1e-10,
    ));
    let info = write_csv(
        out,
        "transport_kr_gaps.csv",
        &["pair", "transport_lp", "dual_lp", "gap"],
        &kr_rows,
        "Primal transportation value vs Lipschitz-dual value per seeded pair",
    )?;
    report.csv_files.push(info);

    // Path-gap metrics against the independent CDF oracle.
    let mut worst_cdf: f64 = 0.0;
    for _ in 0..pairs {
        let metric = corpus::random_gaps(&mut rng, window);
        let rho = corpus::random_prob(&mut rng, window, 4);
        let omega = corpus::random_prob(&mut rng, window, 4);
        let lp = wasserstein_p(&rho, &omega, &metric, 1.0).map_err(|e| core_err("transport", e))?;
        let dual = connes_dual_lp(&rho, &omega, &metric).map_err(|e| core_err("transport", e))?;
        let cdf = w1_line_oracle(&rho, &omega, &metric).map_err(|e| core_err("transport", e))?;
        worst_cdf = worst_cdf
            .max((lp.value - cdf).abs())
            .max((dual.value - cdf).abs());
    }
    report.push(Check::at_most(
        format!("cdf_oracle_defect_{pairs}_pairs"),
        worst_cdf,
        0.0,
        tol_cdf,
    ));

    // Dobrushin couplings: exact marginals and the proof's cost bound.
    let mut worst_dob_marginal: f64 = 0.0;
    let mut worst_excess: f64 = f64::NEG_INFINITY;
    for _ in 0..100 {
        let a = corpus::random_prob(&mut rng, window, 5);
        let b = corpus::random_prob(&mut rng, window, 5);
        let cap = rng.next_below(window.half() as u64 + 1) as i64;
        let coupling = dobrushin_coupling(&a, &b, cap);
        worst_dob_marginal = worst_dob_marginal.max(coupling.marginal_defect(&a, &b));
        let (cost, bound) = dobrushin_cost_and_bound(&a, &b, cap);
        worst_excess = worst_excess.max(cost - bound);
    }
    report.push(Check::at_most(
        "dobrushin_marginal_defect",
        worst_dob_marginal,
        0.0,
        1e-12,
    ));
    report.push(Check::at_most(
        "dobrushin_cost_bound_excess",
        worst_excess,
        0.0,
        1e-12,
    ));

    // Weak-* convergence within a D-tight family: the Dobrushin cost of
    // ρ_j = (1 - 1/j)δ0 + (1/j)δ5 against δ0 vanishes as j grows.
    let mut conv_rows = Vec::new();
    let mut costs = Vec::new();
    for j in [2u32, 4, 8, 16, 32, 64] {
        let w = 1.0 / j as f64;
        let rho_j =
            ProbOnZ::new(vec![(0, 1.0 - w), (5, w)]).map_err(|e| core_err("transport", e))?;
        let (cost, _) = dobrushin_cost_and_bound(&rho_j, &ProbOnZ::dirac(0), 5);
        conv_rows.push(vec![j as f64, cost]);
        costs.push(cost);
        report.convergence.push(Convergence {
            name: "dobrushin_cost_to_weak_limit".into(),
            parameter: j as f64,
            value: cost,
        });
    }
    report.push(Check::at_most(
        "dobrushin_cost_vanishes_along_weak_limit",
        *costs.last().expect("nonempty"),
        0.1,
        0.0,
    ));
    let info = write_csv(
        out,
        "transport_dobrushin_convergence.csv",
        &["j", "coupling_cost"],
        &conv_rows,
        "Dobrushin transport cost of (1-1/j) d0 + (1/j) d5 against d0",
    )?;
    report.csv_files.push(info);

    // D-tight radii: pointwise in eps for the truncated geometric family.
    let geo: Vec<(i64, f64)> = (-window.half()..=window.half())
        .map(|n| (n, (2.0f64).powi(-(n.abs() as i32))))
        .collect();
    let z: f64 = geo.iter().map(|&(_, w)| w).sum();
    let geo = ProbOnZ::new(geo.into_iter().map(|(n, w)| (n, w / z)).collect())
        .map_err(|e| core_err("transport", e))?;
    let tight = d_tight_radius(&[geo.clone()], 0.01).map_err(|e| core_err("transport", e))?;
    let loose = d_tight_radius(&[geo], 0.5).map_err(|e| core_err("transport", e))?;
    report.push(Check::at_least(
        "d_tight_radius_within_window_decreasing_in_eps",
        (tight - loose) as f64,
        1.0,
        0.0,
    ));

    // Weak-convergence and first-moment estimates against W1.
    let mut worst_weak = f64::INFINITY;
    let mut worst_moment = f64::INFINITY;
    for _ in 0..100 {
        let p = corpus::random_prob(&mut rng, window, 5);
        let q = corpus::random_prob(&mut rng, window, 5);
        let a: Vec<(i64, f64)> = window.iter().map(|n| (n, rng.next_symmetric())).collect();
        let rep = moment_bounds_check(&p, &q, &a);
        worst_weak = worst_weak.min(rep.weak_slack);
        worst_moment = worst_moment.min(rep.moment_slack);
    }
    report.push(Check::at_least(
        "weak_convergence_bound_slack",
        worst_weak,
        0.0,
        1e-9,
    ));
    report.push(Check::at_least(
        "first_moment_bound_slack",
        worst_moment,
        0.0,
        1e-9,
    ));

    Ok(report)
}
