//! Metrics on `Z`: Dirac assembly checks, the path-metric LP recovery,
//! seminorm closed forms against assembled commutators, and the
//! Lipschitz-ball boundedness dichotomies.

use std::path::Path;

use smlab_core::eigen::{hermitian_eigen, operator_norm};
use smlab_core::matrix::commutator;
use smlab_core::rng::SplitMix64;
use smlab_core::transport::{connes_dual_lp, ProbOnZ};
use smlab_core::zline::{
    ball_witness, build_dirac_k, build_dirac_lambda, diagonal_element, dirac_lambda_proof_bound,
    lipschitz_seminorm_allpairs, lipschitz_seminorm_consecutive, path_metric, sup_norm, WeightSeq,
    Window, WitnessKind, ZMetric,
};

use super::{core_err, RunError};
use crate::config::ExperimentConfig;
use crate::corpus;
use crate::report::{write_csv, Check, Convergence, Report};

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let half = cfg.i64("window")?;
    let window = Window::new(half).map_err(|e| core_err("zmetric", e))?;
    let profiles = cfg.usize("profiles")?;
    let lambda = cfg.f64("lambda")?;
    let tol_lp = cfg.f64("tol_lp")?;
    let mut rng = SplitMix64::new(cfg.u64("seed")?);
    let mut report = Report::new("zmetric", cfg.echo());

    // Random gap profiles: assembly invariants and LP path recovery on
    // every window point pair.
    let mut worst_herm: f64 = 0.0;
    let mut worst_bound = f64::NEG_INFINITY;
    let mut worst_lp: f64 = 0.0;
    let mut pair_count = 0usize;
    for _ in 0..profiles {
        let metric = corpus::random_gaps(&mut rng, window);
        let weights =
            WeightSeq::default_for(&metric, window).map_err(|e| core_err("zmetric", e))?;
        let d = build_dirac_lambda(&metric, window, &weights, lambda)
            .map_err(|e| core_err("zmetric", e))?;
        worst_herm = worst_herm.max(d.hermiticity_defect());
        worst_bound = worst_bound.max(
            dirac_lambda_proof_bound(&metric, window, &weights)
                .map_err(|e| core_err("zmetric", e))?,
        );
        for m in window.iter() {
            for n in (m + 1)..=window.hi() {
                let lp = connes_dual_lp(&ProbOnZ::dirac(m), &ProbOnZ::dirac(n), &metric)
                    .map_err(|e| core_err("zmetric", e))?;
                let pm = path_metric(m, n, &metric, window).map_err(|e| core_err("zmetric", e))?;
                worst_lp = worst_lp.max((lp.value - pm).abs());
                pair_count += 1;
            }
        }
    }
    report.push(Check::at_most(
        "dirac_lambda_hermiticity",
        worst_herm,
        0.0,
        1e-12,
    ));
    report.push(Check::at_most(
        "compactness_proof_bound",
        worst_bound,
        0.0,
        0.0,
    ));
    report.push(Check::at_most(
        format!("lp_equals_path_metric_{pair_count}_pairs"),
        worst_lp,
        0.0,
        tol_lp,
    ));

    // Closed-form seminorm vs assembled commutator norm, interior support.
    let metric = corpus::random_gaps(&mut rng, window);
    let weights = WeightSeq::default_for(&metric, window).map_err(|e| core_err("zmetric", e))?;
    let d = build_dirac_lambda(&metric, window, &weights, lambda)
        .map_err(|e| core_err("zmetric", e))?;
    let mut worst_cons: f64 = 0.0;
    for _ in 0..20 {
        let mut a = vec![0.0; window.len()];
        for n in (window.lo() + 2)..=(window.hi() - 2) {
            a[(n - window.lo()) as usize] = rng.next_symmetric();
        }
        let closed = lipschitz_seminorm_consecutive(&a, &metric, window)
            .map_err(|e| core_err("zmetric", e))?;
        let diag = diagonal_element(&a, &d.layout).map_err(|e| core_err("zmetric", e))?;
        let assembled =
            operator_norm(&commutator(&d.matrix, &diag).map_err(|e| core_err("zmetric", e))?);
        worst_cons = worst_cons.max((closed - assembled).abs());
    }
    report.push(Check::at_most(
        "consecutive_seminorm_oracle",
        worst_cons,
        0.0,
        1e-10,
    ));

    // All-pairs seminorm vs the assembled hop-family operator.
    let small = Window::new(half.min(5)).map_err(|e| core_err("zmetric", e))?;
    let rmax = (2 * small.half()) as usize;
    let tanh = ZMetric::tanh_profile(rmax);
    let wk = WeightSeq::default_for(&tanh, small).map_err(|e| core_err("zmetric", e))?;
    let dk = build_dirac_k(&tanh, small, rmax, lambda, &wk).map_err(|e| core_err("zmetric", e))?;
    report.push(Check::at_most(
        "dirac_k_hermiticity",
        dk.hermiticity_defect(),
        0.0,
        1e-12,
    ));
    // Sign-flip symmetry of the hop-family spectrum: exact for the pure
    // ladder part, broken only by the diagonal X + R; report the defect
    // at a tiny lambda where it must be small.
    let dk_tiny =
        build_dirac_k(&tanh, small, rmax, 1e-6, &wk).map_err(|e| core_err("zmetric", e))?;
    let eig = hermitian_eigen(&dk_tiny.matrix).map_err(|e| core_err("zmetric", e))?;
    let len = eig.values.len();
    let signflip = (0..len)
        .map(|i| (eig.values[i] + eig.values[len - 1 - i]).abs())
        .fold(0.0f64, f64::max);
    report.convergence.push(Convergence {
        name: "dirac_k_signflip_defect_at_lambda_1e-6".into(),
        parameter: 1e-6,
        value: signflip,
    });
    report.push(Check::at_most(
        "dirac_k_spectrum_signflip_small_lambda",
        signflip,
        0.0,
        1e-3,
    ));

    let mut worst_all: f64 = 0.0;
    for _ in 0..10 {
        let a: Vec<f64> = (0..small.len()).map(|_| rng.next_symmetric()).collect();
        let closed =
            lipschitz_seminorm_allpairs(&a, &tanh, small).map_err(|e| core_err("zmetric", e))?;
        let diag = diagonal_element(&a, &dk.layout).map_err(|e| core_err("zmetric", e))?;
        let assembled =
            operator_norm(&commutator(&dk.matrix, &diag).map_err(|e| core_err("zmetric", e))?);
        worst_all = worst_all.max((closed - assembled).abs());
    }
    report.push(Check::at_most(
        "allpairs_seminorm_oracle",
        worst_all,
        0.0,
        1e-8,
    ));

    // Boundedness dichotomies for the Lipschitz-1 witnesses.
    let cap = (half / 2).max(1);
    let summable = ZMetric::summable_gaps(window);
    let mut summable_worst: f64 = 0.0;
    for c in 1..=cap {
        let a = ball_witness(&summable, window, c, WitnessKind::Path)
            .map_err(|e| core_err("zmetric", e))?;
        summable_worst = summable_worst.max(sup_norm(&a));
    }
    report.push(Check::at_most(
        "summable_gaps_witness_norm",
        summable_worst,
        1.0,
        0.0,
    ));

    let unit = ZMetric::unit_gaps(window);
    let a =
        ball_witness(&unit, window, cap, WitnessKind::Path).map_err(|e| core_err("zmetric", e))?;
    report.push(Check::close(
        "unit_gaps_witness_norm_equals_cap",
        sup_norm(&a),
        cap as f64,
        0.0,
    ));

    let tanh_full = ZMetric::tanh_profile(2 * half as usize);
    let mut tanh_worst_norm: f64 = 0.0;
    let mut tanh_worst_seminorm: f64 = 0.0;
    for c in 1..=cap {
        let a = ball_witness(&tanh_full, window, c, WitnessKind::AllPairs)
            .map_err(|e| core_err("zmetric", e))?;
        tanh_worst_norm = tanh_worst_norm.max(sup_norm(&a));
        tanh_worst_seminorm = tanh_worst_seminorm.max(
            lipschitz_seminorm_allpairs(&a, &tanh_full, window)
                .map_err(|e| core_err("zmetric", e))?,
        );
    }
    report.push(Check::at_most(
        "tanh_allpairs_witness_norm",
        tanh_worst_norm,
        1.0,
        0.0,
    ));
    report.push(Check::at_most(
        "tanh_allpairs_witness_seminorm",
        tanh_worst_seminorm,
        1.0,
        1e-12,
    ));

    // Compact-resolvent proxy: the 5th-smallest |eigenvalue| grows with
    // the window.
    let mut rows = Vec::new();
    let mut fifth = Vec::new();
    let mut halves = vec![4i64, 6, 8];
    if !halves.contains(&half) {
        halves.push(half);
    }
    halves.sort_unstable();
    halves.dedup();
    for &h in &halves {
        let w = Window::new(h).map_err(|e| core_err("zmetric", e))?;
        let unit_w = ZMetric::unit_gaps(w);
        let weights = WeightSeq::default_for(&unit_w, w).map_err(|e| core_err("zmetric", e))?;
        let d =
            build_dirac_lambda(&unit_w, w, &weights, lambda).map_err(|e| core_err("zmetric", e))?;
        let eig = hermitian_eigen(&d.matrix).map_err(|e| core_err("zmetric", e))?;
        let mut abs: Vec<f64> = eig.values.iter().map(|v| v.abs()).collect();
        abs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        fifth.push(abs[4]);
        rows.push(vec![h as f64, abs[4]]);
        report.convergence.push(Convergence {
            name: "fifth_smallest_abs_eigenvalue".into(),
            parameter: h as f64,
            value: abs[4],
        });
    }
    report.push(Check::at_least(
        "resolvent_proxy_grows_with_window",
        fifth.last().copied().unwrap_or(0.0) - fifth[0],
        0.0,
        1e-12,
    ));
    let info = write_csv(
        out,
        "zmetric_resolvent_proxy.csv",
        &["window_half", "fifth_smallest_abs_eigenvalue"],
        &rows,
        "Growth of the 5th-smallest |eigenvalue| of D_lambda as the window widens",
    )?;
    report.csv_files.push(info);

    Ok(report)
}
