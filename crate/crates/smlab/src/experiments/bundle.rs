//! SPD geometry and the metric bundle: path-length convergence, the
//! geodesic residual, the exact orbit-shift identity, Lipschitz
//! extraction and the dual-action continuity contrast.

use std::path::Path;

use smlab_core::bundle::{
    bundle_u_identity, compactness_profile, discrete_path_length, dual_action_continuity_contrast,
    exponential_curve, geodesic_residual, lipschitz_extract, spd_power_distance, sym_exp,
    BundleConfig, BundleCrossedElement, BundleTriple, SymMat,
};
use smlab_core::eigen::operator_norm;
use smlab_core::math;
use smlab_core::matrix::{commutator, CMatrix, C64};
use smlab_core::rng::SplitMix64;
use smlab_core::zline::Window;

use super::{core_err, RunError};
use crate::config::ExperimentConfig;
use crate::corpus;
use crate::report::{write_csv, Check, Convergence, Report};

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let window = Window::new(cfg.i64("window")?).map_err(|e| core_err("bundle", e))?;
    let rmax = cfg.usize("rmax")?;
    let lambda = cfg.f64("lambda")?;
    let segments = cfg.usize("segments")?;
    let curves = cfg.usize("curves")?;
    let tol_path = cfg.f64("tol_path")?;
    let mut rng = SplitMix64::new(cfg.u64("seed")?);
    let mut report = Report::new("bundle", cfg.echo());

    // Discrete path length of e^{sH} against the closed form.
    let mut worst_path: f64 = 0.0;
    for _ in 0..curves {
        let h = corpus::random_sym(&mut rng, 2);
        let curve = exponential_curve(&h, segments);
        let len = discrete_path_length(&curve).map_err(|e| core_err("bundle", e))?;
        let closed = spd_power_distance(&sym_exp(&h, 1.0), 0, 1);
        worst_path = worst_path.max((len - closed).abs());
    }
    report.push(Check::at_most(
        format!("path_length_error_{curves}_curves"),
        worst_path,
        0.0,
        tol_path,
    ));

    // Second-order convergence of the discrete length in the segment
    // count, on a fixed curve.
    let h = SymMat::diag(&[1.0, -1.0]);
    let closed = spd_power_distance(&sym_exp(&h, 1.0), 0, 1);
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for k in [25usize, 50, 100, 200] {
        let len =
            discrete_path_length(&exponential_curve(&h, k)).map_err(|e| core_err("bundle", e))?;
        let e = (len - closed).abs();
        rows.push(vec![k as f64, e]);
        errors.push(e);
        report.convergence.push(Convergence {
            name: "path_length_error".into(),
            parameter: k as f64,
            value: e,
        });
    }
    let order_ratio = errors[3] / errors[2].max(1e-300);
    report.push(Check::at_most(
        "path_length_second_order_ratio",
        order_ratio,
        0.25,
        0.1,
    ));
    let info = write_csv(
        out,
        "bundle_path_convergence.csv",
        &["segments", "length_error"],
        &rows,
        "Discrete geodesic length error vs segment count (order 2 expected)",
    )?;
    report.csv_files.push(info);

    // Geodesic ODE residual: quarter-ratio under step halving.
    let mut worst_ratio_dev: f64 = 0.0;
    for _ in 0..3 {
        let h = corpus::random_sym(&mut rng, 2);
        let r1 = geodesic_residual(&h, 0.3, 1e-2).map_err(|e| core_err("bundle", e))?;
        let r2 = geodesic_residual(&h, 0.3, 5e-3).map_err(|e| core_err("bundle", e))?;
        let r3 = geodesic_residual(&h, 0.3, 2.5e-3).map_err(|e| core_err("bundle", e))?;
        for ratio in [r2 / r1.max(1e-300), r3 / r2.max(1e-300)] {
            worst_ratio_dev = worst_ratio_dev.max((ratio - 0.25).abs());
        }
    }
    report.push(Check::at_most(
        "geodesic_residual_quarter_ratio_dev",
        worst_ratio_dev,
        0.0,
        0.1,
    ));

    // Cat-map orbit metric: per-step distance via the SPD machinery vs
    // the direct formula 2 ln((3+sqrt5)/2).
    let m = SymMat::new(2, vec![2.0, 1.0, 1.0, 1.0]).map_err(|e| core_err("bundle", e))?;
    let m2 = {
        let mm = |i: usize, j: usize| (0..2).map(|k| m.at(i, k) * m.at(k, j)).sum::<f64>();
        SymMat::new(2, vec![mm(0, 0), mm(0, 1), mm(1, 0), mm(1, 1)])
            .map_err(|e| core_err("bundle", e))?
    };
    let q = smlab_core::bundle::SPDMatrix::new(m2).map_err(|e| core_err("bundle", e))?;
    let per_step = spd_power_distance(&q, 0, 1);
    let direct = 2.0 * math::ln((3.0 + math::sqrt(5.0)) / 2.0);
    report.push(Check::close(
        "cat_orbit_per_step_distance",
        per_step,
        direct,
        1e-9,
    ));

    // The metric-bundle shift identity, exactly, for base dims 2 and 3.
    let mut worst_identity: f64 = 0.0;
    let mut worst_commutation: f64 = 0.0;
    for dim in [2usize, 3] {
        let base = corpus::cycle_base(&mut rng, dim);
        let bcfg = BundleConfig::with_tanh_profile(window, rmax, lambda)
            .map_err(|e| core_err("bundle", e))?;
        let bt = BundleTriple::assemble(base.clone(), bcfg).map_err(|e| core_err("bundle", e))?;
        report.push(Check::close(
            format!("bundle_dirac_hermiticity_dim{dim}"),
            bt.dirac().hermiticity_defect(),
            0.0,
            0.0,
        ));
        let sample: Vec<Vec<CMatrix>> = (0..3)
            .map(|_| {
                (0..window.len())
                    .map(|_| corpus::random_diagonal(&mut rng, dim))
                    .collect()
            })
            .collect();
        let identity = bundle_u_identity(&bt, &sample).map_err(|e| core_err("bundle", e))?;
        worst_identity = worst_identity.max(identity.identity_defect);
        worst_commutation = worst_commutation.max(identity.commutation_defect);
    }
    report.push(Check::close(
        "u_conjugation_equals_lambda_gamma3",
        worst_identity,
        0.0,
        0.0,
    ));
    report.push(Check::close(
        "gamma3_commutes_with_algebra",
        worst_commutation,
        0.0,
        0.0,
    ));

    // Lipschitz extraction accepts a covariant base-Lipschitz element and
    // rejects an oversized site with a condition-1 witness.
    let base = corpus::cycle_base(&mut rng, 2);
    let bcfg =
        BundleConfig::with_tanh_profile(window, rmax, lambda).map_err(|e| core_err("bundle", e))?;
    let bt = BundleTriple::assemble(base.clone(), bcfg).map_err(|e| core_err("bundle", e))?;
    let mut a = corpus::random_diagonal(&mut rng, 2);
    let sn = operator_norm(&commutator(base.dirac(), &a).map_err(|e| core_err("bundle", e))?);
    if sn > 1e-9 {
        a = a.scale(C64::new(0.9 / sn, 0.0));
    }
    let accepted = BundleCrossedElement::from_terms(
        2,
        window
            .iter()
            .map(|n| ((n, 0i64), base.alpha(&a, n)))
            .collect(),
    );
    let rep_ok = lipschitz_extract(&accepted, &bt).map_err(|e| core_err("bundle", e))?;
    report.push(Check::close(
        "lipschitz_extract_accepts_covariant",
        if rep_ok.passes(1e-9) { 1.0 } else { 0.0 },
        1.0,
        0.0,
    ));
    report.push(Check::at_most(
        "lipschitz_extraction_defect",
        rep_ok.extraction_defect,
        0.0,
        1e-10,
    ));
    let violator = BundleCrossedElement::from_terms(
        2,
        vec![((0, 0), CMatrix::identity(2).scale(C64::new(2.0, 0.0)))],
    );
    let rep_bad = lipschitz_extract(&violator, &bt).map_err(|e| core_err("bundle", e))?;
    let witness_ok =
        rep_bad.rejected(1e-9) && rep_bad.witness.as_ref().map(|w| w.condition) == Some(1);
    report.push(Check::close(
        "lipschitz_extract_rejects_violator",
        if witness_ok { 1.0 } else { 0.0 },
        1.0,
        0.0,
    ));

    // Dual-action continuity contrast across rmax.
    let mut contrast_rows = Vec::new();
    let mut uncompressed = Vec::new();
    let mut compressed = Vec::new();
    for r in [rmax, 2 * rmax] {
        let w = Window::new((r as i64).max(window.half())).map_err(|e| core_err("bundle", e))?;
        let bcfg =
            BundleConfig::with_tanh_profile(w, r, lambda).map_err(|e| core_err("bundle", e))?;
        let bt = BundleTriple::assemble(base.clone(), bcfg).map_err(|e| core_err("bundle", e))?;
        let b: Vec<CMatrix> = w
            .iter()
            .map(|n| {
                if n.abs() <= 1 {
                    CMatrix::identity(2).scale(C64::new(1.0 / (1 + n.abs()) as f64, 0.0))
                } else {
                    CMatrix::zeros(2, 2)
                }
            })
            .collect();
        let (unc, comp) = dual_action_continuity_contrast(&bt, &b, 0.0, 1e-3)
            .map_err(|e| core_err("bundle", e))?;
        uncompressed.push(unc);
        compressed.push(comp);
        contrast_rows.push(vec![r as f64, unc, comp]);
    }
    report.push(Check::at_least(
        "uncompressed_norm_persists_in_rmax",
        uncompressed[1] / uncompressed[0].max(1e-300),
        0.9,
        0.0,
    ));
    let comp_max = compressed.iter().fold(0.0f64, |m, &c| m.max(c));
    report.push(Check::at_most(
        "compressed_norm_small_uniformly",
        comp_max,
        5e-3,
        0.0,
    ));
    let info = write_csv(
        out,
        "bundle_continuity_contrast.csv",
        &["rmax", "uncompressed", "compressed"],
        &contrast_rows,
        "Norms of [nabla_k - nabla_k', b] raw and h-compressed at |k-k'| = 1e-3",
    )?;
    report.csv_files.push(info);

    // Compactness profile: a family at the window edge is flagged.
    let zero: Vec<CMatrix> = (0..window.len()).map(|_| CMatrix::zeros(2, 2)).collect();
    let mut edge = zero.clone();
    let edge_idx = (window.hi() - window.lo()) as usize;
    edge[edge_idx] = CMatrix::identity(2);
    let profile =
        compactness_profile(&[zero, edge], &bt, &[0.1, 0.01]).map_err(|e| core_err("bundle", e))?;
    report.push(Check::close(
        "compactness_tail_flags_edge_mass",
        profile.tail_sup,
        1.0,
        0.0,
    ));
    report.push(Check::at_least(
        "compactness_sup_norm",
        profile.sup_norm,
        1.0,
        0.0,
    ));

    Ok(report)
}
