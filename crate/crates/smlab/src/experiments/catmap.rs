//! Toral automorphism growth: hyperbolic rate from the cat map,
//! linear-in-k growth from the parabolic map, and the assembled-matrix
//! validation of the transported-mode seminorm.

use std::path::Path;

use smlab_core::gallery::torus::{
    cat_pullback, growth_exponent, torus_commutator_norm, transported_mode_seminorm, CatAuto,
    TorusPoly,
};
use smlab_core::math;

use super::{core_err, RunError};
use crate::config::ExperimentConfig;
use crate::report::{write_csv, Check, Report};

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let kmax = cfg.i64("kmax")?;
    let tol_ratio = cfg.f64("tol_ratio")?;
    let mut report = Report::new("catmap", cfg.echo());

    // Assembled-matrix oracle for the transported-mode seminorm (k ≤ 2).
    let cat = CatAuto::arnold();
    let mut worst_oracle: f64 = 0.0;
    for k in 0..=2 {
        let image = cat
            .transpose()
            .pow_apply((1, 0), -k)
            .map_err(|e| core_err("catmap", e))?;
        let radius = image.0.abs().max(image.1.abs());
        let f = TorusPoly::single_mode(2 * radius, image).map_err(|e| core_err("catmap", e))?;
        let assembled = torus_commutator_norm(&f).map_err(|e| core_err("catmap", e))?;
        let formula =
            transported_mode_seminorm(&cat, (1, 0), k).map_err(|e| core_err("catmap", e))?;
        worst_oracle = worst_oracle.max((assembled - formula).abs());
    }
    report.push(Check::at_most(
        "transported_seminorm_oracle",
        worst_oracle,
        0.0,
        1e-10,
    ));

    // Pullback is an automorphism on modes.
    let f = TorusPoly::single_mode(40, (1, 0)).map_err(|e| core_err("catmap", e))?;
    let round = cat_pullback(
        &cat_pullback(&f, &cat, 3).map_err(|e| core_err("catmap", e))?,
        &cat,
        -3,
    )
    .map_err(|e| core_err("catmap", e))?;
    report.push(Check::close(
        "pullback_round_trip",
        if round.coeffs == f.coeffs { 0.0 } else { 1.0 },
        0.0,
        0.0,
    ));

    // Hyperbolic growth: ratio reaches the spectral radius.
    let rho = cat.spectral_radius();
    let growth = growth_exponent(&cat, (1, 0), kmax).map_err(|e| core_err("catmap", e))?;
    report.push(Check::close(
        "cat_growth_ratio",
        growth.final_ratio,
        rho,
        tol_ratio * rho,
    ));
    report.push(Check::close(
        "cat_spectral_radius",
        rho,
        (3.0 + math::sqrt(5.0)) / 2.0,
        1e-12,
    ));
    // The golden-ratio values (sqrt5 ± 1)/2 sometimes quoted for this
    // matrix disagree with its trace-3 spectrum (3 ± sqrt5)/2: print both
    // candidates next to the measurement and assert the computed one.
    let golden = (math::sqrt(5.0) + 1.0) / 2.0;
    println!(
        "catmap: measured growth ratio {:.12}; computed spectral radius {:.12}; golden-ratio value {:.12}",
        growth.final_ratio, rho, golden
    );
    report.push(Check::at_least(
        "cat_ratio_separates_from_golden_ratio",
        (growth.final_ratio - golden).abs(),
        0.4,
        0.0,
    ));
    // Non-equicontinuity certificate by k = 2.
    report.push(Check::at_least(
        "cat_ratio_exceeds_threshold_by_k2",
        growth.ratios[1],
        1.5,
        0.0,
    ));

    let mut rows = Vec::new();
    for (k, r) in growth.ratios.iter().enumerate() {
        let s =
            transported_mode_seminorm(&cat, (1, 0), k as i64).map_err(|e| core_err("catmap", e))?;
        rows.push(vec![k as f64, s, *r]);
    }
    let info = write_csv(
        out,
        "catmap_growth.csv",
        &["k", "seminorm", "ratio_to_next"],
        &rows,
        "Transported-mode commutator seminorms along the cat-map orbit",
    )?;
    report.csv_files.push(info);

    // Parabolic: fitted power exponent 1 within 0.1.
    let parabolic = CatAuto::parabolic();
    let pg = growth_exponent(&parabolic, (1, 0), (2 * kmax).max(12))
        .map_err(|e| core_err("catmap", e))?;
    report.push(Check::close(
        "parabolic_power_exponent",
        pg.power_exponent,
        1.0,
        0.1,
    ));

    // Identity matrix: flat ratios.
    let id = CatAuto::new([[1, 0], [0, 1]]).map_err(|e| core_err("catmap", e))?;
    let ig = growth_exponent(&id, (1, 1), 4).map_err(|e| core_err("catmap", e))?;
    let flat = ig
        .ratios
        .iter()
        .fold(0.0f64, |m, &r| m.max((r - 1.0).abs()));
    report.push(Check::at_most("identity_ratio_flat", flat, 0.0, 1e-12));

    Ok(report)
}
