//! Real-multiplication noncommutative tori: field setup, cocycle
//! identities, commutator norms from the lattice embedding, hyperbolic
//! orbit growth at rate ε, and the crossed-product identities.

use std::path::Path;

use smlab_core::gallery::rm::{
    cocycle_defect, mode_box, orbit_decompose, rm_commutator_norm, rm_growth_ratios, rm_setup,
    sl2_invariance_defect, RmCrossed,
};
use smlab_core::math;
use smlab_core::rng::SplitMix64;
use smlab_core::zline::Window;

use super::{core_err, RunError};
use crate::config::ExperimentConfig;
use crate::report::{write_csv, Check, Report};

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let kmax = cfg.i64("kmax")?;
    let cutoff = cfg.i64("cutoff")?;
    let tol_ratio = cfg.f64("tol_ratio")?;
    let mut rng = SplitMix64::new(cfg.u64("seed")?);
    let mut report = Report::new("nctorus", cfg.echo());

    let mut growth_rows = Vec::new();
    for d in [2u64, 5] {
        let field = rm_setup(d).map_err(|e| core_err("nctorus", e))?;
        let (norm_defect, rel_defect, moebius) = field.relation_defects();
        report.push(Check::at_most(
            format!("d{d}_unit_norm_defect"),
            norm_defect,
            0.0,
            1e-12,
        ));
        report.push(Check::at_most(
            format!("d{d}_matrix_relations"),
            rel_defect,
            0.0,
            1e-12,
        ));
        report.push(Check::at_most(
            format!("d{d}_moebius_fixed_point"),
            moebius,
            0.0,
            1e-10,
        ));
        report.push(Check::close(
            format!("d{d}_det_phi"),
            field.det_phi() as f64,
            1.0,
            0.0,
        ));

        // Hyperbolic growth of commutator norms along the unit orbit.
        let ratios = rm_growth_ratios(&field, (1, 0), kmax).map_err(|e| core_err("nctorus", e))?;
        let last = *ratios.last().expect("kmax >= 1");
        report.push(Check::close(
            format!("d{d}_growth_ratio_vs_eps"),
            last,
            field.eps,
            tol_ratio * field.eps,
        ));
        report.push(Check::at_least(
            format!("d{d}_ratio_exceeds_threshold_by_k2"),
            ratios[1],
            1.5,
            0.0,
        ));
        for (k, r) in ratios.iter().enumerate() {
            growth_rows.push(vec![d as f64, (k + 1) as f64, *r, field.eps]);
        }

        // Exact integer cocycle identity and SL2 invariance.
        let mut cocycle_bad = 0u64;
        let mut sl2_bad = 0u64;
        for _ in 0..200 {
            let r = |rng: &mut SplitMix64| {
                (
                    rng.next_below(21) as i64 - 10,
                    rng.next_below(21) as i64 - 10,
                )
            };
            let g1 = r(&mut rng);
            let g2 = r(&mut rng);
            let g3 = r(&mut rng);
            if cocycle_defect(g1, g2, g3) != 0 {
                cocycle_bad += 1;
            }
            if sl2_invariance_defect(&field, g1, g2).map_err(|e| core_err("nctorus", e))? != 0 {
                sl2_bad += 1;
            }
        }
        report.push(Check::close(
            format!("d{d}_cocycle_identity_failures"),
            cocycle_bad as f64,
            0.0,
            0.0,
        ));
        report.push(Check::close(
            format!("d{d}_sl2_invariance_failures"),
            sl2_bad as f64,
            0.0,
            0.0,
        ));

        // Commutator norms equal the Euclidean length of the embedding.
        let modes = mode_box(cutoff);
        let mut worst_norm: f64 = 0.0;
        for eta in [(1i64, 0i64), (0, 1), (1, 1), (-1, 2)] {
            let assembled =
                rm_commutator_norm(&modes, &field, eta).map_err(|e| core_err("nctorus", e))?;
            let (x1, x2) = field.embed(eta);
            worst_norm = worst_norm.max((assembled - math::hypot(x1, x2)).abs());
        }
        report.push(Check::at_most(
            format!("d{d}_commutator_norm_defect"),
            worst_norm,
            0.0,
            1e-10,
        ));

        // Crossed-product identities on the orbit window.
        let crossed = RmCrossed::new(
            field.clone(),
            cutoff,
            Window::new(3).map_err(|e| core_err("nctorus", e))?,
        );
        report.push(Check::at_most(
            format!("d{d}_unit_commutator_identity"),
            crossed.unit_commutator_defect(),
            0.0,
            1e-13,
        ));
        let mus = [(1i64, 0i64), (0, 1), (1, 1), (1, -1)];
        let lams: Vec<(i64, i64)> = crossed
            .window
            .iter()
            .map(|n| {
                let mu = mus[((n - crossed.window.lo()) as usize) % mus.len()];
                crossed.field.apply_phi(mu, n).expect("small powers")
            })
            .collect();
        report.push(Check::close(
            format!("d{d}_unit_covariance_identity"),
            crossed
                .covariance_defect(&lams)
                .map_err(|e| core_err("nctorus", e))?,
            0.0,
            0.0,
        ));
        report.push(Check::close(
            format!("d{d}_blockwise_commutator_identity"),
            crossed
                .blockwise_commutator_defect(&lams)
                .map_err(|e| core_err("nctorus", e))?,
            0.0,
            0.0,
        ));

        // Orbit decomposition: uniqueness of the sector, exact k-advance,
        // and invariance of the field norm.
        let mut worst_norm_inv: f64 = 0.0;
        let mut advance_failures = 0u64;
        for _ in 0..25 {
            let lam = loop {
                let cand = (rng.next_below(9) as i64 - 4, rng.next_below(9) as i64 - 4);
                if cand != (0, 0) {
                    break cand;
                }
            };
            let (mu, k) = orbit_decompose(lam, &field).map_err(|e| core_err("nctorus", e))?;
            let back = field.apply_phi(mu, k).map_err(|e| core_err("nctorus", e))?;
            if back != lam {
                advance_failures += 1;
            }
            let (mu2, k2) = orbit_decompose(
                field
                    .apply_phi(lam, 1)
                    .map_err(|e| core_err("nctorus", e))?,
                &field,
            )
            .map_err(|e| core_err("nctorus", e))?;
            if mu2 != mu || k2 != k + 1 {
                advance_failures += 1;
            }
            worst_norm_inv =
                worst_norm_inv.max((field.field_norm(back) - field.field_norm(mu)).abs());
        }
        report.push(Check::close(
            format!("d{d}_orbit_roundtrip_failures"),
            advance_failures as f64,
            0.0,
            0.0,
        ));
        report.push(Check::at_most(
            format!("d{d}_orbit_norm_invariance"),
            worst_norm_inv,
            0.0,
            1e-9,
        ));
    }

    let info = write_csv(
        out,
        "nctorus_growth.csv",
        &["d", "k", "ratio", "eps"],
        &growth_rows,
        "Orbit growth ratios of commutator norms against the fundamental unit",
    )?;
    report.csv_files.push(info);

    Ok(report)
}
