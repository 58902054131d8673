//! Block-code invariants: parameters, structure function and entropy,
//! zeta partial sums with the geometric remainder, the coordinate-plane
//! property of the minimum distance, and field-extension codes. Also
//! exercises the plain-text code format end to end.

use std::path::Path;

use smlab_core::codes::{
    code_params, code_zeta, coordinate_plane_check, entropy, extend_code, hausdorff_dims,
    structure_function, structure_function_by_enumeration, Code,
};

use super::{core_err, RunError};
use crate::config::ExperimentConfig;
use crate::report::{write_csv, Check, Report};

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let m_max = cfg.usize("m_max")?;
    let zeta_terms = cfg.usize("zeta_terms")?;
    let mut report = Report::new("codes", cfg.echo());

    let corpus: Vec<(&str, Code)> = vec![
        ("repetition3", Code::repetition(3)),
        ("hamming74", Code::hamming_7_4()),
    ];

    let mut zeta_rows = Vec::new();
    for (name, code) in &corpus {
        let params = code_params(code).map_err(|e| core_err("codes", e))?;
        match *name {
            "repetition3" => {
                report.push(Check::close("repetition3_k", params.k, 1.0, 1e-12));
                report.push(Check::close("repetition3_d", params.d as f64, 3.0, 0.0));
                report.push(Check::close(
                    "repetition3_rate",
                    params.rate,
                    1.0 / 3.0,
                    1e-12,
                ));
                report.push(Check::close("repetition3_delta", params.delta, 1.0, 0.0));
            }
            "hamming74" => {
                report.push(Check::close("hamming74_k", params.k, 4.0, 1e-12));
                report.push(Check::close("hamming74_d", params.d as f64, 3.0, 0.0));
                report.push(Check::close(
                    "hamming74_rate",
                    params.rate,
                    4.0 / 7.0,
                    1e-12,
                ));
                report.push(Check::close(
                    "hamming74_delta",
                    params.delta,
                    3.0 / 7.0,
                    1e-12,
                ));
            }
            _ => unreachable!(),
        }

        // Structure function: closed form against enumeration; entropy
        // equals the rate.
        let mut worst_structure = 0.0f64;
        for m in 1..=3usize {
            let closed = structure_function(code, code.block_length() * m);
            let enumerated =
                structure_function_by_enumeration(code, m).map_err(|e| core_err("codes", e))?;
            worst_structure = worst_structure.max((closed as f64 - enumerated as f64).abs());
        }
        report.push(Check::close(
            format!("{name}_structure_enumeration"),
            worst_structure,
            0.0,
            0.0,
        ));
        let mut worst_entropy = 0.0f64;
        for m in 1..=(2 * m_max) {
            worst_entropy = worst_entropy.max((entropy(code, m) - params.rate).abs());
        }
        report.push(Check::at_most(
            format!("{name}_entropy_equals_rate"),
            worst_entropy,
            0.0,
            1e-9,
        ));

        // Hausdorff dimensions.
        let (dim, normalized) = hausdorff_dims(code);
        report.push(Check::close(
            format!("{name}_hausdorff_dim"),
            dim,
            params.k,
            1e-12,
        ));
        report.push(Check::close(
            format!("{name}_hausdorff_normalized"),
            normalized,
            params.rate,
            1e-12,
        ));

        // Zeta partial sums within the geometric remainder bound, and
        // divergence exactly at s = R. Both closed-form conventions go
        // into the CSV: the block form x/(1-x) the series sums to, and
        // the per-letter form that agrees only at block length 1.
        let mut worst_zeta = f64::NEG_INFINITY;
        for ds in [0.1, 0.5, 1.0] {
            let z = code_zeta(code, params.rate + ds, zeta_terms);
            let cf = z.closed_form.expect("convergent");
            let rem = z.remainder_bound.expect("convergent");
            worst_zeta = worst_zeta.max((cf - z.partial_sum).abs() - rem);
            let per_letter = z.per_letter_closed_form.unwrap_or(f64::INFINITY);
            zeta_rows.push(vec![params.rate + ds, z.partial_sum, cf, per_letter, rem]);
        }
        report.push(Check::at_most(
            format!("{name}_zeta_remainder_excess"),
            worst_zeta,
            0.0,
            1e-12,
        ));
        let at_rate = code_zeta(code, params.rate, 50);
        report.push(Check::close(
            format!("{name}_zeta_divergent_at_rate"),
            if at_rate.divergent { 1.0 } else { 0.0 },
            1.0,
            0.0,
        ));

        // Coordinate-plane property: ≤ 1 point below d, a witness at d.
        let mut worst_below = 0usize;
        for ell in 0..params.d {
            worst_below = worst_below.max(coordinate_plane_check(code, ell).max_points);
        }
        report.push(Check::close(
            format!("{name}_planes_below_d_meet_once"),
            worst_below as f64,
            1.0,
            0.0,
        ));
        let at_d = coordinate_plane_check(code, params.d);
        report.push(Check::at_least(
            format!("{name}_plane_at_d_witness"),
            at_d.max_points as f64,
            2.0,
            0.0,
        ));

        // Field extensions: cardinality and rate exact, δ non-increasing.
        let mut worst_rate = 0.0f64;
        let mut delta_excess = f64::NEG_INFINITY;
        let mut card_ok = true;
        for m in 1..=m_max {
            let ext = extend_code(code, m).map_err(|e| core_err("codes", e))?;
            card_ok &= ext.len() as u64 == (code.len() as u64).pow(m as u32);
            let p = code_params(&ext).map_err(|e| core_err("codes", e))?;
            worst_rate = worst_rate.max((p.rate - params.rate).abs());
            delta_excess = delta_excess.max(p.delta - params.delta);
        }
        report.push(Check::close(
            format!("{name}_extension_cardinality"),
            if card_ok { 1.0 } else { 0.0 },
            1.0,
            0.0,
        ));
        report.push(Check::at_most(
            format!("{name}_extension_rate_defect"),
            worst_rate,
            0.0,
            1e-12,
        ));
        report.push(Check::at_most(
            format!("{name}_extension_delta_excess"),
            delta_excess,
            0.0,
            1e-12,
        ));

        // External format: write, reparse, compare.
        let path = out.join(format!("codes_{name}.txt"));
        std::fs::create_dir_all(out)?;
        std::fs::write(&path, code.to_text())?;
        let parsed =
            Code::parse(&std::fs::read_to_string(&path)?).map_err(|e| core_err("codes", e))?;
        report.push(Check::close(
            format!("{name}_text_round_trip"),
            if parsed == *code { 0.0 } else { 1.0 },
            0.0,
            0.0,
        ));
    }

    let info = write_csv(
        out,
        "codes_zeta.csv",
        &[
            "s",
            "partial_sum",
            "block_closed_form",
            "per_letter_closed_form",
            "remainder_bound",
        ],
        &zeta_rows,
        "Zeta partial sums against the block closed form x/(1-x) with x = q^{(R-s)n}, \
         next to the per-letter variant q^{R-s}/(1-q^{R-s}) that matches only at n = 1",
    )?;
    report.csv_files.push(info);

    Ok(report)
}
