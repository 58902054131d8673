//! Library-level experiment smoke tests: default configurations pass
//! and reports carry the advertised structure.

use smlab::config::ExperimentConfig;
use smlab::experiments;

fn run_default(name: &str, tag: &str) -> smlab::Report {
    let out = std::env::temp_dir().join(format!("smlab-smoke-{tag}"));
    let _ = std::fs::remove_dir_all(&out);
    let cfg = ExperimentConfig::resolve(name, None, &[]).unwrap();
    experiments::run(&cfg, &out).unwrap()
}

#[test]
fn transport_defaults_pass_kr_duality() {
    let report = run_default("transport", "transport");
    assert!(report.pass);
    let kr = report
        .checks
        .iter()
        .find(|c| c.name.starts_with("kantorovich_rubinstein_gap"))
        .expect("KR check present");
    assert!(kr.pass);
    assert!(report.checks.iter().any(|c| c.name.contains("cdf_oracle")));
}

#[test]
fn zmetric_defaults_pass_with_convergence_data() {
    let report = run_default("zmetric", "zmetric");
    assert!(report.pass);
    assert!(report
        .convergence
        .iter()
        .any(|c| c.name == "fifth_smallest_abs_eigenvalue"));
    assert!(!report.csv_files.is_empty());
}
