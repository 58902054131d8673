//! `smlab <experiment> [--config FILE] [--seed U64] [--out DIR] [--key value ...]`
//!
//! Exit codes: 0 all checks pass, 1 some check failed, 2 usage or
//! configuration error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use smlab::config::ExperimentConfig;
use smlab::experiments;

fn usage() -> String {
    let experiments = smlab::EXPERIMENTS.join(", ");
    format!(
        "usage: smlab <experiment> [--config FILE] [--seed U64] [--out DIR] [--key value ...]\n\
         experiments: {experiments}, all\n\
         any --key value pair overrides the config file; see README for keys"
    )
}

struct Args {
    experiment: String,
    config_file: Option<PathBuf>,
    out: PathBuf,
    overrides: Vec<(String, String)>,
}

fn parse_args(argv: &[String]) -> Result<Args, String> {
    let mut experiment = None;
    let mut config_file = None;
    let mut out = PathBuf::from("out");
    let mut overrides = Vec::new();
    let mut it = argv.iter().peekable();
    while let Some(arg) = it.next() {
        if let Some(key) = arg.strip_prefix("--") {
            let value = it
                .next()
                .ok_or_else(|| format!("missing value for --{key}"))?;
            match key {
                "config" => config_file = Some(PathBuf::from(value)),
                "out" => out = PathBuf::from(value),
                _ => overrides.push((key.to_string(), value.clone())),
            }
        } else if experiment.is_none() {
            experiment = Some(arg.clone());
        } else {
            return Err(format!("unexpected positional argument `{arg}`"));
        }
    }
    let experiment = experiment.ok_or_else(|| "missing experiment name".to_string())?;
    Ok(Args {
        experiment,
        config_file,
        out,
        overrides,
    })
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let args = match parse_args(&argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}\n{}", usage());
            return ExitCode::from(2);
        }
    };
    let file_body = match &args.config_file {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(body) => Some(body),
            Err(e) => {
                eprintln!("error: cannot read config {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    let cfg =
        match ExperimentConfig::resolve(&args.experiment, file_body.as_deref(), &args.overrides) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e}\n{}", usage());
                return ExitCode::from(2);
            }
        };

    let started = Instant::now();
    let report = match experiments::run(&cfg, &args.out) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = report.write_to(&args.out) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }

    // Timing stays on the console: report.json is byte-deterministic.
    let elapsed = started.elapsed();
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    println!(
        "{}: {} checks, {} failed, {:.2?} (report: {})",
        report.experiment,
        report.checks.len(),
        failed.len(),
        elapsed,
        args.out.join("report.json").display()
    );
    for name in &failed {
        println!("  FAIL {name}");
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
