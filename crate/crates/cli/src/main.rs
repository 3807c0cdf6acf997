use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hypertuple_cli::config::ExperimentConfig;
use hypertuple_cli::report::REPORT_SCHEMA_VERSION;
use hypertuple_cli::{load_config, run, Command, Diagnostic, ToleranceOverrides, DEFAULT_SEED};
use hypertuple_core::numkit::Tolerance;

#[derive(Parser)]
#[command(name = "hypertuple", version, about = "Minimal hypercyclic tuples of matrices")]
struct Cli {
    /// RNG seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance overrides, e.g. `rank_tol=1e-9,cluster_tol=1e-6`.
    #[arg(long, global = true)]
    tol: Option<ToleranceOverrides>,
    /// Write the run report here instead of stdout.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// CSV of orbit points (orbit, verify).
    #[arg(long, global = true)]
    csv_out: Option<PathBuf>,
    /// Expected verdict; the exit status is 1 when it differs.
    #[arg(long, global = true)]
    expect: Option<String>,
    #[command(subcommand)]
    command: Top,
}

#[derive(Subcommand)]
enum Top {
    #[command(flatten)]
    Experiment(Command),
    /// Rerun a saved config, or the config echoed in a report.
    Run { config: PathBuf },
}

fn fail(d: &Diagnostic) -> ExitCode {
    eprintln!("{}", d.to_json());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = cli.tol.unwrap_or_default();
    let config = match cli.command {
        Top::Experiment(command) => ExperimentConfig {
            schema_version: REPORT_SCHEMA_VERSION,
            command,
            seed: cli.seed.unwrap_or(DEFAULT_SEED),
            tolerance: overrides.apply(Tolerance::default()),
            json_out: cli.json_out,
            csv_out: cli.csv_out,
            expect: cli.expect,
        },
        Top::Run { config } => {
            let mut c = match load_config(&config) {
                Ok(c) => c,
                Err(d) => return fail(&d),
            };
            c.seed = cli.seed.unwrap_or(c.seed);
            c.tolerance = overrides.apply(c.tolerance);
            c.json_out = cli.json_out.or(c.json_out);
            c.csv_out = cli.csv_out.or(c.csv_out);
            c.expect = cli.expect.or(c.expect);
            c
        }
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(d) => return fail(&d),
    };
    if config.json_out.is_none() {
        match serde_json::to_string_pretty(&report) {
            Ok(s) => println!("{s}"),
            Err(e) => return fail(&Diagnostic::new(hypertuple_cli::Stage::Output, "Serialize", e.to_string())),
        }
    }
    match report.expectation_met {
        Some(false) => {
            eprintln!(
                "expected verdict {:?}, got {:?}",
                config.expect.unwrap_or_default(),
                report.verdict.unwrap_or_default()
            );
            ExitCode::from(1)
        }
        _ => ExitCode::SUCCESS,
    }
}
