use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use z3orb_verify::{emit_report, run_suite, ConfigOverrides, Format, RunReport, Suite, SuiteConfig, CONFIG_ENV};

/// Run verification suites and report the results.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Highest weight grade for the Fock and quotient suites (at least 2).
    #[arg(long)]
    max_weight: Option<i64>,
    /// Truncation of the exact q-series, a positive rational such as 12 or 25/2.
    #[arg(long)]
    q_trunc: Option<String>,
    /// Truncation used for numerical evaluation.
    #[arg(long)]
    numeric_q_trunc: Option<i64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative tolerance of the numerical checks.
    #[arg(long)]
    tolerance: Option<f64>,
    /// JSON config file with defaults; falls back to $Z3ORB_CONFIG.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn configure(args: Args) -> Result<SuiteConfig, String> {
    let mut cfg = SuiteConfig::default();
    if let Some(path) = args.config.or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from)) {
        ConfigOverrides::from_file(&path).and_then(|o| o.apply(&mut cfg)).map_err(|e| e.to_string())?;
    }
    let flags = ConfigOverrides {
        suite: args.suite,
        max_weight: args.max_weight,
        q_trunc: args.q_trunc,
        numeric_q_trunc: args.numeric_q_trunc,
        tolerance: args.tolerance,
        format: args.format,
        out: args.out,
    };
    flags.apply(&mut cfg).map_err(|e| e.to_string())?;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match configure(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = run_suite(&cfg);
    let bytes = emit_report(&report, cfg.format);
    let written = match &cfg.output_path {
        Some(p) => std::fs::write(p, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if report.exit_code == 2 {
        if let Some(it) = report.items.first() {
            eprintln!("error: {}", it.detail);
        }
    }
    ExitCode::from(exit_byte(&report))
}

fn exit_byte(r: &RunReport) -> u8 {
    r.exit_code.clamp(0, 2) as u8
}
