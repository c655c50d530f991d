use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use entireops::config::parse_config;
use entireops::report::{run_command, write_outputs, Command};

/// Exit codes: 0 PASS, 1 FAIL, 2 INCONCLUSIVE, 3 runtime or configuration error.
#[derive(Parser, Debug)]
#[command(name = "entireops", version, about)]
struct Cli {
    /// One of check, check32, borel, apply, inverse, zeros, bg, orbit.
    command: Command,
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for `<command>_report.json` and CSV sidecars.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides `n_max` from the config.
    #[arg(long)]
    nmax: Option<usize>,
    /// Overrides `k_max` from the config.
    #[arg(long)]
    kmax: Option<usize>,
    /// Suppresses the summary on stdout.
    #[arg(long)]
    quiet: bool,
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("ENTIREOPS_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("ENTIREOPS_THREADS = `{v}` must be a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<i32, String> {
    configure_threads()?;
    let mut cfg = parse_config(&cli.config).map_err(|e| e.to_string())?;
    if let Some(n) = cli.nmax {
        cfg.n_max = n;
    }
    if let Some(k) = cli.kmax {
        cfg.k_max = k;
    }
    let mut report = run_command(cli.command, &cfg).map_err(|e| e.to_string())?;
    let path = write_outputs(&mut report, &cli.out).map_err(|e| e.to_string())?;
    if !cli.quiet {
        println!("{} {}", report.command, report.verdict);
        for line in &report.summary {
            println!("  {line}");
        }
        println!("report: {}", path.display());
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
