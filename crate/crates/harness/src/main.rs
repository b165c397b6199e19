use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bivar_harness::ceilings::{Ceilings, CALIBRATION_FACTOR};
use bivar_harness::config::{ExperimentConfig, Overrides};
use bivar_harness::report::{unix_now, write_outputs};
use bivar_harness::suites::{calibrate, run_suite, SuiteError};
use clap::{Parser, Subcommand};

/// Runs the checks of one suite and writes a CSV per check plus a manifest.
#[derive(Debug, Parser)]
#[command(name = "bivar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a suite: identities, domination, carleson, cz, square,
    /// counterexample, interp, ergodic or sweep.
    Run {
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Measure every tracked constant and write ceilings at four times the
    /// largest value seen.
    Calibrate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "ceilings.toml")]
        out: PathBuf,
    },
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn load(config: Option<&PathBuf>) -> Result<ExperimentConfig, SuiteError> {
    Ok(match config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    })
}

fn exit_for(e: &SuiteError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(match e {
        SuiteError::Config(_) => EXIT_CONFIG,
        SuiteError::Core(_) => EXIT_FAIL,
    })
}

fn run(suite: &str, cfg: ExperimentConfig) -> ExitCode {
    let ceilings = match Ceilings::load(cfg.ceilings.as_deref()) {
        Ok(c) => c,
        Err(e) => return exit_for(&e.into()),
    };
    let started = unix_now();
    let clock = Instant::now();
    let mut checks = match run_suite(suite, &cfg) {
        Ok(c) => c,
        Err(e) => return exit_for(&e),
    };
    ceilings.apply(&mut checks);
    if let Err(e) = write_outputs(&cfg.out, suite, &cfg, &checks, started, clock.elapsed()) {
        eprintln!("error: cannot write reports to {}: {e}", cfg.out.display());
        return ExitCode::from(EXIT_FAIL);
    }
    let mut pass = true;
    for c in &checks {
        let status = match (c.gating, c.pass) {
            (true, true) => "pass",
            (true, false) => "FAIL",
            (false, _) => "info",
        };
        pass &= !c.gating || c.pass;
        println!("{status:4} {:40} {}", c.name, c.summary);
    }
    println!("reports in {} ({:.1} s)", cfg.out.display(), clock.elapsed().as_secs_f64());
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("BVAR_THREADS").ok().and_then(|v| v.parse().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Run { suite, config, seed, out, trials, grid } => {
            let mut cfg = match load(config.as_ref()) {
                Ok(c) => c,
                Err(e) => return exit_for(&e),
            };
            cfg.apply(&Overrides { seed, out, trials, grid });
            run(&suite, cfg)
        }
        Command::Calibrate { config, trials, seed, out } => {
            let mut cfg = match load(config.as_ref()) {
                Ok(c) => c,
                Err(e) => return exit_for(&e),
            };
            cfg.apply(&Overrides { seed, ..Default::default() });
            let clock = Instant::now();
            let maxima = match calibrate(&cfg, trials) {
                Ok(m) => m,
                Err(e) => return exit_for(&e),
            };
            let ceilings = Ceilings(maxima.iter().map(|(k, v)| (k.clone(), CALIBRATION_FACTOR * v)).collect());
            let mut header = format!(
                "{CALIBRATION_FACTOR} x the largest value over {trials} trials, seed {}, grid {}\nlargest values:",
                cfg.seed, cfg.grid
            );
            for (k, v) in &maxima {
                header.push_str(&format!("\n  {k} = {v:?}"));
            }
            if let Err(e) = std::fs::write(&out, ceilings.render(&header)) {
                eprintln!("error: cannot write {}: {e}", out.display());
                return ExitCode::from(EXIT_FAIL);
            }
            println!("wrote {} ({:.1} s)", out.display(), clock.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
    }
}
