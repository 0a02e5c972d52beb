//! Experiment CLI for SMC-based posterior Cramer-Rao lower bound runs.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on numerical
//! failures (the failing sequence and step go to stderr).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pcrlb_core::harness::{self, sig9, RunConfig, RunReport};
use pcrlb_core::Error;

#[derive(Parser)]
#[command(name = "pcrlb", version, about = "Particle-based posterior Cramer-Rao lower bound runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a run described by a TOML config file.
    Run {
        /// Path to the config file (keys: model, case, n_particles,
        /// m_sequences, horizon_steps, seed, emit_theory, out_dir).
        #[arg(long)]
        config: PathBuf,
    },
    /// Execute a named preset, optionally overriding its parameters.
    Preset {
        /// Preset name; `pcrlb presets` lists them.
        name: String,
        /// Particle count override.
        #[arg(long)]
        n: Option<usize>,
        /// Sequence count override.
        #[arg(long)]
        m: Option<usize>,
        /// Horizon override (steps).
        #[arg(long)]
        t: Option<usize>,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for bound.csv / lambda.csv / config.toml.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full-size ensembles where the preset defines them.
        #[arg(long)]
        paper_scale: bool,
        /// Worker threads (results are identical for any count).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// List the available presets.
    Presets,
}

fn print_summary(report: &RunReport) {
    let cfg = &report.config;
    println!(
        "model {} case {}  N={} M={} T={} seed={}",
        cfg.model.as_str(),
        cfg.case.as_deref().unwrap_or("-"),
        cfg.n_particles,
        cfg.m_sequences,
        cfg.horizon_steps,
        cfg.seed,
    );
    for note in &report.notes {
        println!("note: {note}");
    }
    if let Some(lambda) = &report.lambda {
        let diag: Vec<String> = lambda.diagonal().iter().map(|v| sig9(*v)).collect();
        println!("lambda_jj: {}", diag.join(", "));
    }
    println!("per-sequence time: {:.3} s", report.per_sequence_secs);
    if let Some(dir) = &cfg.out_dir {
        println!("outputs in {}", dir.display());
    }
}

fn execute(config: &RunConfig) -> Result<(), Error> {
    let report = harness::run(config)?;
    print_summary(&report);
    Ok(())
}

fn run_command(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            execute(&RunConfig::from_toml(&text)?)
        }
        Command::Preset { name, n, m, t, seed, out, paper_scale, workers } => {
            let mut cfg = harness::preset(&name, paper_scale)
                .ok_or_else(|| Error::Config(format!("unknown preset \"{name}\"")))?;
            if let Some(n) = n {
                cfg.n_particles = n;
            }
            if let Some(m) = m {
                cfg.m_sequences = m;
            }
            if let Some(t) = t {
                cfg.horizon_steps = t;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            cfg.out_dir = out;
            cfg.workers = workers;
            cfg.validate()?;
            execute(&cfg)
        }
        Command::Presets => {
            for p in harness::presets() {
                println!("{}\n    {}", p.name, p.note);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // die quietly when the output pipe closes early (e.g. piping into head)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run_command(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) => ExitCode::from(2),
                Error::Io(_) => ExitCode::from(1),
                _ => ExitCode::from(3),
            }
        }
    }
}
