//! `dirichlet-lv-lab`: command-line front end for the large-values laboratory.

mod commands;
mod config;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Emitted;
use crate::config::RunConfig;
use crate::failure::Failure;

#[derive(Parser, Debug)]
#[command(name = "dirichlet-lv-lab", version, about = "Large values of Dirichlet polynomials: numerical checks and reports")]
struct Cli {
    /// Line-oriented `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Truncation exponent for the Poisson split.
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exponent table over a σ × n grid (comma-separated rationals).
    BoundsTable {
        #[arg(long, default_value = "")]
        sigma: String,
        #[arg(long, default_value = "")]
        n: String,
        /// Fixed k; the minimizing k in 1..=12 by default.
        #[arg(long)]
        k: Option<u32>,
    },
    /// Gram and Poisson routes to tr(G³) on a random separated set.
    TraceVerify {
        #[arg(long, default_value_t = 64)]
        n: u64,
        #[arg(long, default_value_t = 8)]
        points: usize,
        #[arg(long, default_value_t = 2.0)]
        delta: f64,
    },
    /// Block construction with many large values.
    ConstructExtremal {
        #[arg(long, default_value_t = 4096)]
        n: u64,
        #[arg(long, default_value_t = 0.6)]
        sigma: f64,
        #[arg(long, default_value_t = 0.15)]
        block_eps: f64,
        #[arg(long, default_value_t = 0.3)]
        factor: f64,
    },
    /// J(f) on the Farey and random-interval fixtures.
    JfBench {
        #[arg(long, default_value_t = 8)]
        b: u64,
        #[arg(long, default_value_t = 4096.0)]
        t: f64,
        #[arg(long, default_value_t = 4.0)]
        m: f64,
        #[arg(long, default_value_t = 5.0)]
        c: f64,
    },
    /// Additive energy, level sets and energy bounds for a random set.
    EnergyReport {
        #[arg(long, default_value_t = 30)]
        points: usize,
        #[arg(long, default_value_t = 200.0)]
        length: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 64)]
        n: u64,
        #[arg(long, default_value_t = 0.75)]
        sigma: f64,
    },
    /// Primes in (x, x+y] against y/log x.
    PrimesCheck {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y_exp: Option<f64>,
        #[arg(long)]
        y: Option<u64>,
    },
    /// Critical-line zeros up to a height.
    Zeros {
        #[arg(long, default_value_t = 100.0)]
        height: f64,
    },
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(eps) = cli.eps {
        cfg.eps = eps;
    }
    if let Some(out) = &cli.out {
        cfg.output_path = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Emitted, Failure> {
    let cfg = resolve_config(cli)?;
    let emitted = match &cli.command {
        Command::BoundsTable { sigma, n, k } => commands::bounds_table(&cfg, sigma, n, *k),
        Command::TraceVerify { n, points, delta } => commands::trace_verify(&cfg, *n, *points, *delta),
        Command::ConstructExtremal { n, sigma, block_eps, factor } => {
            commands::construct_extremal(&cfg, *n, *sigma, *block_eps, *factor)
        }
        Command::JfBench { b, t, m, c } => commands::jf_bench(&cfg, *b, *t, *m, *c),
        Command::EnergyReport { points, length, delta, n, sigma } => {
            commands::energy_report(&cfg, *points, *length, *delta, *n, *sigma)
        }
        Command::PrimesCheck { x, y_exp, y } => commands::primes_check(&cfg, *x, *y_exp, *y),
        Command::Zeros { height } => commands::zeros(&cfg, *height),
    }?;
    match &cfg.output_path {
        Some(path) => std::fs::write(path, &emitted.body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => print!("{}", emitted.body),
    }
    Ok(emitted)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(e) if e.failed.is_empty() => ExitCode::SUCCESS,
        Ok(e) => {
            for f in &e.failed {
                eprintln!("assertion failed: {f}");
            }
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
