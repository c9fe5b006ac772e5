//! Command-line driver: synthesize blurred color images, restore them with
//! the tensor Krylov solvers, compare solvers, and run the self-checks.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use checks::{run_checks, CheckLevel, CheckOutcome, Kernels};
pub use commands::{cmd_bench, cmd_deblur, cmd_synth, render_table, MetricsRow};
pub use config::{Choice, RunConfig};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "dctensor", version, about = "Tensor Krylov deblurring of color images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write ground truth, blurred and noisy images plus a manifest.
    Synth(RunArgs),
    /// Restore the observed image with one solver.
    Deblur(RunArgs),
    /// Run several solvers on the same problem and tabulate them.
    Bench(RunArgs),
    /// Run the oracle and invariant checks.
    Check {
        #[arg(value_enum, default_value = "quick")]
        level: CheckLevel,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Flags shared by the problem-running commands. Each overrides the
/// matching key of `--config`.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// PNG or CT3 ground truth instead of a pattern.
    #[arg(long, value_name = "PATH")]
    pub image: Option<PathBuf>,
    /// checkerboard, radial or random-smooth.
    #[arg(long, value_name = "NAME")]
    pub pattern: Option<String>,
    #[arg(long, value_name = "N")]
    pub size: Option<usize>,
    #[arg(long, value_name = "F")]
    pub sigma: Option<f64>,
    #[arg(long, value_name = "R")]
    pub band: Option<usize>,
    /// Relative noise level ‖N‖/‖C‖.
    #[arg(long, value_name = "F")]
    pub noise: Option<f64>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// One solver for deblur; a comma-separated list for bench.
    #[arg(long, value_name = "gmres|gk|lsqr", value_delimiter = ',')]
    pub solver: Vec<String>,
    #[arg(long, value_name = "M")]
    pub restart: Option<usize>,
    #[arg(long, value_name = "M")]
    pub steps: Option<usize>,
    #[arg(long, value_name = "F")]
    pub tol: Option<f64>,
    #[arg(long, value_name = "gcv|FLOAT")]
    pub lambda: Option<String>,
    #[arg(long, value_name = "lcurve|INT")]
    pub kopt: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    /// The config file (or defaults) with every given flag applied on top.
    pub fn to_config(&self, bench: bool) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let p = &mut cfg.problem;
        if let Some(v) = &self.image {
            p.image = Some(v.clone());
        }
        if let Some(v) = &self.pattern {
            p.pattern = v.clone();
            p.image = None;
        }
        set(&mut p.size, self.size);
        set(&mut p.sigma, self.sigma);
        set(&mut p.band, self.band);
        set(&mut p.noise, self.noise);
        set(&mut p.seed, self.seed);
        let s = &mut cfg.solver;
        if !self.solver.is_empty() {
            if bench {
                s.bench = self.solver.clone();
            } else if let [one] = self.solver.as_slice() {
                s.kind = one.clone();
            } else {
                return Err(CliError::Config("deblur takes exactly one --solver".into()));
            }
        }
        set(&mut s.restart, self.restart);
        if self.steps.is_some() {
            s.steps = self.steps;
        }
        set(&mut s.tol, self.tol);
        if let Some(v) = &self.lambda {
            s.lambda = Choice::parse_flag(v);
        }
        if let Some(v) = &self.kopt {
            s.kopt = Choice::parse_flag(v);
        }
        if let Some(v) = &self.out {
            cfg.output.dir = v.clone();
        }
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

/// Runs one parsed command, printing its report to stdout.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Synth(args) => {
            let out = cmd_synth(&args.to_config(false)?)?;
            let c = &out.manifest.computed;
            println!(
                "synthesized {0}×{0}×3 problem {1}: realized noise {2:.3e}, observed relative error {3:.4e}",
                c.size, c.problem_hash, c.realized_noise, c.observed_relative_error
            );
            for f in &out.files {
                println!("  {}", f.display());
            }
            Ok(())
        }
        Command::Deblur(args) => {
            let out = cmd_deblur(&args.to_config(false)?)?;
            print!("{}", render_table(std::slice::from_ref(&out.row)));
            Ok(())
        }
        Command::Bench(args) => {
            let rows = cmd_bench(&args.to_config(true)?)?;
            print!("{}", render_table(&rows));
            Ok(())
        }
        Command::Check { level, seed } => {
            let outcomes = run_checks(level, &Kernels::default(), seed);
            let mut failed = 0;
            for o in &outcomes {
                let tag = if o.passed { "PASS" } else { "FAIL" };
                println!("{tag} {:<32} {} [{:.2}s]", o.name, o.detail, o.seconds);
                failed += usize::from(!o.passed);
            }
            println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
            if failed == 0 {
                Ok(())
            } else {
                Err(CliError::ChecksFailed(failed))
            }
        }
    }
}
