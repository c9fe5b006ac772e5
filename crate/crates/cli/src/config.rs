//! Run configuration: a TOML document with `[problem]`, `[solver]` and
//! `[output]` sections. Every key has a default, and command-line flags
//! override whatever the file says.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dctensor::imaging::{BlurModel, CrossChannelSpec, GaussianBlurSpec, Pattern, PAPER_MIXING};
use dctensor::solvers::{KOptMode, LambdaMode, SolverConfig, SolverKind, DEFAULT_GK_STEPS, DEFAULT_LSQR_STEPS};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Either a named automatic rule (`gcv`, `lcurve`) or an explicit value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Choice<N> {
    Value(N),
    Rule(String),
}

impl<N: FromStr> Choice<N> {
    /// Parses a flag value: a number, or anything else as a rule name.
    pub fn parse_flag(s: &str) -> Self {
        match s.parse() {
            Ok(v) => Choice::Value(v),
            Err(_) => Choice::Rule(s.trim().to_ascii_lowercase()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSection {
    /// PNG or CT3 ground truth. Overrides `pattern` and `size` when set.
    pub image: Option<PathBuf>,
    pub pattern: String,
    pub size: usize,
    pub sigma: f64,
    pub band: usize,
    /// Vertical blur; defaults to the horizontal one.
    pub sigma2: Option<f64>,
    pub band2: Option<usize>,
    pub mixing: [[f64; 3]; 3],
    pub noise: f64,
    pub seed: u64,
}

impl Default for ProblemSection {
    fn default() -> Self {
        Self {
            image: None,
            pattern: Pattern::RandomSmooth.name().into(),
            size: 64,
            sigma: 4.0,
            band: 6,
            sigma2: None,
            band2: None,
            mixing: PAPER_MIXING,
            noise: 1e-3,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    /// Solver for `deblur`.
    pub kind: String,
    /// Solvers for `bench`.
    pub bench: Vec<String>,
    pub restart: usize,
    pub max_outer: usize,
    /// Golub-Kahan steps or LSQR cap; per-solver default when absent.
    pub steps: Option<usize>,
    pub tol: f64,
    pub lambda: Choice<f64>,
    pub kopt: Choice<usize>,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            kind: SolverKind::Gk.name().into(),
            bench: SolverKind::ALL.iter().map(|k| k.name().to_string()).collect(),
            restart: d.restart_m,
            max_outer: d.max_outer_iterations,
            steps: None,
            tol: d.tolerance,
            lambda: Choice::Rule("gcv".into()),
            kopt: Choice::Rule("lcurve".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub images: bool,
    pub csv: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            images: true,
            csv: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSection,
    pub solver: SolverSection,
    pub output: OutputSection,
}

/// Where the ground truth comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Pattern(Pattern),
    Image(PathBuf),
}

/// A validated configuration with every choice resolved.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub source: Source,
    pub size: usize,
    pub sigma: (f64, f64),
    pub band: (usize, usize),
    pub cross: CrossChannelSpec,
    pub noise: f64,
    pub seed: u64,
    pub kind: SolverKind,
    pub bench: Vec<SolverKind>,
    pub section: SolverSection,
    pub output: OutputSection,
}

impl RunConfig {
    /// Parses a config file. A manifest written by `synth` is accepted too;
    /// its `[computed]` section is ignored.
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        table.remove("computed");
        table
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config always serializes")
    }

    pub fn resolve(&self) -> CliResult<Resolved> {
        let p = &self.problem;
        let source = match &p.image {
            Some(path) => {
                if !path.is_file() {
                    return Err(CliError::Config(format!("image {} does not exist", path.display())));
                }
                Source::Image(path.clone())
            }
            None => Source::Pattern(p.pattern.parse().map_err(CliError::from)?),
        };
        if !(0.0..1.0).contains(&p.noise) {
            return Err(CliError::Config(format!("noise must lie in [0, 1), got {}", p.noise)));
        }
        let sigma = (p.sigma, p.sigma2.unwrap_or(p.sigma));
        let band = (p.band, p.band2.unwrap_or(p.band));
        // An image fixes its own size, checked again once it is loaded.
        let size = match source {
            Source::Pattern(_) => p.size,
            Source::Image(_) => usize::MAX,
        };
        for (s, r) in [(sigma.0, band.0), (sigma.1, band.1)] {
            GaussianBlurSpec::new(size, s, r)?;
        }
        let cross = CrossChannelSpec::new(p.mixing)?;

        let s = &self.solver;
        let kind = parse_kind(&s.kind)?;
        if s.bench.is_empty() {
            return Err(CliError::Config("bench needs at least one solver".into()));
        }
        let bench = s.bench.iter().map(|k| parse_kind(k)).collect::<CliResult<Vec<_>>>()?;
        let resolved = Resolved {
            source,
            size: p.size,
            sigma,
            band,
            cross,
            noise: p.noise,
            seed: p.seed,
            kind,
            bench,
            section: s.clone(),
            output: self.output.clone(),
        };
        for k in SolverKind::ALL {
            resolved.solver_config(k)?;
        }
        Ok(resolved)
    }
}

fn parse_kind(s: &str) -> CliResult<SolverKind> {
    s.parse()
        .map_err(|_| CliError::Config(format!("unknown solver {s:?}, expected gmres, gk or lsqr")))
}

impl Resolved {
    /// Blur model for an `n×n` image.
    pub fn model(&self, n: usize) -> CliResult<BlurModel> {
        Ok(BlurModel {
            within1: GaussianBlurSpec::new(n, self.sigma.0, self.band.0)?,
            within2: GaussianBlurSpec::new(n, self.sigma.1, self.band.1)?,
            cross: self.cross,
        })
    }

    pub fn solver_config(&self, kind: SolverKind) -> CliResult<SolverConfig> {
        let s = &self.section;
        let lambda_mode = match &s.lambda {
            Choice::Value(v) => LambdaMode::Fixed(*v),
            Choice::Rule(r) if r == "gcv" => LambdaMode::Gcv,
            Choice::Rule(r) => return Err(CliError::Config(format!("lambda must be gcv or a number, got {r:?}"))),
        };
        let k_opt_mode = match &s.kopt {
            Choice::Value(k) => KOptMode::Fixed(*k),
            Choice::Rule(r) if r == "lcurve" => KOptMode::LCurve,
            Choice::Rule(r) => {
                return Err(CliError::Config(format!(
                    "kopt must be lcurve or an integer, got {r:?}"
                )))
            }
        };
        let default_steps = match (kind, k_opt_mode) {
            (SolverKind::Lsqr, KOptMode::Fixed(k)) => k,
            (SolverKind::Lsqr, _) => DEFAULT_LSQR_STEPS,
            _ => DEFAULT_GK_STEPS,
        };
        let cfg = SolverConfig {
            restart_m: s.restart,
            max_outer_iterations: s.max_outer,
            tolerance: s.tol,
            max_inner_steps: s.steps.unwrap_or(default_steps),
            lambda_mode,
            rng_seed: self.seed,
            k_opt_mode,
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}
