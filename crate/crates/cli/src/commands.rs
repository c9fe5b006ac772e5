use std::fs;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::path::{Path, PathBuf};
use std::time::Instant;

use dctensor::imaging::{load_image, relative_error, save_image, snr, BlurProblem};
use dctensor::io::{load_ct3, save_ct3};
use dctensor::solvers::{dc_gk, dc_gmres, dc_lsqr, SolverKind, SolverReport};
use dctensor::Tensor;
use serde::{Deserialize, Serialize};

use crate::config::{Resolved, RunConfig, Source};
use crate::error::{CliError, CliResult};

/// Fields computed by `synth` and appended to the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Computed {
    pub size: usize,
    pub realized_noise: f64,
    pub observed_relative_error: f64,
    pub problem_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(flatten)]
    pub config: RunConfig,
    pub computed: Computed,
}

/// A synthesized problem plus what the reports need to identify it.
pub struct Prepared {
    pub problem: BlurProblem<f64>,
    pub hash: String,
    pub observed_relative_error: f64,
}

/// One line of the comparison table. Metric fields are empty when the
/// solver failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsRow {
    pub method: String,
    pub status: String,
    pub snr: Option<f64>,
    pub relative_error: Option<f64>,
    pub cpu_time: Option<f64>,
    pub iterations: Option<usize>,
    pub termination: Option<String>,
    pub lambda: Option<f64>,
    pub k_opt: Option<usize>,
    pub observed_relative_error: f64,
    pub problem_hash: String,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistoryRow {
    pub iteration: usize,
    pub residual: f64,
    pub relative_residual: f64,
    pub lambda: Option<f64>,
    pub solution_norm: Option<f64>,
}

pub struct SolveOutcome {
    pub kind: SolverKind,
    pub report: SolverReport<f64>,
    /// Wall-clock time of the solver call alone.
    pub seconds: f64,
    pub snr: f64,
    pub relative_error: f64,
}

pub struct DeblurOutcome {
    pub solve: SolveOutcome,
    pub row: MetricsRow,
    pub history: Vec<HistoryRow>,
}

pub struct SynthOutcome {
    pub manifest: Manifest,
    pub files: Vec<PathBuf>,
}

fn load_truth(r: &Resolved) -> CliResult<Tensor> {
    let truth = match &r.source {
        Source::Pattern(p) => p.render(r.size, r.seed)?,
        Source::Image(path) if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ct3")) => load_ct3(path)?,
        Source::Image(path) => load_image(path)?.tensor,
    };
    if truth.n1() != truth.n2() || truth.n3() != 3 {
        return Err(CliError::Config(format!(
            "ground truth must be n×n×3, got {}×{}×{}",
            truth.n1(),
            truth.n2(),
            truth.n3()
        )));
    }
    Ok(truth)
}

/// Hash of the observed data and the truth, identifying a problem instance.
pub fn problem_hash(p: &BlurProblem<f64>) -> String {
    let mut h = DefaultHasher::new();
    for t in [&p.ground_truth, &p.observed] {
        (t.n1(), t.n2(), t.n3()).hash(&mut h);
        for v in t.as_slice() {
            v.to_bits().hash(&mut h);
        }
    }
    format!("{:016x}", h.finish())
}

pub fn prepare(r: &Resolved) -> CliResult<Prepared> {
    let truth = load_truth(r)?;
    let model = r.model(truth.n1())?;
    let problem = BlurProblem::synthesize(truth, model, r.noise, r.seed)?;
    let observed_relative_error = relative_error(&problem.observed, &problem.ground_truth)?;
    Ok(Prepared {
        hash: problem_hash(&problem),
        observed_relative_error,
        problem,
    })
}

pub fn solve(kind: SolverKind, r: &Resolved, p: &BlurProblem<f64>) -> CliResult<SolveOutcome> {
    let cfg = r.solver_config(kind)?;
    let op = &p.operator;
    let c = &p.observed;
    let start = Instant::now();
    let report = match kind {
        SolverKind::Gmres => {
            let x0 = Tensor::zeros(c.n1(), c.n2(), c.n3())?;
            dc_gmres(op, c, &x0, &cfg)
        }
        SolverKind::Gk => dc_gk(op, c, &cfg),
        SolverKind::Lsqr => dc_lsqr(op, c, &cfg),
    }
    .map_err(CliError::solver)?;
    let seconds = start.elapsed().as_secs_f64();
    if !report.solution.is_finite() {
        return Err(CliError::Numeric(format!("{kind} produced a non-finite solution")));
    }
    Ok(SolveOutcome {
        kind,
        snr: snr(&report.solution, &p.ground_truth).map_err(CliError::solver)?,
        relative_error: relative_error(&report.solution, &p.ground_truth).map_err(CliError::solver)?,
        report,
        seconds,
    })
}

fn row(prep: &Prepared, kind: SolverKind, outcome: Result<&SolveOutcome, &CliError>) -> MetricsRow {
    let mut row = MetricsRow {
        method: kind.name().into(),
        status: "ok".into(),
        snr: None,
        relative_error: None,
        cpu_time: None,
        iterations: None,
        termination: None,
        lambda: None,
        k_opt: None,
        observed_relative_error: prep.observed_relative_error,
        problem_hash: prep.hash.clone(),
        error: String::new(),
    };
    match outcome {
        Ok(o) => {
            row.snr = Some(o.snr);
            row.relative_error = Some(o.relative_error);
            row.cpu_time = Some(o.seconds);
            row.iterations = Some(o.report.iterations_used);
            row.termination = Some(o.report.termination_reason.to_string());
            row.lambda = o.report.lambda_history.last().copied();
            row.k_opt = o.report.k_opt;
        }
        Err(e) => {
            row.status = "error".into();
            row.error = e.to_string();
        }
    }
    row
}

fn history(report: &SolverReport<f64>) -> Vec<HistoryRow> {
    report
        .residual_history
        .iter()
        .enumerate()
        .map(|(i, &res)| HistoryRow {
            iteration: i + 1,
            residual: res,
            relative_residual: res / report.rhs_norm,
            lambda: report.lambda_history.get(i).copied(),
            solution_norm: report.solution_norm_history.get(i).copied(),
        })
        .collect()
}

fn out_dir(r: &Resolved) -> CliResult<&Path> {
    let dir = r.output.dir.as_path();
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_csv<S: Serialize>(path: &Path, rows: &[S]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes truth, blurred and observed images and tensors plus `manifest.toml`.
pub fn cmd_synth(cfg: &RunConfig) -> CliResult<SynthOutcome> {
    let r = cfg.resolve()?;
    let prep = prepare(&r)?;
    let p = &prep.problem;
    let dir = out_dir(&r)?;
    let mut files = Vec::new();
    for (name, t) in [
        ("truth", &p.ground_truth),
        ("blurred", &p.blurred_clean),
        ("observed", &p.observed),
    ] {
        let ct3 = dir.join(format!("{name}.ct3"));
        save_ct3(t, &ct3)?;
        files.push(ct3);
        if r.output.images {
            let png = dir.join(format!("{name}.png"));
            save_image(t, &png)?;
            files.push(png);
        }
    }
    let mut recorded = cfg.clone();
    recorded.problem.size = p.ground_truth.n1();
    let manifest = Manifest {
        config: recorded,
        computed: Computed {
            size: p.ground_truth.n1(),
            realized_noise: p.realized_noise_level()?,
            observed_relative_error: prep.observed_relative_error,
            problem_hash: prep.hash.clone(),
        },
    };
    let path = dir.join("manifest.toml");
    let text = toml::to_string(&manifest).map_err(|e| CliError::Config(e.to_string()))?;
    fs::write(&path, text)?;
    files.push(path);
    Ok(SynthOutcome { manifest, files })
}

/// Runs the configured solver and writes the restoration and its metrics.
pub fn cmd_deblur(cfg: &RunConfig) -> CliResult<DeblurOutcome> {
    let r = cfg.resolve()?;
    let prep = prepare(&r)?;
    let solve = solve(r.kind, &r, &prep.problem)?;
    let row = row(&prep, r.kind, Ok(&solve));
    let history = history(&solve.report);
    let dir = out_dir(&r)?;
    save_ct3(&solve.report.solution, dir.join("restored.ct3"))?;
    if r.output.images {
        save_image(&solve.report.solution, dir.join("restored.png"))?;
    }
    if r.output.csv {
        write_csv(&dir.join("history.csv"), &history)?;
        write_csv(&dir.join("summary.csv"), std::slice::from_ref(&row))?;
    }
    Ok(DeblurOutcome { solve, row, history })
}

/// Runs every configured solver on one problem instance. A failing solver
/// yields an error row and the others still run.
pub fn cmd_bench(cfg: &RunConfig) -> CliResult<Vec<MetricsRow>> {
    let r = cfg.resolve()?;
    let prep = prepare(&r)?;
    let rows: Vec<MetricsRow> = r
        .bench
        .iter()
        .map(|&kind| row(&prep, kind, solve(kind, &r, &prep.problem).as_ref()))
        .collect();
    if r.output.csv {
        write_csv(&out_dir(&r)?.join("bench.csv"), &rows)?;
    }
    Ok(rows)
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.prec$}"))
}

/// Console table in the column order Method, SNR, Relative error, cpu-time.
pub fn render_table(rows: &[MetricsRow]) -> String {
    let mut out = format!(
        "{:<8} {:>10} {:>15} {:>10}  {}\n",
        "method", "snr_db", "relative_error", "cpu_s", "note"
    );
    for r in rows {
        let note = if r.status == "ok" {
            r.termination.clone().unwrap_or_default()
        } else {
            format!("error: {}", r.error)
        };
        out.push_str(&format!(
            "{:<8} {:>10} {:>15} {:>10}  {}\n",
            r.method,
            opt(r.snr, 3),
            r.relative_error.map_or_else(|| "-".into(), |e| format!("{e:.4e}")),
            opt(r.cpu_time, 3),
            note
        ));
    }
    if let Some(r) = rows.first() {
        out.push_str(&format!(
            "observed relative error {:.4e}, problem {}\n",
            r.observed_relative_error, r.problem_hash
        ));
    }
    out
}
