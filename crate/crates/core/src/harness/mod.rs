//! Experiment driver behind the command-line tool.

mod config;
mod output;

pub use config::{preset, CtSpec, ExperimentConfig, LinearSpec, ProblemSpec, RawConfig, KEYS, PRESETS};
pub use output::{
    emit_image, emit_metrics, emit_trace, metrics_csv, pgm_bytes, trace_csv, METRICS_HEADER, TRACE_HEADER,
};

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::ct::{build_parallel_tomo, CtInstance};
use crate::engine::{run, validate_config, Mode, RunOutput, Termination, ValidationReport};
use crate::error::{Error, Result};
use crate::forward::{ForwardProblem, LinearBlock, LinearProblem};
use crate::grid::Grid;
use crate::noise::add_relative_gaussian_noise;
use crate::pde::{default_problem, solve_state, PdeProblem};
use crate::sparse::SparseMatrix;

/// A forward problem with its data, ready for the engine.
pub struct Prepared {
    pub problem: Box<dyn ForwardProblem>,
    pub truth: Option<Grid>,
    /// Absolute noise level `δ`.
    pub delta: f64,
}

fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        for tok in line.split('#').next().unwrap_or("").split_whitespace() {
            out.push(tok.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("invalid number {tok:?}"),
            })?);
        }
    }
    Ok(out)
}

fn prepare_linear(cfg: &ExperimentConfig, lin: &LinearSpec) -> Result<Prepared> {
    let matrix = SparseMatrix::load_coordinate(&lin.matrix)?;
    let data = read_vector(&lin.data)?;
    if data.len() != matrix.rows() {
        return Err(Error::Config(format!(
            "{} has {} values but the matrix has {} rows",
            lin.data.display(),
            data.len(),
            matrix.rows()
        )));
    }
    let shape = match (lin.rows, lin.cols) {
        (Some(r), Some(c)) => (r, c),
        (Some(r), None) => (r, matrix.cols() / r.max(1)),
        (None, Some(c)) => (matrix.cols() / c.max(1), c),
        (None, None) => (matrix.cols(), 1),
    };
    if shape.0 * shape.1 != matrix.cols() {
        return Err(Error::Config(format!(
            "image shape {}x{} does not match {} matrix columns",
            shape.0,
            shape.1,
            matrix.cols()
        )));
    }
    let truth = match &lin.truth {
        Some(p) => Some(Grid::from_vec(shape.0, shape.1, read_vector(p)?).map_err(|e| Error::Config(e.to_string()))?),
        None => None,
    };
    let (data, delta) = if cfg.noise_level > 0.0 {
        add_relative_gaussian_noise(&Grid::vector(data), cfg.noise_level, cfg.seed)?
    } else {
        (Grid::vector(data), lin.delta)
    };
    let problem = if cfg.solver.blocks == 1 {
        LinearProblem::new(shape, vec![LinearBlock { matrix, data }])?
    } else {
        if matrix.rows() % cfg.solver.blocks != 0 {
            return Err(Error::Config(format!(
                "{} rows do not split into {} equal blocks",
                matrix.rows(),
                cfg.solver.blocks
            )));
        }
        let group = matrix.rows() / cfg.solver.blocks;
        LinearProblem::partitioned(shape, &matrix, &data, cfg.solver.blocks, group)?
    };
    Ok(Prepared {
        problem: Box::new(problem),
        truth,
        delta,
    })
}

/// Build the forward problem and synthesize (noisy) data.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    cfg.check()?;
    match &cfg.problem {
        ProblemSpec::Ct(ct) => {
            let inst = CtInstance::shepp_logan(ct.geometry(), cfg.noise_level, cfg.seed)?;
            let problem = inst.problem(cfg.solver.blocks)?;
            Ok(Prepared {
                problem: Box::new(problem),
                truth: Some(inst.truth),
                delta: inst.delta,
            })
        }
        ProblemSpec::Pde { m } => {
            let inst = default_problem(*m)?;
            let clean = solve_state(&inst.truth, &inst.mesh)?;
            let (data, delta) = add_relative_gaussian_noise(&clean, cfg.noise_level, cfg.seed)?;
            Ok(Prepared {
                problem: Box::new(PdeProblem { mesh: inst.mesh, data }),
                truth: Some(inst.truth),
                delta,
            })
        }
        ProblemSpec::CustomLinear(lin) => prepare_linear(cfg, lin),
    }
}

/// Admissibility report for a config; the noise level does not enter.
pub fn validation_report(cfg: &ExperimentConfig) -> ValidationReport {
    validate_config(&cfg.solver, cfg.validation_inputs())
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub name: String,
    pub problem: String,
    pub mode: Mode,
    pub n_final: usize,
    pub terminated_by: Termination,
    pub final_residual_norm: f64,
    pub final_rel_error: Option<f64>,
    pub initial_rel_error: Option<f64>,
    pub delta: f64,
    pub noise_level: f64,
    pub seed: u64,
    pub inner_iterations_total: usize,
    pub elapsed_seconds: f64,
    pub validation: ValidationReport,
    pub warnings: Vec<String>,
}

pub struct ExperimentOutcome {
    pub run: RunOutput,
    pub truth: Option<Grid>,
    pub summary: Summary,
    pub files: Vec<PathBuf>,
}

/// Run an experiment and write `metrics.csv`, `trace.csv`,
/// `reconstruction.pgm`, `truth.pgm` (when known) and `summary.json` into
/// `out_dir`. The artifacts are written for every termination reason.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentOutcome> {
    let prepared = prepare(cfg)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut solver = cfg.solver.clone();
    solver.delta = prepared.delta;
    let validation = validate_config(&solver, cfg.validation_inputs());

    let started = Instant::now();
    let out = run(prepared.problem.as_ref(), &cfg.penalty, &solver, cfg.mode, prepared.truth.as_ref())?;
    let elapsed = started.elapsed().as_secs_f64();

    let records = &out.trace.records;
    let last = records.last().expect("a run records at least one step");
    let mut warnings = validation.warnings.clone();
    warnings.extend(out.trace.warnings.iter().cloned());
    let summary = Summary {
        name: cfg.name.clone(),
        problem: cfg.problem.kind().to_string(),
        mode: cfg.mode,
        n_final: out.trace.n_final,
        terminated_by: out.trace.terminated_by,
        final_residual_norm: last.residual_norm,
        final_rel_error: prepared.truth.as_ref().map(|t| {
            let tn = t.norm();
            let e = out.result.x.distance(t);
            if tn > 0.0 {
                e / tn
            } else {
                e
            }
        }),
        initial_rel_error: records[0].rel_error,
        delta: prepared.delta,
        noise_level: cfg.noise_level,
        seed: cfg.seed,
        inner_iterations_total: records.iter().map(|r| r.inner_iterations).sum(),
        elapsed_seconds: elapsed,
        validation,
        warnings,
    };

    let mut files = Vec::new();
    let metrics = out_dir.join("metrics.csv");
    emit_metrics(&metrics, &out.trace, cfg.metric_every)?;
    files.push(metrics);
    let trace = out_dir.join("trace.csv");
    emit_trace(&trace, &out.trace)?;
    files.push(trace);
    let recon = out_dir.join("reconstruction.pgm");
    emit_image(&recon, &out.result.x)?;
    files.push(recon);
    if let Some(t) = &prepared.truth {
        let p = out_dir.join("truth.pgm");
        emit_image(&p, t)?;
        files.push(p);
    }
    let summary_path = out_dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(&summary_path, json + "\n").map_err(|e| Error::io(&summary_path, e))?;
    files.push(summary_path);

    Ok(ExperimentOutcome {
        run: out,
        truth: prepared.truth,
        summary,
        files,
    })
}

/// Write the CT system matrix of a config in coordinate format.
pub fn export_matrix(cfg: &ExperimentConfig, path: &Path) -> Result<SparseMatrix> {
    let ProblemSpec::Ct(ct) = &cfg.problem else {
        return Err(Error::Config(format!(
            "export-matrix needs a ct problem, got {}",
            cfg.problem.kind()
        )));
    };
    let a = build_parallel_tomo(&ct.geometry())?;
    a.save_coordinate(path)?;
    Ok(a)
}
