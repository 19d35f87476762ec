//! Target-independent logic behind the browser bindings.

use lkreg::ct::{CtInstance, TomoGeometry};
use lkreg::engine::{self, Mode, Termination};
use lkreg::harness::preset;
use lkreg::noise::add_relative_gaussian_noise;
use lkreg::pdhg::{pdhg_solve, tv_value, DenoiseProblem, GradientField, PdhgOptions};
use lkreg::{Constraint, Grid, Result};

/// Largest image side the demo accepts; keeps a browser run interactive.
pub const MAX_SIZE: usize = 128;

fn check_size(q: usize) -> Result<()> {
    if !(8..=MAX_SIZE).contains(&q) {
        return Err(lkreg::Error::InvalidArgument(format!(
            "image side must lie in [8, {MAX_SIZE}], got {q}"
        )));
    }
    Ok(())
}

/// Phantom with relative Gaussian pixel noise.
pub fn noisy_phantom(q: usize, level: f64, seed: u64) -> Result<(Grid, Grid)> {
    check_size(q)?;
    let clean = lkreg::ct::shepp_logan(q)?;
    let (noisy, _) = add_relative_gaussian_noise(&clean, level, seed)?;
    Ok((clean, noisy))
}

#[derive(Debug, Clone)]
pub struct Denoised {
    pub image: Grid,
    pub iterations: usize,
    pub gap_rel: f64,
    pub tv: f64,
}

/// `argmin_z ‖z − f‖²/(2μ) + TV(z)`, optionally with `z ≥ 0`.
pub fn denoise(f: &Grid, mu: f64, nonneg: bool) -> Result<Denoised> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(lkreg::Error::InvalidArgument("mu must be positive".into()));
    }
    let (rows, cols) = f.shape();
    let constraint = nonneg.then_some(Constraint::NonNegative);
    let prob = DenoiseProblem::new(f.scaled(1.0 / mu), mu, constraint);
    let options = PdhgOptions {
        eta: 1e-4,
        max_iter: 2000,
        record_history: false,
    };
    let report = pdhg_solve(&prob, &Grid::zeros(rows, cols), &GradientField::zeros(rows, cols), &options);
    Ok(Denoised {
        tv: tv_value(&report.x),
        image: report.x,
        iterations: report.iterations,
        gap_rel: report.gap_rel,
    })
}

/// Noisy tomography scene reconstructed by [`Scene::reconstruct`].
pub struct Scene {
    pub instance: CtInstance,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub image: Grid,
    pub rel_errors: Vec<f64>,
    pub residuals: Vec<f64>,
    pub n_final: usize,
    pub terminated_by: Termination,
}

impl Scene {
    pub fn new(q: usize, angles: usize, noise: f64, seed: u64) -> Result<Self> {
        check_size(q)?;
        let geometry = TomoGeometry::evenly_spaced(q, angles, 0.0, 180.0);
        Ok(Scene {
            instance: CtInstance::shepp_logan(geometry, noise, seed)?,
        })
    }

    /// Run the solver with the desk preset's penalty and step parameters.
    pub fn reconstruct(&self, mode: Mode, n_max: usize) -> Result<Reconstruction> {
        let cfg = preset("ct-desk")?;
        let mut solver = cfg.solver;
        solver.delta = self.instance.delta;
        solver.n_max = n_max;
        let problem = self.instance.problem(solver.blocks)?;
        let out = engine::run(&problem, &cfg.penalty, &solver, mode, Some(&self.instance.truth))?;
        let records = &out.trace.records;
        Ok(Reconstruction {
            image: out.result.x,
            rel_errors: records.iter().map(|r| r.rel_error.unwrap_or(f64::NAN)).collect(),
            residuals: records.iter().map(|r| r.residual_norm).collect(),
            n_final: out.trace.n_final,
            terminated_by: out.trace.terminated_by,
        })
    }
}
