//! Seeded Gaussian noise.
//!
//! The generator is PCG-XSL-RR 128/64 (`rand_pcg::Pcg64`) seeded through
//! `SeedableRng::seed_from_u64`. Uniforms are the top 53 bits of `next_u64`
//! scaled by 2⁻⁵³. Standard normals come from the Box–Muller transform applied
//! to consecutive uniform pairs `(u1, u2)`:
//!
//! ```text
//! r = sqrt(−2 ln(1 − u1)),  z0 = r cos(2π u2),  z1 = r sin(2π u2)
//! ```
//!
//! emitting `z0` then `z1`. Any port that reproduces these three steps draws
//! the same noise stream for the same seed.

use rand_core::{RngCore, SeedableRng};
use rand_pcg::Pcg64;

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone)]
pub struct NormalRng {
    pcg: Pcg64,
    spare: Option<f64>,
}

impl NormalRng {
    pub fn new(seed: u64) -> Self {
        NormalRng {
            pcg: Pcg64::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.pcg.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * angle.sin());
        r * angle.cos()
    }

    pub fn normal_grid(&mut self, rows: usize, cols: usize) -> Grid {
        Grid::from_fn(rows, cols, |_, _| self.standard_normal())
    }
}

/// Adds Gaussian noise rescaled so that `‖g^δ − g‖ = delta_rel·‖g‖`.
/// Returns the noisy data and the absolute noise level `δ = delta_rel·‖g‖`.
pub fn add_relative_gaussian_noise(g: &Grid, delta_rel: f64, seed: u64) -> Result<(Grid, f64)> {
    if !(delta_rel >= 0.0) || !delta_rel.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "relative noise level must be a nonnegative number, got {delta_rel}"
        )));
    }
    if delta_rel == 0.0 {
        return Ok((g.clone(), 0.0));
    }
    let g_norm = g.norm();
    if g_norm == 0.0 {
        return Err(Error::InvalidArgument(
            "cannot scale relative noise against zero data".into(),
        ));
    }
    let mut rng = NormalRng::new(seed);
    let e = rng.normal_grid(g.rows(), g.cols());
    let delta = delta_rel * g_norm;
    let mut noisy = g.clone();
    noisy.axpy(delta / e.norm(), &e);
    Ok((noisy, delta))
}
