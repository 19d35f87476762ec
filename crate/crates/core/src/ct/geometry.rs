//! Parallel-beam scan geometry and exact ray-pixel intersection lengths.
//!
//! The image occupies `[−q/2, q/2]²` with unit pixels; pixel `(r, c)` covers
//! `x ∈ [−q/2 + c, −q/2 + c + 1]`, `y ∈ [q/2 − r − 1, q/2 − r]`, so row 0 is
//! the top of the image. A ray at angle `θ` and signed detector offset `t` is
//! the line `{p : p·(cos θ, sin θ) = t}`, traversed in direction
//! `(−sin θ, cos θ)`. Ray `k` of an angle has offset
//! `(k − (R − 1)/2)·spacing`, symmetric about the center.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct TomoGeometry {
    pub q: usize,
    /// Projection angles in degrees, strictly increasing within `[0, 180)`.
    pub angles_deg: Vec<f64>,
    pub rays_per_angle: usize,
    pub detector_spacing: f64,
}

impl TomoGeometry {
    /// `n_angles` angles `start + k·span/n_angles`, with the default ray count
    /// `round(√2·q) + 1` at unit spacing.
    pub fn evenly_spaced(q: usize, n_angles: usize, start_deg: f64, span_deg: f64) -> Self {
        let angles_deg = (0..n_angles)
            .map(|k| start_deg + k as f64 * span_deg / n_angles as f64)
            .collect();
        TomoGeometry {
            q,
            angles_deg,
            rays_per_angle: default_rays(q),
            detector_spacing: 1.0,
        }
    }

    /// `q = 64` with 30 angles over `[0°, 180°)`.
    pub fn desk() -> Self {
        Self::evenly_spaced(64, 30, 0.0, 180.0)
    }

    pub fn num_rays(&self) -> usize {
        self.angles_deg.len() * self.rays_per_angle
    }

    pub fn num_pixels(&self) -> usize {
        self.q * self.q
    }

    pub fn ray_offset(&self, k: usize) -> f64 {
        (k as f64 - (self.rays_per_angle as f64 - 1.0) / 2.0) * self.detector_spacing
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 {
            return Err(Error::InvalidArgument("grid side must be at least 1".into()));
        }
        if self.angles_deg.is_empty() {
            return Err(Error::InvalidArgument("at least one projection angle is required".into()));
        }
        if self.rays_per_angle == 0 {
            return Err(Error::InvalidArgument("at least one ray per angle is required".into()));
        }
        if !(self.detector_spacing > 0.0) {
            return Err(Error::InvalidArgument("detector spacing must be positive".into()));
        }
        for w in self.angles_deg.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidArgument("angles must be strictly increasing".into()));
            }
        }
        let first = self.angles_deg[0];
        let last = *self.angles_deg.last().unwrap();
        if !(first >= 0.0 && last < 180.0) {
            return Err(Error::InvalidArgument("angles must lie in [0, 180) degrees".into()));
        }
        Ok(())
    }
}

pub fn default_rays(q: usize) -> usize {
    (std::f64::consts::SQRT_2 * q as f64).round() as usize + 1
}

/// Intersection lengths of one ray with the pixels of a `q×q` grid, as
/// `(pixel index, length)` pairs along the ray. Empty when the ray misses.
pub fn trace_ray(q: usize, theta_deg: f64, offset: f64) -> Vec<(usize, f64)> {
    let half = q as f64 / 2.0;
    let theta = theta_deg.to_radians();
    let (sin, cos) = theta.sin_cos();
    let origin = [offset * cos, offset * sin];
    let dir = [-sin, cos];
    const PARALLEL: f64 = 1e-12;

    // Liang–Barsky clip against the square.
    let mut enter = f64::NEG_INFINITY;
    let mut exit = f64::INFINITY;
    for axis in 0..2 {
        if dir[axis].abs() < PARALLEL {
            if origin[axis] <= -half || origin[axis] >= half {
                return Vec::new();
            }
        } else {
            let a = (-half - origin[axis]) / dir[axis];
            let b = (half - origin[axis]) / dir[axis];
            enter = enter.max(a.min(b));
            exit = exit.min(a.max(b));
        }
    }
    if !(exit - enter > 1e-12) {
        return Vec::new();
    }

    let mut params = Vec::with_capacity(2 * q + 2);
    params.push(enter);
    params.push(exit);
    for axis in 0..2 {
        if dir[axis].abs() < PARALLEL {
            continue;
        }
        for k in 1..q {
            let line = -half + k as f64;
            let s = (line - origin[axis]) / dir[axis];
            if s > enter && s < exit {
                params.push(s);
            }
        }
    }
    params.sort_by(f64::total_cmp);

    let last = q as f64 - 1.0;
    let mut out = Vec::with_capacity(params.len());
    for w in params.windows(2) {
        let len = w[1] - w[0];
        if len <= 1e-12 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        let x = origin[0] + mid * dir[0];
        let y = origin[1] + mid * dir[1];
        let col = (x + half).floor().clamp(0.0, last) as usize;
        let row = (half - y).floor().clamp(0.0, last) as usize;
        out.push((row * q + col, len));
    }
    out
}

/// System matrix with one row per ray (angle-major) and one column per pixel
/// (row-major); rays missing the grid give empty rows.
pub fn build_parallel_tomo(geom: &TomoGeometry) -> Result<SparseMatrix> {
    geom.validate()?;
    let mut rows = Vec::with_capacity(geom.num_rays());
    for &theta in &geom.angles_deg {
        for k in 0..geom.rays_per_angle {
            rows.push(trace_ray(geom.q, theta, geom.ray_offset(k)));
        }
    }
    SparseMatrix::from_rows(geom.num_pixels(), rows)
}
