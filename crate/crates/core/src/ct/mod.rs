//! Parallel-beam tomography: system matrix, phantom, and sinograms.

mod geometry;
mod phantom;

pub use geometry::{build_parallel_tomo, default_rays, trace_ray, TomoGeometry};
pub use phantom::shepp_logan;

use crate::error::{Error, Result};
use crate::forward::LinearProblem;
use crate::grid::Grid;
use crate::noise::add_relative_gaussian_noise;
use crate::sparse::SparseMatrix;

/// Projection data laid out as one row per angle, one column per ray.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    pub data: Grid,
}

impl Sinogram {
    pub fn from_flat(geom: &TomoGeometry, flat: Vec<f64>) -> Result<Self> {
        Ok(Sinogram {
            data: Grid::from_vec(geom.angles_deg.len(), geom.rays_per_angle, flat)?,
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        self.data.as_slice()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// `A f` for a `q×q` image.
pub fn project(a: &SparseMatrix, geom: &TomoGeometry, image: &Grid) -> Result<Sinogram> {
    if image.shape() != (geom.q, geom.q) {
        return Err(Error::Shape(format!(
            "image is {:?}, geometry expects {q}x{q}",
            image.shape(),
            q = geom.q
        )));
    }
    Sinogram::from_flat(geom, a.apply(image.as_slice())?)
}

/// `Aᵀ g`, reshaped to the image grid.
pub fn backproject(a: &SparseMatrix, geom: &TomoGeometry, sino: &Sinogram) -> Result<Grid> {
    Grid::from_vec(geom.q, geom.q, a.apply_adjoint(sino.as_slice())?)
}

/// A complete tomography instance: geometry, matrix, truth, and data.
#[derive(Debug, Clone)]
pub struct CtInstance {
    pub geometry: TomoGeometry,
    pub matrix: SparseMatrix,
    pub truth: Grid,
    pub clean: Sinogram,
    pub noisy: Sinogram,
    pub delta: f64,
}

impl CtInstance {
    /// Shepp–Logan data with relative Gaussian noise `delta_rel`.
    pub fn shepp_logan(geometry: TomoGeometry, delta_rel: f64, seed: u64) -> Result<Self> {
        let truth = shepp_logan(geometry.q)?;
        Self::with_truth(geometry, truth, delta_rel, seed)
    }

    pub fn with_truth(geometry: TomoGeometry, truth: Grid, delta_rel: f64, seed: u64) -> Result<Self> {
        let matrix = build_parallel_tomo(&geometry)?;
        let clean = project(&matrix, &geometry, &truth)?;
        let (noisy, delta) = add_relative_gaussian_noise(&clean.data, delta_rel, seed)?;
        Ok(CtInstance {
            geometry,
            matrix,
            truth,
            clean,
            noisy: Sinogram { data: noisy },
            delta,
        })
    }

    /// Forward problem on the noisy data, split into `blocks` groups of whole
    /// angles.
    pub fn problem(&self, blocks: usize) -> Result<LinearProblem> {
        let q = self.geometry.q;
        LinearProblem::partitioned(
            (q, q),
            &self.matrix,
            &self.noisy.data,
            blocks,
            self.geometry.rays_per_angle,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_grid, TestRng};

    /// Chord length of the line `{p·(cosθ, sinθ) = t}` through `[−h, h]²`,
    /// by clipping against the four edges directly.
    fn chord_oracle(half: f64, theta_deg: f64, t: f64) -> f64 {
        let (s, c) = theta_deg.to_radians().sin_cos();
        let mut pts: Vec<(f64, f64)> = Vec::new();
        // x = ±half: y = (t − x c)/s
        if s.abs() > 1e-12 {
            for x in [-half, half] {
                let y = (t - x * c) / s;
                if y.abs() <= half + 1e-12 {
                    pts.push((x, y));
                }
            }
        }
        if c.abs() > 1e-12 {
            for y in [-half, half] {
                let x = (t - y * s) / c;
                if x.abs() <= half + 1e-12 {
                    pts.push((x, y));
                }
            }
        }
        let mut best: f64 = 0.0;
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                best = best.max(((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt());
            }
        }
        best
    }

    #[test]
    fn row_sums_match_chord_lengths() {
        let geom = TomoGeometry::evenly_spaced(16, 13, 0.0, 180.0);
        let a = build_parallel_tomo(&geom).unwrap();
        let ones = Grid::filled(16, 16, 1.0);
        let sino = project(&a, &geom, &ones).unwrap();
        for (ai, &theta) in geom.angles_deg.iter().enumerate() {
            for k in 0..geom.rays_per_angle {
                let got = sino.data[(ai, k)];
                let want = chord_oracle(8.0, theta, geom.ray_offset(k));
                assert!((got - want).abs() < 1e-10, "θ={theta} k={k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn entries_positive_and_sparse() {
        let geom = TomoGeometry::evenly_spaced(20, 17, 3.0, 177.0);
        let a = build_parallel_tomo(&geom).unwrap();
        assert_eq!(a.rows(), geom.num_rays());
        assert_eq!(a.cols(), 400);
        for r in 0..a.rows() {
            assert!(a.row_nnz(r) <= 2 * geom.q);
            for (_, v) in a.row(r) {
                assert!(v > 0.0 && v <= geom.q as f64 * std::f64::consts::SQRT_2);
            }
        }
    }

    #[test]
    fn adjoint_identity() {
        let geom = TomoGeometry::evenly_spaced(12, 9, 0.0, 180.0);
        let a = build_parallel_tomo(&geom).unwrap();
        let mut rng = TestRng::new(17);
        for _ in 0..20 {
            let f = random_grid(&mut rng, 12, 12, 1.0);
            let g = random_grid(&mut rng, 9, geom.rays_per_angle, 1.0);
            let af = project(&a, &geom, &f).unwrap();
            let atg = backproject(&a, &geom, &Sinogram { data: g.clone() }).unwrap();
            let lhs = af.data.dot(&g);
            let rhs = f.dot(&atg);
            assert!((lhs - rhs).abs() <= 1e-10 * a.norm_1() * f.norm() * g.norm());
        }
    }

    #[test]
    fn projection_is_linear_in_scale() {
        let geom = TomoGeometry::evenly_spaced(16, 8, 0.0, 180.0);
        let a = build_parallel_tomo(&geom).unwrap();
        let p = shepp_logan(16).unwrap();
        let base = project(&a, &geom, &p).unwrap();
        let scaled = project(&a, &geom, &p.scaled(2.0)).unwrap();
        for (x, y) in base.as_slice().iter().zip(scaled.as_slice()) {
            assert_eq!(2.0 * x, *y);
        }
        let zero = project(&a, &geom, &Grid::zeros(16, 16)).unwrap();
        assert!(zero.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_wrong_image_shape() {
        let geom = TomoGeometry::evenly_spaced(8, 4, 0.0, 180.0);
        let a = build_parallel_tomo(&geom).unwrap();
        assert!(project(&a, &geom, &Grid::zeros(4, 4)).is_err());
    }

    #[test]
    fn instance_noise_level() {
        let inst = CtInstance::shepp_logan(TomoGeometry::evenly_spaced(16, 6, 0.0, 180.0), 0.01, 5).unwrap();
        let err = inst.noisy.data.distance(&inst.clean.data);
        assert!((err - inst.delta).abs() <= 1e-12 * inst.delta);
        assert!((inst.delta - 0.01 * inst.clean.data.norm()).abs() < 1e-12 * inst.delta);
        let p = inst.problem(3).unwrap();
        assert_eq!(p.blocks().len(), 3);
    }
}
