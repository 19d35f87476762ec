//! WebAssembly bindings: phantom and sinogram synthesis, TV denoising, and
//! plain versus accelerated tomographic reconstruction.

pub mod demo;

use lkreg::engine::{Mode, Termination};
use lkreg::Grid;
use wasm_bindgen::prelude::*;

fn js_err(e: lkreg::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn grid_from(data: &[f64], rows: usize, cols: usize) -> Result<Grid, JsError> {
    Grid::from_vec(rows, cols, data.to_vec()).map_err(js_err)
}

/// Image in row-major order with its shape.
#[wasm_bindgen]
pub struct Image {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[wasm_bindgen]
impl Image {
    #[wasm_bindgen(getter)]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[wasm_bindgen(getter)]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> Vec<f64> {
        self.data.clone()
    }
}

impl From<Grid> for Image {
    fn from(g: Grid) -> Self {
        let (rows, cols) = g.shape();
        Image {
            rows,
            cols,
            data: g.into_vec(),
        }
    }
}

/// Clean phantom of side `q`.
#[wasm_bindgen]
pub fn phantom(q: usize) -> Result<Image, JsError> {
    Ok(demo::noisy_phantom(q, 0.0, 0).map_err(js_err)?.0.into())
}

/// Phantom with relative Gaussian noise `level`.
#[wasm_bindgen(js_name = noisyPhantom)]
pub fn noisy_phantom(q: usize, level: f64, seed: u32) -> Result<Image, JsError> {
    Ok(demo::noisy_phantom(q, level, seed as u64).map_err(js_err)?.1.into())
}

#[wasm_bindgen]
pub struct Denoised {
    image: Image,
    iterations: usize,
    gap_rel: f64,
    tv: f64,
}

#[wasm_bindgen]
impl Denoised {
    pub fn image(&self) -> Vec<f64> {
        self.image.data.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    #[wasm_bindgen(getter, js_name = gapRel)]
    pub fn gap_rel(&self) -> f64 {
        self.gap_rel
    }

    #[wasm_bindgen(getter)]
    pub fn tv(&self) -> f64 {
        self.tv
    }
}

/// TV denoising of a `rows × cols` image with fidelity weight `1/mu`.
#[wasm_bindgen]
pub fn denoise(data: &[f64], rows: usize, cols: usize, mu: f64, nonneg: bool) -> Result<Denoised, JsError> {
    let d = demo::denoise(&grid_from(data, rows, cols)?, mu, nonneg).map_err(js_err)?;
    Ok(Denoised {
        image: d.image.into(),
        iterations: d.iterations,
        gap_rel: d.gap_rel,
        tv: d.tv,
    })
}

#[wasm_bindgen]
pub struct Scene(demo::Scene);

#[wasm_bindgen]
impl Scene {
    #[wasm_bindgen(constructor)]
    pub fn new(q: usize, angles: usize, noise: f64, seed: u32) -> Result<Scene, JsError> {
        Ok(Scene(demo::Scene::new(q, angles, noise, seed as u64).map_err(js_err)?))
    }

    pub fn truth(&self) -> Image {
        self.0.instance.truth.clone().into()
    }

    /// Noisy sinogram, one row per angle.
    pub fn sinogram(&self) -> Image {
        self.0.instance.noisy.data.clone().into()
    }

    /// `accelerated` selects the Nesterov variant.
    pub fn reconstruct(&self, accelerated: bool, n_max: usize) -> Result<Reconstruction, JsError> {
        let mode = if accelerated { Mode::Accelerated } else { Mode::Plain };
        Ok(Reconstruction(self.0.reconstruct(mode, n_max).map_err(js_err)?))
    }
}

#[wasm_bindgen]
pub struct Reconstruction(demo::Reconstruction);

#[wasm_bindgen]
impl Reconstruction {
    pub fn image(&self) -> Vec<f64> {
        self.0.image.as_slice().to_vec()
    }

    #[wasm_bindgen(js_name = relErrors)]
    pub fn rel_errors(&self) -> Vec<f64> {
        self.0.rel_errors.clone()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.0.residuals.clone()
    }

    #[wasm_bindgen(getter, js_name = nFinal)]
    pub fn n_final(&self) -> usize {
        self.0.n_final
    }

    /// `"discrepancy"`, `"cap"` or `"inner-failure"`.
    #[wasm_bindgen(getter, js_name = terminatedBy)]
    pub fn terminated_by(&self) -> String {
        match self.0.terminated_by {
            Termination::Discrepancy => "discrepancy",
            Termination::Cap => "cap",
            Termination::InnerFailure => "inner-failure",
        }
        .into()
    }
}
