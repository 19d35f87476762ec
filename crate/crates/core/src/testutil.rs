use crate::grid::Grid;
use crate::noise::NormalRng;

pub(crate) struct TestRng(NormalRng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(NormalRng::new(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.uniform()
    }
}

/// Entries uniform in `[-scale, scale)`.
pub(crate) fn random_grid(rng: &mut TestRng, rows: usize, cols: usize, scale: f64) -> Grid {
    Grid::from_fn(rows, cols, |_, _| scale * (2.0 * rng.uniform() - 1.0))
}
