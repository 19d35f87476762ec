//! Modified Shepp–Logan head phantom (Toft's higher-contrast intensities).

use crate::error::{Error, Result};
use crate::grid::Grid;

// (intensity, semi-axis a, semi-axis b, center x, center y, rotation in degrees)
const ELLIPSES: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
];

/// `q×q` phantom sampled at pixel centers on `[−1, 1]²`, row 0 at the top,
/// clamped to `[0, 1]`.
pub fn shepp_logan(q: usize) -> Result<Grid> {
    if q < 8 {
        return Err(Error::InvalidArgument(format!(
            "phantom side must be at least 8, got {q}"
        )));
    }
    let n = q as f64;
    Ok(Grid::from_fn(q, q, |r, c| {
        let x = (2.0 * c as f64 + 1.0) / n - 1.0;
        let y = 1.0 - (2.0 * r as f64 + 1.0) / n;
        let mut v = 0.0;
        for &(a, sa, sb, x0, y0, phi) in &ELLIPSES {
            let (s, co) = phi.to_radians().sin_cos();
            let dx = x - x0;
            let dy = y - y0;
            let u = dx * co + dy * s;
            let w = -dx * s + dy * co;
            if (u / sa).powi(2) + (w / sb).powi(2) <= 1.0 {
                v += a;
            }
        }
        v.clamp(0.0, 1.0)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn background_and_range() {
        let p = shepp_logan(64).unwrap();
        assert_eq!(p[(0, 0)], 0.0);
        assert_eq!(p[(63, 63)], 0.0);
        assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        // Skull rim has full intensity, brain tissue 0.2.
        assert!((p[(32, 32)] - 0.2).abs() < 1e-12);
        assert!(p.max_value() == 1.0);
    }

    #[test]
    fn support_fraction_at_full_scale() {
        let p = shepp_logan(256).unwrap();
        let frac = p.iter().filter(|&&v| v > 0.0).count() as f64 / p.len() as f64;
        assert!((0.3..=0.7).contains(&frac), "support fraction {frac}");
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(shepp_logan(7).is_err());
        assert!(shepp_logan(8).is_ok());
    }

    #[test]
    fn left_ventricle_is_left_of_center() {
        // Ellipse 4 (x0 = −0.22) makes a dark region in the left half.
        let p = shepp_logan(128).unwrap();
        let r = 64;
        let c = ((1.0 - 0.22) * 64.0) as usize;
        assert!(p[(r, c)] < 0.05, "{}", p[(r, c)]);
    }
}
