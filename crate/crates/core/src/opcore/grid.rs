use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How differential operators are mapped onto grid matrices.
///
/// Both schemes use the same second-order stencils: central first differences
/// and the compact three-point second difference, with one-sided second-order
/// rows at the two boundaries.
///
/// `Covariant` additionally absorbs the lower-order coefficients into link
/// factors, writing `c2 ∂² + c1 ∂ + c0` as `c2 E⁻¹ ∂² E + c̃0` (and
/// `c1 ∂ + c0` as `c1 E⁻¹ ∂ E`) before discretizing. Diagonal similarity
/// transforms of a symbol then map to the same similarity of its matrix, so
/// gauge equivalence and diagonal metrics survive discretization. The map is
/// not linear in the symbol; `Plain` is.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Plain,
    #[default]
    Covariant,
}

/// Uniform truncated momentum grid `p_k = -p_max + k h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_points: usize,
    p_max: f64,
    mask_fraction: f64,
    scheme: Scheme,
}

impl Grid {
    pub fn new(n_points: usize, p_max: f64, mask_fraction: f64) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!(
                "n_points must be at least 3, got {n_points}"
            )));
        }
        if n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n_points must be odd so that p = 0 is a sample, got {n_points}"
            )));
        }
        if !(p_max.is_finite() && p_max > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "p_max must be positive and finite, got {p_max}"
            )));
        }
        if !(0.0..0.5).contains(&mask_fraction) {
            return Err(Error::InvalidGrid(format!(
                "mask_fraction must lie in [0, 0.5), got {mask_fraction}"
            )));
        }
        let grid = Self {
            n_points,
            p_max,
            mask_fraction,
            scheme: Scheme::default(),
        };
        if grid.interior().len() < 3 {
            return Err(Error::InvalidGrid(format!(
                "mask_fraction {mask_fraction} leaves fewer than 3 interior points of {n_points}"
            )));
        }
        Ok(grid)
    }

    /// 257 points on [-8, 8], used for algebra checks.
    pub fn algebra_default() -> Self {
        Self::new(257, 8.0, 0.25).expect("default grid is valid")
    }

    /// 513 points on [-10, 10], used for spectra.
    pub fn spectra_default() -> Self {
        Self::new(513, 10.0, 0.25).expect("default grid is valid")
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn mask_fraction(&self) -> f64 {
        self.mask_fraction
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.p_max / (self.n_points - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        // exact zero at the center, symmetric samples elsewhere
        let c = self.center() as isize;
        (k as isize - c) as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.point(k)).collect()
    }

    /// Index of the sample at `p = 0`.
    pub fn center(&self) -> usize {
        self.n_points / 2
    }

    /// Points kept by interior-only norms.
    pub fn interior(&self) -> Range<usize> {
        let cut = (self.mask_fraction * self.n_points as f64).floor() as usize;
        cut..self.n_points.saturating_sub(cut)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_points() {
        let g = Grid::new(5, 2.0, 0.0).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.points(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(g.point(g.center()), 0.0);
    }

    #[test]
    fn interior_cut() {
        let g = Grid::new(9, 1.0, 0.25).unwrap();
        assert_eq!(g.interior(), 2..7);
        let g = Grid::algebra_default();
        assert_eq!(g.interior(), 64..193);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(256, 8.0, 0.25).is_err());
        assert!(Grid::new(257, 0.0, 0.25).is_err());
        assert!(Grid::new(257, 8.0, 0.5).is_err());
        assert!(Grid::new(257, 8.0, -0.1).is_err());
        // 7 points with 0.45 masked per side leaves 1 point
        assert!(Grid::new(7, 1.0, 0.45).is_err());
    }

    #[test]
    fn symmetric_samples() {
        let g = Grid::spectra_default();
        let p = g.points();
        for k in 0..p.len() {
            assert_eq!(p[k], -p[p.len() - 1 - k]);
        }
        assert!((p[0] + 10.0).abs() < 1e-12);
    }
}
