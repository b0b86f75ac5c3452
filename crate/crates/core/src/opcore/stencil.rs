//! Second-order finite-difference stencils on a [`Grid`].
//!
//! Rows are stored sparsely as `(column, weight)` pairs so the symbol
//! realization can attach link factors to each neighbour.

use num_complex::Complex64;

use super::grid::Grid;
use super::operator::Operator;
use crate::error::{Error, Result};

pub(crate) type StencilRow = Vec<(usize, f64)>;

/// Central first difference; one-sided second-order rows at the ends.
pub(crate) fn first_derivative_rows(n: usize, h: f64) -> Vec<StencilRow> {
    let s = 1.0 / (2.0 * h);
    (0..n)
        .map(|j| {
            if j == 0 {
                vec![(0, -3.0 * s), (1, 4.0 * s), (2, -s)]
            } else if j == n - 1 {
                vec![(n - 3, s), (n - 2, -4.0 * s), (n - 1, 3.0 * s)]
            } else {
                vec![(j - 1, -s), (j + 1, s)]
            }
        })
        .collect()
}

/// Compact three-point second difference; one-sided four-point rows at the ends.
pub(crate) fn second_derivative_rows(n: usize, h: f64) -> Vec<StencilRow> {
    let s = 1.0 / (h * h);
    (0..n)
        .map(|j| {
            if j == 0 {
                vec![(0, 2.0 * s), (1, -5.0 * s), (2, 4.0 * s), (3, -s)]
            } else if j == n - 1 {
                vec![
                    (n - 4, -s),
                    (n - 3, 4.0 * s),
                    (n - 2, -5.0 * s),
                    (n - 1, 2.0 * s),
                ]
            } else {
                vec![(j - 1, s), (j, -2.0 * s), (j + 1, s)]
            }
        })
        .collect()
}

fn rows_to_operator(grid: &Grid, rows: &[StencilRow]) -> Operator {
    let mut op = Operator::zeros(grid);
    for (j, row) in rows.iter().enumerate() {
        for &(k, w) in row {
            op.set(j, k, Complex64::new(w, 0.0));
        }
    }
    op
}

/// Matrix of `∂/∂p`: `D[j, j±1] = ±1/(2h)` on interior rows.
pub fn derivative_matrix(grid: &Grid) -> Result<Operator> {
    if grid.n_points() < 5 {
        return Err(Error::InvalidGrid(format!(
            "derivative stencil needs at least 5 points, got {}",
            grid.n_points()
        )));
    }
    Ok(rows_to_operator(
        grid,
        &first_derivative_rows(grid.n_points(), grid.spacing()),
    ))
}

/// Matrix of `∂²/∂p²` with the compact `[1, −2, 1]/h²` stencil.
pub fn second_difference_matrix(grid: &Grid) -> Result<Operator> {
    if grid.n_points() < 5 {
        return Err(Error::InvalidGrid(format!(
            "second-difference stencil needs at least 5 points, got {}",
            grid.n_points()
        )));
    }
    Ok(rows_to_operator(
        grid,
        &second_derivative_rows(grid.n_points(), grid.spacing()),
    ))
}
