use std::fmt;

use faer::Mat;
use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Dense square complex matrix, optionally tagged with the grid it lives on.
///
/// Gridless operators (built with [`Operator::from_rows`]) treat every index
/// as interior.
#[derive(Clone)]
pub struct Operator {
    grid: Option<Grid>,
    entries: Mat<Complex64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("dim", &self.dim())
            .field("grid", &self.grid)
            .finish()
    }
}

impl Operator {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.n_points();
        Self {
            grid: Some(*grid),
            entries: Mat::zeros(n, n),
        }
    }

    pub fn identity(grid: &Grid) -> Self {
        let n = grid.n_points();
        Self {
            grid: Some(*grid),
            entries: Mat::identity(n, n),
        }
    }

    pub fn from_fn(grid: &Grid, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let n = grid.n_points();
        Self {
            grid: Some(*grid),
            entries: Mat::from_fn(n, n, f),
        }
    }

    pub fn diagonal(grid: &Grid, diag: &[Complex64]) -> Result<Self> {
        if diag.len() != grid.n_points() {
            return Err(Error::DimensionMismatch {
                left: diag.len(),
                right: grid.n_points(),
            });
        }
        Ok(Self::from_fn(grid, |i, j| {
            if i == j {
                diag[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn real_diagonal(grid: &Grid, diag: &[f64]) -> Result<Self> {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(grid, &d)
    }

    /// Multiplication by `f(p)` at every grid sample.
    pub fn multiplication(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let p = grid.points();
        Self::from_fn(grid, |i, j| {
            if i == j {
                Complex64::new(f(p[i]), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Gridless operator from row-major data.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Precondition("empty operator".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                left: r.len(),
                right: n,
            });
        }
        Ok(Self {
            grid: None,
            entries: Mat::from_fn(n, n, |i, j| rows[i][j]),
        })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub(crate) fn from_mat(grid: Option<Grid>, entries: Mat<Complex64>) -> Self {
        debug_assert_eq!(entries.nrows(), entries.ncols());
        if let Some(g) = &grid {
            debug_assert_eq!(g.n_points(), entries.nrows());
        }
        Self { grid, entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.grid.as_ref()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[(i, j)] = value;
    }

    pub fn mat(&self) -> &Mat<Complex64> {
        &self.entries
    }

    pub fn row(&self, i: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|j| self.entries[(i, j)]).collect()
    }

    pub fn diagonal_entries(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.entries[(i, i)]).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| i == j || self.entries[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    /// Index range used by masked norms.
    pub fn interior(&self) -> std::ops::Range<usize> {
        match &self.grid {
            Some(g) => g.interior(),
            None => 0..self.dim(),
        }
    }

    fn check_compatible(&self, other: &Operator) -> Result<Option<Grid>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        match (&self.grid, &other.grid) {
            (Some(a), Some(b)) if a != b => Err(Error::GridMismatch),
            (Some(a), _) => Ok(Some(*a)),
            (None, b) => Ok(*b),
        }
    }

    pub fn product(&self, other: &Operator) -> Result<Operator> {
        let grid = self.check_compatible(other)?;
        Ok(Self::from_mat(grid, &self.entries * &other.entries))
    }

    pub fn sum(&self, other: &Operator) -> Result<Operator> {
        let grid = self.check_compatible(other)?;
        Ok(Self::from_mat(grid, &self.entries + &other.entries))
    }

    pub fn difference(&self, other: &Operator) -> Result<Operator> {
        let grid = self.check_compatible(other)?;
        Ok(Self::from_mat(grid, &self.entries - &other.entries))
    }

    pub fn scale(&self, c: Complex64) -> Operator {
        let n = self.dim();
        Self::from_mat(
            self.grid,
            Mat::from_fn(n, n, |i, j| c * self.entries[(i, j)]),
        )
    }

    pub fn scale_real(&self, c: f64) -> Operator {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Operator {
        Self::from_mat(self.grid, self.entries.adjoint().to_owned())
    }

    /// `AB - BA`
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.product(other)?.difference(&other.product(self)?)
    }

    /// `AB + BA`
    pub fn anticommutator(&self, other: &Operator) -> Result<Operator> {
        self.product(other)?.sum(&other.product(self)?)
    }

    /// `(A + A†)/2`
    pub fn hermitian_part(&self) -> Operator {
        let n = self.dim();
        let m = Mat::from_fn(n, n, |i, j| {
            (self.entries[(i, j)] + self.entries[(j, i)].conj()) * 0.5
        });
        Self::from_mat(self.grid, m)
    }

    /// Multiply row `i` by `left[i]` and column `j` by `right[j]`.
    pub fn diagonal_similarity(&self, left: &[Complex64], right: &[Complex64]) -> Result<Operator> {
        let n = self.dim();
        if left.len() != n || right.len() != n {
            return Err(Error::DimensionMismatch {
                left: left.len().min(right.len()),
                right: n,
            });
        }
        Ok(Self::from_mat(
            self.grid,
            Mat::from_fn(n, n, |i, j| left[i] * self.entries[(i, j)] * right[j]),
        ))
    }

    /// Frobenius norm over all entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm_l2()
    }

    /// Frobenius norm of the interior-by-interior block.
    pub fn interior_norm(&self) -> f64 {
        let r = self.interior();
        self.entries
            .as_ref()
            .submatrix(r.start, r.start, r.len(), r.len())
            .norm_l2()
    }

    /// `‖A − A†‖_F / ‖A‖_F` over the full matrix; zero for the zero matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        (&self.entries - self.entries.adjoint()).norm_l2() / norm
    }
}

/// Interior Frobenius norm of `a`, divided by the product of the interior
/// norms of `relative_to` when that list is nonempty.
pub fn masked_norm(a: &Operator, relative_to: &[&Operator]) -> Result<f64> {
    let r = a.interior();
    if r.is_empty() {
        return Err(Error::Precondition("empty interior".into()));
    }
    let num = a.interior_norm();
    if relative_to.is_empty() {
        return Ok(num);
    }
    let mut den = 1.0;
    for b in relative_to {
        if b.dim() != a.dim() {
            return Err(Error::DimensionMismatch {
                left: a.dim(),
                right: b.dim(),
            });
        }
        den *= b.interior_norm();
    }
    if den == 0.0 {
        if num == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Precondition(
            "relative norm requested against an operator with zero interior".into(),
        ));
    }
    Ok(num / den)
}

/// Full-matrix counterpart of [`masked_norm`].
pub fn unmasked_norm(a: &Operator, relative_to: &[&Operator]) -> Result<f64> {
    let num = a.frobenius_norm();
    let mut den = 1.0;
    for b in relative_to {
        if b.dim() != a.dim() {
            return Err(Error::DimensionMismatch {
                left: a.dim(),
                right: b.dim(),
            });
        }
        den *= b.frobenius_norm();
    }
    if den == 0.0 {
        return if num == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::Precondition(
                "relative norm requested against a zero operator".into(),
            ))
        };
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn commutator_of_ladder_pair() {
        let a = Operator::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let b = Operator::from_real_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let k = a.commutator(&b).unwrap();
        assert_eq!(k.get(0, 0), c(1.0));
        assert_eq!(k.get(1, 1), c(-1.0));
        assert_eq!(k.get(0, 1), c(0.0));
        assert_eq!(k.get(1, 0), c(0.0));
    }

    #[test]
    fn self_commutator_vanishes() {
        let g = Grid::new(9, 1.0, 0.0).unwrap();
        let a = Operator::from_fn(&g, |i, j| {
            Complex64::new((i * 3 + j) as f64, (i as f64) - (j as f64))
        });
        assert_eq!(a.commutator(&a).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn anticommutator_of_diagonal_functions() {
        let g = Grid::new(11, 2.0, 0.0).unwrap();
        let p = Operator::multiplication(&g, |x| x);
        let gp = Operator::multiplication(&g, |x| (x * 0.7).sin() + x * x);
        let ac = p.anticommutator(&gp).unwrap();
        let expected = Operator::multiplication(&g, |x| 2.0 * x * ((x * 0.7).sin() + x * x));
        assert!(ac.difference(&expected).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn masked_norm_values() {
        let g = Grid::new(9, 1.0, 0.25).unwrap();
        let z = Operator::zeros(&g);
        assert_eq!(masked_norm(&z, &[]).unwrap(), 0.0);
        let id = Operator::identity(&g);
        assert!((masked_norm(&id, &[]).unwrap() - 5f64.sqrt()).abs() < 1e-15);
        assert!((masked_norm(&id, &[&id]).unwrap() - 1.0).abs() < 1e-15);
        let scaled = id.scale_real(3.5);
        assert!((masked_norm(&scaled, &[&scaled]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let a = Operator::identity(&Grid::new(5, 1.0, 0.0).unwrap());
        let b = Operator::identity(&Grid::new(7, 1.0, 0.0).unwrap());
        assert!(matches!(
            a.product(&b),
            Err(Error::DimensionMismatch { .. })
        ));
        let c = Operator::identity(&Grid::new(5, 2.0, 0.0).unwrap());
        assert!(matches!(a.sum(&c), Err(Error::GridMismatch)));
    }
}
