use faer::{Mat, Side};
use num_complex::Complex64;

use super::operator::Operator;
use crate::error::{Error, Result};

/// Hermiticity tolerance on `‖A − A†‖_F / ‖A‖_F`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Largest admissible `max|f(λ)| / min|f(λ)|` for a matrix function.
pub const CONDITION_LIMIT: f64 = 1e14;

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian operator.
pub(crate) fn eigh(a: &Operator) -> Result<(Vec<f64>, Mat<Complex64>)> {
    let defect = a.hermiticity_defect();
    if defect >= HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let evd = a
        .mat()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..a.dim()).map(|i| s[i].re).collect();
    Ok((values, evd.U().to_owned()))
}

/// Eigenvalues and right eigenvectors of a general square operator.
pub(crate) fn eig(a: &Operator) -> Result<(Vec<Complex64>, Mat<Complex64>)> {
    let evd = a
        .mat()
        .eigen()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..a.dim()).map(|i| s[i]).collect();
    Ok((values, evd.U().to_owned()))
}

fn check_condition(values: &[f64], limit: Option<f64>) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Overflow {
            ratio: v.abs(),
            limit: limit.unwrap_or(f64::INFINITY),
        });
    }
    let Some(limit) = limit else { return Ok(()) };
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if max == 0.0 {
        return Ok(());
    }
    let ratio = max / min;
    if ratio > limit {
        return Err(Error::Overflow { ratio, limit });
    }
    Ok(())
}

/// `f(A) = U f(Λ) U†` for Hermitian `A`, guarded at [`CONDITION_LIMIT`].
pub fn hermitian_matrix_function(a: &Operator, f: impl Fn(f64) -> f64) -> Result<Operator> {
    hermitian_matrix_function_with_limit(a, f, Some(CONDITION_LIMIT))
}

/// As [`hermitian_matrix_function`] with an explicit guard; `None` only
/// rejects non-finite values of `f`.
pub fn hermitian_matrix_function_with_limit(
    a: &Operator,
    f: impl Fn(f64) -> f64,
    limit: Option<f64>,
) -> Result<Operator> {
    if a.is_diagonal() {
        let defect = a.hermiticity_defect();
        if defect >= HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let fd: Vec<f64> = a.diagonal_entries().iter().map(|z| f(z.re)).collect();
        check_condition(&fd, limit)?;
        let n = a.dim();
        let m = Mat::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(fd[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        return Ok(Operator::from_mat(a.grid().copied(), m));
    }
    let (values, u) = eigh(a)?;
    let fd: Vec<f64> = values.iter().map(|&l| f(l)).collect();
    check_condition(&fd, limit)?;
    let n = a.dim();
    let scaled = Mat::from_fn(n, n, |i, j| u[(i, j)] * fd[j]);
    let m = &scaled * u.adjoint();
    // symmetrize away rounding so the result is Hermitian to the last bit
    let herm = Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    Ok(Operator::from_mat(a.grid().copied(), herm))
}

/// `A^s` for Hermitian `A`; non-integer `s` requires a strictly positive spectrum.
pub fn hermitian_power(a: &Operator, s: f64) -> Result<Operator> {
    let integer = s.fract() == 0.0;
    if !integer {
        let min = if a.is_diagonal() {
            a.diagonal_entries()
                .iter()
                .map(|z| z.re)
                .fold(f64::INFINITY, f64::min)
        } else {
            eigh(a)?.0.first().copied().unwrap_or(f64::INFINITY)
        };
        if min <= 0.0 {
            return Err(Error::NonPositiveSpectrum(min));
        }
    }
    hermitian_matrix_function(a, |l| l.powf(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::Grid;

    fn random_hermitian(grid: &Grid, seed: u64, shift: f64) -> Operator {
        let mut state = seed;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let n = grid.n_points();
        let mut m = Operator::zeros(grid);
        for i in 0..n {
            m.set(i, i, Complex64::new(next() + shift, 0.0));
            for j in 0..i {
                let z = Complex64::new(next(), next());
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        m
    }

    #[test]
    fn exp_on_diagonal() {
        let a = Operator::from_real_rows(&[vec![0.0, 0.0], vec![0.0, 2f64.ln()]]).unwrap();
        let e = hermitian_matrix_function(&a, f64::exp).unwrap();
        assert!((e.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((e.get(1, 1).re - 2.0).abs() < 1e-15);
        assert_eq!(e.get(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn square_matches_product() {
        let g = Grid::new(15, 1.0, 0.0).unwrap();
        let a = random_hermitian(&g, 7, 4.0);
        let sq = hermitian_matrix_function(&a, |t| t * t).unwrap();
        let prod = a.product(&a).unwrap();
        let rel = sq.difference(&prod).unwrap().frobenius_norm() / prod.frobenius_norm();
        assert!(rel < 1e-12, "{rel}");
    }

    #[test]
    fn identity_function_reproduces_input() {
        let g = Grid::new(21, 1.0, 0.0).unwrap();
        let a = random_hermitian(&g, 11, 0.0);
        let same = hermitian_matrix_function_with_limit(&a, |t| t, None).unwrap();
        let rel = same.difference(&a).unwrap().frobenius_norm() / a.frobenius_norm();
        assert!(rel < 1e-12, "{rel}");
    }

    #[test]
    fn rational_function_on_momentum() {
        let g = Grid::new(41, 2.0, 0.0).unwrap();
        let p = Operator::multiplication(&g, |x| x);
        let r = hermitian_matrix_function(&p, |t| 1.0 / (1.0 + 0.1 * t * t)).unwrap();
        for (k, x) in g.points().iter().enumerate() {
            assert!((r.get(k, k).re - 1.0 / (1.0 + 0.1 * x * x)).abs() < 1e-15);
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let a = Operator::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 2.0]]).unwrap();
        assert!(matches!(
            hermitian_matrix_function(&a, f64::exp),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn fractional_power_needs_positive_spectrum() {
        let a = Operator::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(matches!(
            hermitian_power(&a, 0.5),
            Err(Error::NonPositiveSpectrum(_))
        ));
        assert!(hermitian_power(&a, 2.0).is_ok());
        let g = Grid::new(11, 1.0, 0.0).unwrap();
        let b = random_hermitian(&g, 3, 0.0);
        let b2 = b.product(&b).unwrap().sum(&Operator::identity(&g)).unwrap();
        let root = hermitian_power(&b2, 0.5).unwrap();
        let back = root.product(&root).unwrap();
        assert!(back.difference(&b2).unwrap().frobenius_norm() / b2.frobenius_norm() < 1e-12);
    }

    #[test]
    fn overflow_guard() {
        let g = Grid::spectra_default();
        let p2 = Operator::multiplication(&g, |x| x * x);
        // e^{0.5 p²} spans e^{50} on p ∈ [-10, 10]
        assert!(matches!(
            hermitian_matrix_function(&p2, |t| (0.5 * t).exp()),
            Err(Error::Overflow { .. })
        ));
        assert!(hermitian_matrix_function(&p2, |t| (0.2 * t).exp()).is_ok());
    }
}
