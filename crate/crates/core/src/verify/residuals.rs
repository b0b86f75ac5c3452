use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::opcore::{eigh, hermitian_power, masked_norm, unmasked_norm, Operator, HERMITIAN_TOL};

/// A relative residual with and without interior masking.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub masked: f64,
    pub unmasked: f64,
}

impl Residual {
    fn of(a: &Operator, relative_to: &[&Operator]) -> Result<Self> {
        Ok(Self {
            masked: masked_norm(a, relative_to)?,
            unmasked: unmasked_norm(a, relative_to)?,
        })
    }
}

fn warn_if_not_positive(rho: &Operator) {
    let min = if rho.is_diagonal() {
        rho.diagonal_entries()
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min)
    } else if rho.hermiticity_defect() < HERMITIAN_TOL {
        eigh(rho).map(|(v, _)| v[0]).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    if min.is_nan() || min <= 0.0 {
        log::warn!("metric is not positive definite (smallest eigenvalue {min:.3e})");
    }
}

/// `‖H†ρ − ρH‖ / (‖H‖·‖ρ‖)`.
pub fn dieudonne_residual(h: &Operator, rho: &Operator) -> Result<Residual> {
    warn_if_not_positive(rho);
    let defect = h.adjoint().product(rho)?.difference(&rho.product(h)?)?;
    Residual::of(&defect, &[h, rho])
}

/// Masked `‖X†η − ηX‖ / (‖X‖·‖η‖)`.
pub fn check_x_quasi_hermiticity(x: &Operator, eta: &Operator) -> Result<f64> {
    Ok(dieudonne_residual(x, eta)?.masked)
}

/// `h = ρ^{1/2} H ρ^{−1/2}` and its masked relative Hermiticity defect.
pub fn hermitian_counterpart(h: &Operator, rho: &Operator) -> Result<(Operator, f64)> {
    let root = hermitian_power(rho, 0.5)?;
    let inv_root = hermitian_power(rho, -0.5)?;
    let hc = root.product(h)?.product(&inv_root)?;
    let defect = masked_norm(&hc.difference(&hc.adjoint())?, &[&hc])?;
    Ok((hc, defect))
}
