use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::residuals::hermitian_counterpart;
use crate::error::Result;
use crate::opcore::{eig, eigh, Operator, HERMITIAN_TOL};

/// Eigenvectors with less than this share of their weight on interior points
/// are treated as truncation artifacts.
pub const INTERIOR_MASS: f64 = 0.9;

/// Direct and counterpart spectra may differ by this much before the direct
/// one is flagged untrusted.
pub const TRUST_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Interior-localized eigenvalues, ascending in real part.
    pub eigenvalues: Vec<Complex64>,
    /// `max |Im λ|` over the returned eigenvalues.
    pub reality: f64,
}

fn interior_share(vectors: &Mat<Complex64>, col: usize, interior: &std::ops::Range<usize>) -> f64 {
    let (mut inside, mut total) = (0.0, 0.0);
    for i in 0..vectors.nrows() {
        let m = vectors[(i, col)].norm_sqr();
        total += m;
        if interior.contains(&i) {
            inside += m;
        }
    }
    inside / total
}

/// The `k` lowest interior-localized eigenvalues of `h`.
///
/// Hermitian input goes through the symmetric solver, so its eigenvalues are
/// exactly real.
pub fn spectrum(h: &Operator, k: usize) -> Result<Spectrum> {
    let (values, vectors) = if h.hermiticity_defect() < HERMITIAN_TOL {
        let (v, u) = eigh(&h.hermitian_part())?;
        (v.into_iter().map(|x| Complex64::new(x, 0.0)).collect(), u)
    } else {
        eig(h)?
    };
    let interior = h.interior();
    let mut kept: Vec<Complex64> = values
        .iter()
        .enumerate()
        .filter(|&(j, _)| interior_share(&vectors, j, &interior) >= INTERIOR_MASS)
        .map(|(_, &v)| v)
        .collect();
    kept.sort_by(|a, b| a.re.total_cmp(&b.re));
    kept.truncate(k);
    let reality = kept.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    Ok(Spectrum {
        eigenvalues: kept,
        reality,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckedSpectrum {
    pub direct: Spectrum,
    /// Spectrum of `ρ^{1/2} H ρ^{−1/2}`.
    pub counterpart: Spectrum,
    /// Masked Hermiticity defect of the counterpart.
    pub herm_residual: f64,
    /// Largest eigenvalue difference over the common prefix.
    pub discrepancy: f64,
    pub trusted: bool,
}

/// Compare the direct spectrum with that of the Hermitian counterpart under `rho`.
pub fn cross_checked_spectrum(h: &Operator, rho: &Operator, k: usize) -> Result<CheckedSpectrum> {
    let direct = spectrum(h, k)?;
    let (hc, herm_residual) = hermitian_counterpart(h, rho)?;
    let counterpart = spectrum(&hc.hermitian_part(), k)?;
    let discrepancy = direct
        .eigenvalues
        .iter()
        .zip(&counterpart.eigenvalues)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let trusted =
        discrepancy <= TRUST_TOL && direct.eigenvalues.len() == counterpart.eigenvalues.len();
    Ok(CheckedSpectrum {
        direct,
        counterpart,
        herm_residual,
        discrepancy,
        trusted,
    })
}
