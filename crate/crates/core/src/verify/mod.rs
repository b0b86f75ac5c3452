//! Dieudonné residuals, spectra, metric recovery and model comparison.

mod equality;
mod fit;
mod residuals;
mod spectrum;

pub use equality::{
    fitted_coupling, model_equality_report, EqualityReport, EqualityTerm, ANTICOMMUTATOR, RANK_TOL,
};
pub use fit::{fit_diagonal_metric, CandidateScore, FitResult, FitStatus, AMBIGUITY_TOL};
pub use residuals::{
    check_x_quasi_hermiticity, dieudonne_residual, hermitian_counterpart, Residual,
};
pub use spectrum::{
    cross_checked_spectrum, spectrum, CheckedSpectrum, Spectrum, INTERIOR_MASS, TRUST_TOL,
};
