use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::residuals::dieudonne_residual;
use crate::error::{Error, Result};
use crate::metrics::{build_metric, profile_distance, MetricSpec};
use crate::models::PhysParams;
use crate::opcore::Operator;

/// Relative singular-value gap below which the null space is not one-dimensional.
pub const AMBIGUITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FitStatus {
    Ok,
    /// The two smallest singular values are too close to pick a solution.
    Ambiguous,
    /// The recovered profile changes sign.
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub label: String,
    /// Profile distance to the fitted metric.
    pub distance: f64,
    /// Masked Dieudonné residual of the candidate itself.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub status: FitStatus,
    /// Interior momenta.
    pub points: Vec<f64>,
    /// Fitted profile on `points`, scaled to 1 at `p = 0`.
    pub profile: Vec<f64>,
    /// `σ_min / σ_max` of the constraint map.
    pub fit_residual: f64,
    /// `(σ_2 − σ_min) / σ_max`.
    pub gap: f64,
    /// Least-squares `c` in `ln g ≈ c p² + const`, when `g > 0`.
    pub log_quadratic: Option<f64>,
    pub candidates: Vec<CandidateScore>,
    pub nearest: Option<String>,
}

/// Real stacked map `g ↦ interior block of H†diag(g) − diag(g)H`.
fn constraint_map(h: &Operator) -> Mat<f64> {
    let r = h.interior();
    let n = r.len();
    let mut rows: Vec<(usize, f64, usize, f64)> = Vec::new();
    let mut push = |a: usize, ca: Complex64, b: usize, cb: Complex64| {
        rows.push((a, ca.re, b, cb.re));
        rows.push((a, ca.im, b, cb.im));
    };
    for j in 0..n {
        for k in j..n {
            let (hjk, hkj) = (
                h.get(r.start + j, r.start + k),
                h.get(r.start + k, r.start + j),
            );
            if hjk.norm() == 0.0 && hkj.norm() == 0.0 {
                continue;
            }
            // conj(H[k, j]) g_k − H[j, k] g_j
            push(k, hkj.conj(), j, -hjk);
        }
    }
    let m = rows.len().max(n);
    let mut a = Mat::<f64>::zeros(m, n);
    for (i, &(c1, v1, c2, v2)) in rows.iter().enumerate() {
        a[(i, c1)] += v1;
        a[(i, c2)] += v2;
    }
    a
}

fn log_quadratic(points: &[f64], profile: &[f64]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p * p).collect();
    let ys: Vec<f64> = profile.iter().map(|g| g.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Recover the diagonal metric of `h` from the smallest singular pair of the
/// Dieudonné constraint on interior points, and score the two composite
/// candidates against it.
pub fn fit_diagonal_metric(h: &Operator, pp: &PhysParams) -> Result<FitResult> {
    let grid = *h
        .grid()
        .ok_or_else(|| Error::Precondition("metric fitting needs a grid".into()))?;
    let interior = grid.interior();
    if interior.len() < 8 {
        return Err(Error::Precondition(format!(
            "metric fitting needs at least 8 interior points, got {}",
            interior.len()
        )));
    }
    let a = constraint_map(h);
    let svd = a.thin_svd().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let n = interior.len();
    let (smax, smin, s2) = (s[0], s[n - 1], s[n - 2]);
    let gap = if smax > 0.0 { (s2 - smin) / smax } else { 0.0 };
    let fit_residual = if smax > 0.0 { smin / smax } else { 0.0 };
    let points: Vec<f64> = interior.clone().map(|k| grid.point(k)).collect();

    let c = grid.center() - interior.start;
    let v = svd.V().col(n - 1);
    let mut status = if gap < AMBIGUITY_TOL {
        FitStatus::Ambiguous
    } else {
        FitStatus::Ok
    };
    let profile: Vec<f64> = if v[c] != 0.0 {
        (0..n).map(|i| v[i] / v[c]).collect()
    } else {
        vec![0.0; n]
    };
    if status == FitStatus::Ok && profile.iter().any(|&g| g.is_nan() || g <= 0.0) {
        status = FitStatus::Invalid;
    }

    let mut candidates = Vec::new();
    let mut nearest = None;
    if status == FitStatus::Ok {
        let mut full = vec![1.0; grid.n_points()];
        full[interior.clone()].copy_from_slice(&profile);
        for spec in [MetricSpec::bf_composite(), MetricSpec::jr_composite()] {
            let reference = match spec.profile(&grid, pp) {
                Ok(r) => r,
                Err(Error::InvalidParams(msg)) => {
                    log::info!("skipping candidate {spec}: {msg}");
                    continue;
                }
                Err(e) => return Err(e),
            };
            let rho = build_metric(&spec, &grid, pp)?;
            candidates.push(CandidateScore {
                label: spec.to_string(),
                distance: profile_distance(&full, &reference, &grid)?,
                residual: dieudonne_residual(h, &rho)?.masked,
            });
        }
        nearest = candidates
            .iter()
            .min_by(|a, b| a.distance.total_cmp(&b.distance))
            .map(|c| c.label.clone());
    }
    let log_quadratic = (status == FitStatus::Ok).then(|| log_quadratic(&points, &profile));
    Ok(FitResult {
        status,
        points,
        profile,
        fit_residual,
        gap,
        log_quadratic,
        candidates,
        nearest,
    })
}
