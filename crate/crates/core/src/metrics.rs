//! Candidate metric operators, diagonal in momentum, and `τ → 0` sweeps.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::PhysParams;
use crate::opcore::{Grid, Operator, CONDITION_LIMIT};

/// A strictly positive profile `g(p)`, resolved against [`PhysParams`] when built.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricSpec {
    /// `exp(2μp²)`.
    Bf,
    /// `(1 + τp²)^{μ/(ω²τ)}`, defined for `τ > 0` only.
    Jr,
    /// `exp(θp²)`.
    ExpTheta(f64),
    /// `(1 + τp²)^{-1}`, the factor making `X` quasi-Hermitian.
    DeformWeight,
    /// `exp(2μp²/ω²)`, the metric of the undeformed Swanson oscillator.
    Undeformed,
    Product(Vec<MetricSpec>),
    Inverse(Box<MetricSpec>),
}

impl MetricSpec {
    /// `DeformWeight · Undeformed`.
    pub fn bf_composite() -> Self {
        Self::Product(vec![Self::DeformWeight, Self::Undeformed])
    }

    /// `DeformWeight · JR`.
    pub fn jr_composite() -> Self {
        Self::Product(vec![Self::DeformWeight, Self::Jr])
    }

    fn check(&self, pp: &PhysParams) -> Result<()> {
        match self {
            Self::Jr if pp.tau <= 0.0 => {
                Err(Error::InvalidParams("the JR metric needs tau > 0".into()))
            }
            Self::ExpTheta(t) if !t.is_finite() => Err(Error::InvalidParams(format!(
                "theta must be finite, got {t}"
            ))),
            Self::Product(parts) => parts.iter().try_for_each(|s| s.check(pp)),
            Self::Inverse(inner) => inner.check(pp),
            _ => Ok(()),
        }
    }

    fn log_at(&self, p: f64, pp: &PhysParams) -> f64 {
        let p2 = p * p;
        match self {
            Self::Bf => 2.0 * pp.mu * p2,
            Self::Jr => pp.mu / (pp.omega * pp.omega * pp.tau) * (pp.tau * p2).ln_1p(),
            Self::ExpTheta(t) => t * p2,
            Self::DeformWeight => -(pp.tau * p2).ln_1p(),
            Self::Undeformed => 2.0 * pp.mu * p2 / (pp.omega * pp.omega),
            Self::Product(parts) => parts.iter().map(|s| s.log_at(p, pp)).sum(),
            Self::Inverse(inner) => -inner.log_at(p, pp),
        }
    }

    /// `ln g(p)`.
    pub fn log_profile(&self, p: f64, pp: &PhysParams) -> Result<f64> {
        self.check(pp)?;
        Ok(self.log_at(p, pp))
    }

    /// `g(p_k)` on every grid point, guarded against overflow.
    pub fn profile(&self, grid: &Grid, pp: &PhysParams) -> Result<Vec<f64>> {
        self.check(pp)?;
        let logs: Vec<f64> = grid.points().iter().map(|&x| self.log_at(x, pp)).collect();
        let cond = log_condition(&logs)?;
        if cond > CONDITION_LIMIT.ln() {
            return Err(Error::Overflow {
                ratio: cond.exp(),
                limit: CONDITION_LIMIT,
            });
        }
        Ok(logs.iter().map(|l| l.exp()).collect())
    }

    /// `max g / min g` over the grid.
    pub fn condition_number(&self, grid: &Grid, pp: &PhysParams) -> Result<f64> {
        self.check(pp)?;
        let logs: Vec<f64> = grid.points().iter().map(|&x| self.log_at(x, pp)).collect();
        Ok(log_condition(&logs)?.exp())
    }
}

fn log_condition(logs: &[f64]) -> Result<f64> {
    if logs.iter().any(|l| !l.is_finite()) {
        return Err(Error::Overflow {
            ratio: f64::INFINITY,
            limit: CONDITION_LIMIT,
        });
    }
    let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(hi - lo)
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::bf_composite() {
            return write!(f, "BF-composite");
        }
        if *self == Self::jr_composite() {
            return write!(f, "JR-composite");
        }
        match self {
            Self::Bf => write!(f, "BF"),
            Self::Jr => write!(f, "JR"),
            Self::ExpTheta(t) => write!(f, "ExpTheta({t})"),
            Self::DeformWeight => write!(f, "DeformWeight"),
            Self::Undeformed => write!(f, "Undeformed"),
            Self::Inverse(inner) => write!(f, "Inverse({inner})"),
            Self::Product(parts) => {
                for (i, s) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{s}")?;
                }
                Ok(())
            }
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

impl FromStr for MetricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parts = split_top_level(s);
        if parts.len() > 1 {
            return parts
                .into_iter()
                .map(str::parse)
                .collect::<Result<Vec<_>>>()
                .map(Self::Product);
        }
        let bad = || Error::InvalidParams(format!("unknown metric label '{s}'"));
        if let Some(arg) = s
            .strip_prefix("ExpTheta(")
            .and_then(|r| r.strip_suffix(')'))
        {
            let theta: f64 = arg.trim().parse().map_err(|_| bad())?;
            return Ok(Self::ExpTheta(theta));
        }
        if let Some(arg) = s.strip_prefix("Inverse(").and_then(|r| r.strip_suffix(')')) {
            return Ok(Self::Inverse(Box::new(arg.parse()?)));
        }
        match s {
            "BF" => Ok(Self::Bf),
            "JR" => Ok(Self::Jr),
            "DeformWeight" => Ok(Self::DeformWeight),
            "Undeformed" => Ok(Self::Undeformed),
            "BF-composite" => Ok(Self::bf_composite()),
            "JR-composite" => Ok(Self::jr_composite()),
            _ => Err(bad()),
        }
    }
}

impl Serialize for MetricSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MetricSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Positive diagonal metric operator for `spec`.
pub fn build_metric(spec: &MetricSpec, grid: &Grid, pp: &PhysParams) -> Result<Operator> {
    Operator::real_diagonal(grid, &spec.profile(grid, pp)?)
}

/// Masked relative distance between two profiles after scaling each to 1 at `p = 0`.
pub fn profile_distance(g: &[f64], reference: &[f64], grid: &Grid) -> Result<f64> {
    let n = grid.n_points();
    if g.len() != n || reference.len() != n {
        return Err(Error::DimensionMismatch {
            left: g.len().min(reference.len()),
            right: n,
        });
    }
    let c = grid.center();
    if g[c] <= 0.0 || reference[c] <= 0.0 {
        return Err(Error::Precondition(
            "profile is not positive at p = 0".into(),
        ));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for k in grid.interior() {
        let r = reference[k] / reference[c];
        num += (g[k] / g[c] - r).powi(2);
        den += r * r;
    }
    Ok((num / den).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub tau: f64,
    pub distance: f64,
}

/// Distance from `family` at each `τ` to `reference` (built at the same `τ`).
pub fn limit_sweep(
    family: &MetricSpec,
    taus: &[f64],
    reference: &MetricSpec,
    grid: &Grid,
    pp: &PhysParams,
) -> Result<Vec<SweepRow>> {
    if taus.is_empty() {
        return Err(Error::InvalidParams("no tau values to sweep".into()));
    }
    if taus.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::InvalidParams(
            "sweep tau values must be positive".into(),
        ));
    }
    if taus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParams(
            "sweep tau values must be decreasing".into(),
        ));
    }
    taus.iter()
        .map(|&tau| {
            let at = pp.with_tau(tau);
            let distance = profile_distance(
                &family.profile(grid, &at)?,
                &reference.profile(grid, &at)?,
                grid,
            )?;
            Ok(SweepRow { tau, distance })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(mu: f64, tau: f64) -> PhysParams {
        PhysParams::default().with_mu(mu).with_tau(tau)
    }

    #[test]
    fn bf_with_zero_coupling_is_identity() {
        let g = Grid::algebra_default();
        let m = build_metric(&MetricSpec::Bf, &g, &pp(0.0, 0.0)).unwrap();
        assert_eq!(m.mat(), Operator::identity(&g).mat());
    }

    #[test]
    fn jr_point_values() {
        let p = PhysParams {
            mu: 1.0,
            tau: 1.0,
            ..Default::default()
        };
        assert!((MetricSpec::Jr.log_profile(1.0, &p).unwrap().exp() - 2.0).abs() < 1e-15);
        let p = p.with_tau(1e-4);
        let v = MetricSpec::Jr.log_profile(1.0, &p).unwrap().exp();
        assert!((v - std::f64::consts::E).abs() < 1e-3);
        assert!(MetricSpec::Jr.log_profile(1.0, &p.with_tau(0.0)).is_err());
    }

    #[test]
    fn entries_match_closed_forms() {
        let g = Grid::spectra_default();
        let p = PhysParams {
            mu: 0.05,
            tau: 0.01,
            omega: 1.3,
            ..Default::default()
        };
        let jr = build_metric(&MetricSpec::Jr, &g, &p).unwrap();
        let dw = build_metric(&MetricSpec::DeformWeight, &g, &p).unwrap();
        for (k, x) in g.points().iter().enumerate() {
            let w: f64 = 1.0 + 0.01 * x * x;
            let expect = w.powf(0.05 / (1.3 * 1.3 * 0.01));
            assert!((jr.get(k, k).re - expect).abs() <= 1e-14 * expect);
            assert!((dw.get(k, k).re - 1.0 / w).abs() <= 1e-14 / w);
        }
    }

    #[test]
    fn labels_round_trip() {
        for label in [
            "BF",
            "JR",
            "ExpTheta(0.2)",
            "DeformWeight",
            "Undeformed",
            "BF-composite",
            "JR-composite",
            "Inverse(BF*ExpTheta(-0.1))",
            "DeformWeight*ExpTheta(0.2)",
        ] {
            let spec: MetricSpec = label.parse().unwrap();
            assert_eq!(spec.to_string(), label);
        }
        assert!("Bogus".parse::<MetricSpec>().is_err());
        assert!("ExpTheta(x)".parse::<MetricSpec>().is_err());
    }

    #[test]
    fn overflow_guard() {
        let g = Grid::spectra_default();
        let err = build_metric(&MetricSpec::ExpTheta(1.0), &g, &PhysParams::default());
        assert!(matches!(err, Err(Error::Overflow { .. })));
    }

    #[test]
    fn bf_sweep_is_flat_zero() {
        let g = Grid::algebra_default();
        let rows = limit_sweep(
            &MetricSpec::Bf,
            &[1e-1, 1e-2, 1e-3, 1e-4],
            &MetricSpec::ExpTheta(0.2),
            &g,
            &pp(0.1, 0.0),
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.distance == 0.0));
    }

    #[test]
    fn sweep_rejects_bad_taus() {
        let g = Grid::algebra_default();
        let p = pp(0.1, 0.0);
        let (f, r) = (MetricSpec::Jr, MetricSpec::ExpTheta(0.1));
        assert!(limit_sweep(&f, &[1e-2, 1e-1], &r, &g, &p).is_err());
        assert!(limit_sweep(&f, &[0.0], &r, &g, &p).is_err());
        assert!(limit_sweep(&f, &[], &r, &g, &p).is_err());
    }
}
