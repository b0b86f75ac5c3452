use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::metrics::MetricSpec;
use crate::models::{ModelKind, NumberFn, PhysParams, QDeformParams};
use crate::opcore::{Grid, Scheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobKind {
    VerifyMetric,
    CompareMetrics,
    LimitSweep,
    ModelEquality,
    AlgebraCheck,
    Spectrum,
    FitMetric,
}

impl JobKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::VerifyMetric => "verify-metric",
            Self::CompareMetrics => "compare-metrics",
            Self::LimitSweep => "limit-sweep",
            Self::ModelEquality => "model-equality",
            Self::AlgebraCheck => "algebra-check",
            Self::Spectrum => "spectrum",
            Self::FitMetric => "fit-metric",
        }
    }
}

fn default_n_points() -> usize {
    257
}

fn default_p_max() -> f64 {
    8.0
}

fn default_mask() -> f64 {
    0.25
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default = "default_p_max")]
    pub p_max: f64,
    #[serde(default = "default_mask")]
    pub mask_fraction: f64,
    /// Grid sizes to run in turn; replaces `n_points` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<Vec<usize>>,
    #[serde(default)]
    pub scheme: Scheme,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_points: default_n_points(),
            p_max: default_p_max(),
            mask_fraction: default_mask(),
            refinement: None,
            scheme: Scheme::default(),
        }
    }
}

impl GridConfig {
    /// Grids in ascending size.
    pub fn grids(&self) -> Result<Vec<Grid>, ReportError> {
        let sizes = self
            .refinement
            .clone()
            .unwrap_or_else(|| vec![self.n_points]);
        if sizes.is_empty() {
            return Err(ReportError::Config("refinement list is empty".into()));
        }
        if sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ReportError::Config(format!(
                "refinement list must be strictly increasing, got {sizes:?}"
            )));
        }
        sizes
            .iter()
            .map(|&n| {
                Grid::new(n, self.p_max, self.mask_fraction)
                    .map(|g| g.with_scheme(self.scheme))
                    .map_err(|e| ReportError::Config(e.to_string()))
            })
            .collect()
    }
}

/// Function `f` in `q^{f(N)}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumberFnKind {
    One,
    Identity,
    #[default]
    Tanh,
}

impl NumberFnKind {
    fn handle(&self) -> NumberFn {
        match self {
            Self::One => Arc::new(|_| 1.0),
            Self::Identity => Arc::new(|n| n),
            Self::Tanh => Arc::new(f64::tanh),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QDeformConfig {
    pub q: f64,
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    #[serde(default)]
    pub f: NumberFnKind,
}

impl Default for QDeformConfig {
    fn default() -> Self {
        Self {
            q: 1.0,
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.5,
            delta: 1.0,
            f: NumberFnKind::default(),
        }
    }
}

impl QDeformConfig {
    pub fn params(&self) -> crate::Result<QDeformParams> {
        QDeformParams::new(
            self.q,
            self.alpha,
            self.beta,
            self.gamma,
            self.delta,
            self.f.handle(),
        )
    }
}

fn default_k() -> usize {
    6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub job: JobKind,
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub params: PhysParams,
    /// Metric under test (`verify-metric`, `spectrum`) or swept family (`limit-sweep`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricSpec>,
    /// Candidates for `compare-metrics`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metrics: Vec<MetricSpec>,
    /// Reference profile for `limit-sweep`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<MetricSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub taus: Vec<f64>,
    /// Number of eigenvalues to report.
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qdeform: Option<QDeformConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

fn finite(name: &str, v: f64) -> Result<(), ReportError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ReportError::Config(format!(
            "{name} must be finite, got {v}"
        )))
    }
}

impl JobConfig {
    pub fn validate(&self) -> Result<(), ReportError> {
        finite("grid.p_max", self.grid.p_max)?;
        finite("grid.mask_fraction", self.grid.mask_fraction)?;
        self.grid.grids()?;
        self.params
            .validate()
            .map_err(|e| ReportError::Config(e.to_string()))?;
        for (name, v) in [("threshold", self.threshold), ("min_ratio", self.min_ratio)] {
            if let Some(v) = v {
                finite(name, v)?;
            }
        }
        for &t in &self.taus {
            finite("taus", t)?;
        }
        if self.k == 0 {
            return Err(ReportError::Config("k must be at least 1".into()));
        }
        if let Some(q) = &self.qdeform {
            for (name, v) in [
                ("qdeform.q", q.q),
                ("qdeform.alpha", q.alpha),
                ("qdeform.beta", q.beta),
                ("qdeform.gamma", q.gamma),
                ("qdeform.delta", q.delta),
            ] {
                finite(name, v)?;
            }
            q.params().map_err(|e| ReportError::Config(e.to_string()))?;
        }
        if self.job == JobKind::LimitSweep
            && (self.taus.iter().any(|&t| t <= 0.0) || self.taus.windows(2).any(|w| w[1] >= w[0]))
        {
            return Err(ReportError::Config(format!(
                "taus must be positive and strictly decreasing, got {:?}",
                self.taus
            )));
        }
        if self.job == JobKind::VerifyMetric && self.metric.is_none() {
            return Err(ReportError::Config(
                "verify-metric needs a 'metric' label".into(),
            ));
        }
        Ok(())
    }
}

/// Parse and validate a JSON job description.
pub fn parse_config(text: &str) -> Result<JobConfig, ReportError> {
    let cfg: JobConfig =
        serde_json::from_str(text).map_err(|e| ReportError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
