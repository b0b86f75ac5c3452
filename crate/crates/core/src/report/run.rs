use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{JobConfig, JobKind, QDeformConfig};
use super::document::{JobResults, ReportDocument, TableRow, Timings, Verdict};
use super::ReportError;
use crate::metrics::{build_metric, limit_sweep, MetricSpec};
use crate::models::{
    build_canonical_pair, build_deformed_pair, build_hamiltonian, build_ladder, build_swanson_bf,
    build_swanson_jr, commutator_check, default_number_operator, deformed_algebra_residual,
    gauge_residual,
};
use crate::opcore::Grid;
use crate::verify::{
    cross_checked_spectrum, dieudonne_residual, fit_diagonal_metric, fitted_coupling,
    hermitian_counterpart, model_equality_report, spectrum, FitStatus,
};

/// Default `τ` values for a limit sweep.
pub const DEFAULT_TAUS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Everything a job produces on one grid.
struct GridOutput {
    rows: Vec<TableRow>,
    details: Value,
    /// Measured values for the verdicts, in a fixed order.
    measures: Vec<(&'static str, f64)>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

struct RowMaker<'a> {
    job: &'static str,
    grid: &'a Grid,
    tau: f64,
}

impl RowMaker<'_> {
    fn row(&self, metric: impl Into<String>, residual: f64, masked: bool) -> TableRow {
        TableRow {
            job: self.job.into(),
            metric: metric.into(),
            n_points: self.grid.n_points(),
            tau: self.tau,
            residual: residual.is_finite().then_some(residual),
            masked,
            verdict: None,
        }
    }

    fn row_at(&self, metric: impl Into<String>, tau: f64, residual: f64) -> TableRow {
        TableRow {
            tau,
            ..self.row(metric, residual, true)
        }
    }
}

fn verify_metric(cfg: &JobConfig, grid: &Grid, rm: &RowMaker) -> crate::Result<GridOutput> {
    let pp = &cfg.params;
    let spec = cfg.metric.clone().unwrap_or(MetricSpec::Bf);
    let h = build_hamiltonian(cfg.model, grid, pp)?;
    let rho = build_metric(&spec, grid, pp)?;
    let r = dieudonne_residual(h.matrix(), &rho)?;
    let herm = hermitian_counterpart(h.matrix(), &rho).ok().map(|(_, d)| d);
    let cond = spec.condition_number(grid, pp)?;
    Ok(GridOutput {
        rows: vec![rm.row(spec.to_string(), r.masked, true)],
        details: json!({
            "n_points": grid.n_points(),
            "metric": spec.to_string(),
            "residual": to_value(&r),
            "herm_residual": herm,
            "condition_number": cond,
        }),
        measures: vec![("dieudonne_residual", r.masked)],
    })
}

fn compare_candidates(cfg: &JobConfig) -> Vec<MetricSpec> {
    if cfg.metrics.is_empty() {
        vec![MetricSpec::bf_composite(), MetricSpec::jr_composite()]
    } else {
        cfg.metrics.clone()
    }
}

fn compare_metrics(cfg: &JobConfig, grid: &Grid, rm: &RowMaker) -> crate::Result<GridOutput> {
    let pp = &cfg.params;
    let h = build_hamiltonian(cfg.model, grid, pp)?;
    let mut rows = Vec::new();
    let mut scores = Vec::new();
    for spec in compare_candidates(cfg) {
        let r = dieudonne_residual(h.matrix(), &build_metric(&spec, grid, pp)?)?;
        rows.push(rm.row(spec.to_string(), r.masked, true));
        scores.push(json!({
            "metric": spec.to_string(),
            "masked": r.masked,
            "unmasked": r.unmasked,
        }));
        log::info!(
            "{spec}: masked residual {:.3e} on n = {}",
            r.masked,
            grid.n_points()
        );
    }
    let residuals: Vec<f64> = rows
        .iter()
        .map(|r| r.residual.unwrap_or(f64::INFINITY))
        .collect();
    let best = residuals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let worst = residuals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let best_value = residuals[best];
    let ratio = worst / best_value;
    Ok(GridOutput {
        details: json!({
            "n_points": grid.n_points(),
            "residuals": scores,
            "best": rows[best].metric,
            "ratio": ratio.is_finite().then_some(ratio),
        }),
        rows,
        measures: vec![("best_residual", best_value), ("residual_ratio", ratio)],
    })
}

fn sweep_references(cfg: &JobConfig) -> Vec<MetricSpec> {
    match &cfg.reference {
        Some(r) => vec![r.clone()],
        None => {
            let theta = cfg.params.mu / (cfg.params.omega * cfg.params.omega);
            vec![
                MetricSpec::ExpTheta(theta),
                MetricSpec::ExpTheta(2.0 * theta),
            ]
        }
    }
}

fn limit_sweep_job(cfg: &JobConfig, grid: &Grid, rm: &RowMaker) -> crate::Result<GridOutput> {
    let family = cfg.metric.clone().unwrap_or(MetricSpec::Jr);
    let taus = if cfg.taus.is_empty() {
        DEFAULT_TAUS.to_vec()
    } else {
        cfg.taus.clone()
    };
    let mut rows = Vec::new();
    let mut sweeps = Vec::new();
    let mut measures = Vec::new();
    for (i, reference) in sweep_references(cfg).iter().enumerate() {
        let sweep = limit_sweep(&family, &taus, reference, grid, &cfg.params)?;
        let monotone = sweep.windows(2).all(|w| w[1].distance < w[0].distance);
        let label = format!("{family} vs {reference}");
        for r in &sweep {
            rows.push(rm.row_at(label.clone(), r.tau, r.distance));
        }
        if i == 0 {
            measures.push((
                "final_distance",
                sweep.last().map_or(f64::NAN, |r| r.distance),
            ));
            measures.push(("monotone", if monotone { 1.0 } else { 0.0 }));
        }
        sweeps.push(json!({
            "reference": reference.to_string(),
            "rows": to_value(&sweep),
            "monotone": monotone,
        }));
    }
    Ok(GridOutput {
        rows,
        details: json!({
            "n_points": grid.n_points(),
            "family": family.to_string(),
            "sweeps": sweeps,
        }),
        measures,
    })
}

fn model_equality(cfg: &JobConfig, grid: &Grid, rm: &RowMaker) -> crate::Result<GridOutput> {
    let pp = cfg.params;
    let stated = pp.delta_t - pp.lambda;
    let (x, p) = build_deformed_pair(grid, &pp)?;
    let jr = build_swanson_jr(&build_ladder(&x, &p, &pp)?, &pp)?;
    let bf = build_swanson_bf(&x, &p, &pp.with_mu(stated))?;
    let rep = model_equality_report(&jr, &bf, &x, &p)?;
    let fitted = fitted_coupling(&rep, stated).unwrap_or(f64::NAN);
    let half = 0.5 * stated;
    let matches = |mu: f64| (fitted - mu).abs() < 1e-8;
    Ok(GridOutput {
        rows: vec![rm.row("unexplained", rep.unexplained, true)],
        details: json!({
            "n_points": grid.n_points(),
            "report": to_value(&rep),
            "mu_fitted": fitted,
            "mapping_difference": { "mu": stated, "matches": matches(stated) },
            "mapping_half_difference": { "mu": half, "matches": matches(half) },
        }),
        measures: vec![("unexplained", rep.unexplained)],
    })
}

fn algebra_check(cfg: &JobConfig, grid: &Grid, rm: &RowMaker) -> crate::Result<GridOutput> {
    let pp = &cfg.params;
    let qcfg = cfg.qdeform.clone().unwrap_or_default();
    let qp = qcfg.params()?;
    let (x0, p0) = build_canonical_pair(grid, pp)?;
    let n_op = default_number_operator(&build_ladder(&x0, &p0, pp)?)?;
    let algebra = deformed_algebra_residual(&x0, &p0, &n_op, &qp, pp)?;
    let (x, p) = build_deformed_pair(grid, pp)?;
    let comm = commutator_check(&x, &p, pp)?;
    let gauge = gauge_residual(grid, pp)?;
    Ok(GridOutput {
        rows: vec![
            rm.row("q-deformed algebra", algebra, true),
            rm.row("[X,P] matrix", comm.matrix, true),
            rm.row("[X,P] symbolic", comm.symbolic, true),
            rm.row("gauge", gauge, true),
        ],
        details: json!({
            "n_points": grid.n_points(),
            "qdeform": to_value::<QDeformConfig>(&qcfg),
            "algebra_residual": algebra,
            "commutator": to_value(&comm),
            "gauge_residual": gauge,
        }),
        measures: vec![("algebra_residual", algebra)],
    })
}

fn spectrum_job(cfg: &JobConfig, grid: &Grid, rm: &RowMaker) -> crate::Result<GridOutput> {
    let pp = &cfg.params;
    let h = build_hamiltonian(cfg.model, grid, pp)?;
    if let Some(spec) = &cfg.metric {
        let rho = build_metric(spec, grid, pp)?;
        let c = cross_checked_spectrum(h.matrix(), &rho, cfg.k)?;
        if !c.trusted {
            log::warn!(
                "spectrum on n = {} is not trusted (discrepancy {:.3e})",
                grid.n_points(),
                c.discrepancy
            );
        }
        return Ok(GridOutput {
            rows: vec![
                rm.row("reality", c.direct.reality, false),
                rm.row(format!("herm_residual {spec}"), c.herm_residual, true),
            ],
            details: json!({
                "n_points": grid.n_points(),
                "metric": spec.to_string(),
                "spectrum": to_value(&c),
            }),
            measures: vec![("reality", c.direct.reality)],
        });
    }
    let s = spectrum(h.matrix(), cfg.k)?;
    if s.eigenvalues.len() < cfg.k {
        log::warn!(
            "only {} interior states on n = {}",
            s.eigenvalues.len(),
            grid.n_points()
        );
    }
    Ok(GridOutput {
        rows: vec![rm.row("reality", s.reality, false)],
        details: json!({
            "n_points": grid.n_points(),
            "spectrum": to_value(&s),
        }),
        measures: vec![("reality", s.reality)],
    })
}

fn fit_metric(cfg: &JobConfig, grid: &Grid, rm: &RowMaker) -> crate::Result<GridOutput> {
    let pp = &cfg.params;
    let h = build_hamiltonian(cfg.model, grid, pp)?;
    let fit = fit_diagonal_metric(h.matrix(), pp)?;
    let mut rows = vec![rm.row("fit", fit.fit_residual, true)];
    rows.extend(
        fit.candidates
            .iter()
            .map(|c| rm.row(c.label.clone(), c.residual, true)),
    );
    let score = |label: &str| {
        fit.candidates
            .iter()
            .find(|c| c.label == label)
            .map_or(f64::NAN, |c| c.residual)
    };
    let ratio = score("JR-composite") / score("BF-composite");
    Ok(GridOutput {
        rows,
        details: json!({
            "n_points": grid.n_points(),
            "fit": to_value(&fit),
            "composite_ratio": ratio.is_finite().then_some(ratio),
        }),
        measures: vec![
            (
                "fit_ok",
                if fit.status == FitStatus::Ok {
                    1.0
                } else {
                    0.0
                },
            ),
            ("residual_ratio", ratio),
        ],
    })
}

fn verdicts(cfg: &JobConfig, measures: &[(&'static str, f64)]) -> Vec<Verdict> {
    let get = |name: &str| {
        measures
            .iter()
            .find(|(n, _)| *n == name)
            .map_or(f64::NAN, |(_, v)| *v)
    };
    let mut out = Vec::new();
    let primary = match cfg.job {
        JobKind::VerifyMetric => "dieudonne_residual",
        JobKind::CompareMetrics => "best_residual",
        JobKind::LimitSweep => "final_distance",
        JobKind::ModelEquality => "unexplained",
        JobKind::AlgebraCheck => "algebra_residual",
        JobKind::Spectrum => "reality",
        JobKind::FitMetric => "",
    };
    if let (Some(t), false) = (cfg.threshold, primary.is_empty()) {
        out.push(Verdict::below(primary, get(primary), t));
    }
    match cfg.job {
        JobKind::CompareMetrics | JobKind::FitMetric => {
            if let Some(r) = cfg.min_ratio {
                out.push(Verdict::at_least(
                    "residual_ratio",
                    get("residual_ratio"),
                    r,
                ));
            }
        }
        _ => {}
    }
    if cfg.job == JobKind::FitMetric {
        out.push(Verdict::at_least("fit_ok", get("fit_ok"), 1.0));
    }
    if cfg.job == JobKind::LimitSweep {
        out.push(Verdict::at_least("monotone", get("monotone"), 1.0));
    }
    out
}

/// Run the job on every configured grid and assemble the report.
///
/// Verdicts are judged on the finest grid.
pub fn run_job(cfg: &JobConfig) -> Result<ReportDocument, ReportError> {
    cfg.validate()?;
    let start = Instant::now();
    let grids = cfg.grid.grids()?;
    let job = cfg.job.label();
    let mut table = Vec::new();
    let mut per_grid = Vec::new();
    let mut per_grid_seconds = Vec::new();
    let mut last_measures = Vec::new();
    for grid in &grids {
        let t0 = Instant::now();
        let rm = RowMaker {
            job,
            grid,
            tau: cfg.params.tau,
        };
        let out = match cfg.job {
            JobKind::VerifyMetric => verify_metric(cfg, grid, &rm),
            JobKind::CompareMetrics => compare_metrics(cfg, grid, &rm),
            JobKind::LimitSweep => limit_sweep_job(cfg, grid, &rm),
            JobKind::ModelEquality => model_equality(cfg, grid, &rm),
            JobKind::AlgebraCheck => algebra_check(cfg, grid, &rm),
            JobKind::Spectrum => spectrum_job(cfg, grid, &rm),
            JobKind::FitMetric => fit_metric(cfg, grid, &rm),
        }
        .map_err(ReportError::Run)?;
        log::info!(
            "{job} on n = {} done in {:.3}s",
            grid.n_points(),
            t0.elapsed().as_secs_f64()
        );
        table.extend(out.rows);
        per_grid.push(out.details);
        per_grid_seconds.push(t0.elapsed().as_secs_f64());
        last_measures = out.measures;
    }
    let verdicts = verdicts(cfg, &last_measures);
    if !verdicts.is_empty() {
        let label = if verdicts.iter().all(|v| v.passed) {
            "PASS"
        } else {
            "FAIL"
        };
        let finest = grids.last().map_or(0, Grid::n_points);
        for row in table.iter_mut().filter(|r| r.n_points == finest) {
            row.verdict = Some(label.into());
        }
    }
    Ok(ReportDocument {
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        results: JobResults {
            table,
            details: json!({ "job": job, "grids": per_grid }),
        },
        verdicts,
        timings: Timings {
            total_seconds: start.elapsed().as_secs_f64(),
            per_grid_seconds,
        },
    })
}
