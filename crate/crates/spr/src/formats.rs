//! CSV and JSON encodings of curves, field profiles, metrics and tables.
//!
//! Floats are written with `{}`, the shortest text that parses back to the
//! same `f64`, so outputs are lossless and byte-stable.

use std::fmt::Write as _;

use serde::Serialize;
use spr_core::metrics::MetricsError;
use spr_core::optimizer::{ComparisonRow, SweepResult};
use spr_core::table1::PublishedRow;
use spr_core::{FieldProfile, ReflectanceCurve, ResonanceMetrics};

pub const CURVE_HEADER: &str = "theta_deg,reflectance";
pub const FIELD_HEADER: &str = "z_nm,layer_index,h_magnitude";
const METRIC_COLUMNS: &str = "theta_spr_deg,r_min,fwhm_deg,sensitivity_deg_per_riu,fom_per_riu,status";

/// Flat metrics record with unit-suffixed keys.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub theta_spr_deg: f64,
    pub r_min: f64,
    pub fwhm_deg: f64,
    pub sensitivity_deg_per_riu: f64,
    pub fom_per_riu: f64,
}

impl From<&ResonanceMetrics> for MetricsRecord {
    fn from(m: &ResonanceMetrics) -> Self {
        Self {
            theta_spr_deg: m.theta_spr,
            r_min: m.r_min,
            fwhm_deg: m.fwhm,
            sensitivity_deg_per_riu: m.sensitivity,
            fom_per_riu: m.fom,
        }
    }
}

/// Short machine-readable status for a metrics outcome.
pub fn status_code(outcome: &Result<ResonanceMetrics, MetricsError>) -> &'static str {
    match outcome {
        Ok(_) => "ok",
        Err(MetricsError::TooFewSamples(_)) => "too_few_samples",
        Err(MetricsError::DipAtEdge { .. }) => "dip_at_edge",
        Err(MetricsError::FlatCurve) => "flat_curve",
        Err(MetricsError::EmptyAboveFloor { .. }) => "empty_above_floor",
        Err(MetricsError::NoHalfDepthCrossing { .. }) => "no_half_depth_crossing",
        Err(MetricsError::NonPositiveFwhm(_)) => "non_positive_fwhm",
        Err(MetricsError::NoCriticalAngle { .. }) => "no_critical_angle",
        Err(MetricsError::NonPositiveDelta(_)) => "non_positive_delta",
        Err(MetricsError::Sweep(_)) => "invalid_sweep",
        Err(MetricsError::Stack(_)) => "invalid_stack",
    }
}

pub fn curve_csv(curve: &ReflectanceCurve) -> String {
    let mut out = String::with_capacity(32 * (curve.len() + 1));
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for (theta, r) in curve.samples() {
        let _ = writeln!(out, "{theta},{r}");
    }
    out
}

pub fn field_csv(profile: &FieldProfile) -> String {
    let mut out = String::with_capacity(40 * (profile.samples.len() + 1));
    out.push_str(FIELD_HEADER);
    out.push('\n');
    for s in &profile.samples {
        let _ = writeln!(out, "{},{},{}", s.z_nm, s.layer_index, s.magnitude);
    }
    out
}

pub fn metrics_json(m: &ResonanceMetrics) -> String {
    to_json(&MetricsRecord::from(m))
}

fn push_metric_cells(out: &mut String, outcome: &Result<ResonanceMetrics, MetricsError>) {
    match outcome {
        Ok(m) => {
            let _ = write!(out, "{},{},{},{},{}", m.theta_spr, m.r_min, m.fwhm, m.sensitivity, m.fom);
        }
        Err(_) => out.push_str(",,,,"),
    }
    out.push(',');
    out.push_str(status_code(outcome));
}

/// One row per grid value.
pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut out = format!("value,{METRIC_COLUMNS}\n");
    for p in &sweep.points {
        let _ = write!(out, "{},", p.value);
        push_metric_cells(&mut out, &p.outcome);
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Row<K: Serialize> {
    #[serde(flatten)]
    key: K,
    #[serde(flatten)]
    metrics: Option<MetricsRecord>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl<K: Serialize> Row<K> {
    fn new(key: K, outcome: &Result<ResonanceMetrics, MetricsError>) -> Self {
        Self {
            key,
            metrics: outcome.as_ref().ok().map(MetricsRecord::from),
            status: status_code(outcome),
            error: outcome.as_ref().err().map(ToString::to_string),
        }
    }
}

#[derive(Serialize)]
struct ValueKey {
    value: f64,
}

#[derive(Serialize)]
struct NameKey<'a> {
    name: &'a str,
}

#[derive(Serialize)]
struct SweepDoc {
    target: String,
    objective: &'static str,
    lo: f64,
    hi: f64,
    step: f64,
    best_index: usize,
    best_value: f64,
    points: Vec<Row<ValueKey>>,
}

pub fn sweep_json(sweep: &SweepResult) -> String {
    let doc = SweepDoc {
        target: sweep.spec.target.to_string(),
        objective: sweep.objective.name(),
        lo: sweep.spec.lo,
        hi: sweep.spec.hi,
        step: sweep.spec.step,
        best_index: sweep.best,
        best_value: sweep.points[sweep.best].value,
        points: sweep
            .points
            .iter()
            .map(|p| Row::new(ValueKey { value: p.value }, &p.outcome))
            .collect(),
    };
    to_json(&doc)
}

/// One row per named configuration, in input order.
pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = format!("name,{METRIC_COLUMNS}\n");
    for row in rows {
        out.push_str(&row.name);
        out.push(',');
        push_metric_cells(&mut out, &row.outcome);
        out.push('\n');
    }
    out
}

pub fn comparison_json(rows: &[ComparisonRow]) -> String {
    let rows: Vec<_> = rows
        .iter()
        .map(|r| Row::new(NameKey { name: &r.name }, &r.outcome))
        .collect();
    to_json(&rows)
}

/// Label carried by every benchmark report.
pub const BENCH_LABEL: &str = "configuration reproduction, not value reproduction";
const PUBLISHED_COLUMNS: &str =
    "published_sensitivity_deg_per_riu,published_fwhm_deg,published_fom_per_riu,published_fom_recomputed,published_fom_consistent";

/// Comparison table with the printed figures alongside, matched by name.
pub fn bench_csv(rows: &[ComparisonRow], published: &[PublishedRow]) -> String {
    let mut out = format!("name,{METRIC_COLUMNS},{PUBLISHED_COLUMNS}\n");
    for row in rows {
        out.push_str(&row.name);
        out.push(',');
        push_metric_cells(&mut out, &row.outcome);
        match published.iter().find(|p| p.name == row.name) {
            Some(p) => {
                let _ = write!(
                    out,
                    ",{},{},{},{},{}",
                    p.sensitivity,
                    p.fwhm,
                    p.fom,
                    p.recomputed_fom(),
                    p.is_consistent()
                );
            }
            None => out.push_str(",,,,,"),
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct BenchRow<'a> {
    #[serde(flatten)]
    row: Row<NameKey<'a>>,
    published: Option<PublishedRecord>,
}

#[derive(Serialize)]
struct PublishedRecord {
    sensitivity_deg_per_riu: f64,
    fwhm_deg: f64,
    fom_per_riu: f64,
    fom_recomputed: f64,
    fom_consistent: bool,
}

#[derive(Serialize)]
struct BenchDoc<'a> {
    label: &'static str,
    rows: Vec<BenchRow<'a>>,
}

pub fn bench_json(rows: &[ComparisonRow], published: &[PublishedRow]) -> String {
    let rows = rows
        .iter()
        .map(|r| BenchRow {
            row: Row::new(NameKey { name: &r.name }, &r.outcome),
            published: published.iter().find(|p| p.name == r.name).map(|p| PublishedRecord {
                sensitivity_deg_per_riu: p.sensitivity,
                fwhm_deg: p.fwhm,
                fom_per_riu: p.fom,
                fom_recomputed: p.recomputed_fom(),
                fom_consistent: p.is_consistent(),
            }),
        })
        .collect();
    to_json(&BenchDoc { label: BENCH_LABEL, rows })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}
