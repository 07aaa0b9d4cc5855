//! One-parameter design search: a uniform grid sweep, then golden-section
//! refinement inside the best grid cell.
//!
//! Several parameters are handled by sweeping them one after another, each
//! starting from the stack the previous sweep selected.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::metrics::{full_metrics, MetricsConfig, MetricsError, ResonanceMetrics};
use crate::stack::{Stack, StackError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizerError {
    #[error("invalid parameter range: {0}")]
    InvalidSpec(&'static str),
    #[error("every grid point failed; first failure: {0}")]
    AllPointsFailed(MetricsError),
    #[error("grid optimum at the boundary value {value}: nothing to bracket")]
    BoundaryOptimum { value: f64 },
    #[error(transparent)]
    Stack(#[from] StackError),
}

/// Stack quantity a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    /// Thickness (nm) of the layer at this index, prism side first.
    LayerThickness(usize),
    /// Real refractive index of the sensing medium.
    SensingIndex,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::LayerThickness(i) => write!(f, "layer:{i}:thickness"),
            Target::SensingIndex => f.write_str("sensing_index"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSpec {
    pub target: Target,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl ParameterSpec {
    pub fn new(target: Target, lo: f64, hi: f64, step: f64) -> Result<Self, OptimizerError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(OptimizerError::InvalidSpec("need lo < hi"));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(OptimizerError::InvalidSpec("step must be positive"));
        }
        if step > hi - lo {
            return Err(OptimizerError::InvalidSpec("step exceeds hi - lo"));
        }
        Ok(Self { target, lo, hi, step })
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    /// Copy of `stack` with the target set to `value`.
    pub fn apply(&self, stack: &Stack, value: f64) -> Result<Stack, StackError> {
        match self.target {
            Target::LayerThickness(i) => stack.with_layer_thickness(i, value),
            Target::SensingIndex => stack.with_sensing_index(value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Maximise sensitivity.
    Sensitivity,
    /// Maximise figure of merit.
    Fom,
    /// Minimise the dip width.
    MinFwhm,
    /// Maximise `1 - R_min`.
    DipDepth,
}

impl Objective {
    pub const ALL: [Objective; 4] = [Objective::Sensitivity, Objective::Fom, Objective::MinFwhm, Objective::DipDepth];

    /// Larger is better for every objective.
    pub fn score(&self, m: &ResonanceMetrics) -> f64 {
        match self {
            Objective::Sensitivity => m.sensitivity,
            Objective::Fom => m.fom,
            Objective::MinFwhm => -m.fwhm,
            Objective::DipDepth => 1.0 - m.r_min,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Objective::Sensitivity => "sensitivity",
            Objective::Fom => "fom",
            Objective::MinFwhm => "min_fwhm",
            Objective::DipDepth => "dip_depth",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: Result<ResonanceMetrics, MetricsError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: ParameterSpec,
    pub objective: Objective,
    pub points: Vec<SweepPoint>,
    /// Index into `points` of the best successful point.
    pub best: usize,
}

/// Index of the best successful point; ties go to the earlier point.
pub fn best_index(points: &[SweepPoint], objective: Objective) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in points.iter().enumerate() {
        if let Ok(m) = &p.outcome {
            let s = objective.score(m);
            if s.is_nan() {
                continue;
            }
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
    }
    best.map(|(i, _)| i)
}

impl SweepResult {
    /// Assembles a result from evaluated points in grid order.
    pub fn from_points(spec: ParameterSpec, objective: Objective, points: Vec<SweepPoint>) -> Result<Self, OptimizerError> {
        match best_index(&points, objective) {
            Some(best) => Ok(Self {
                spec,
                objective,
                points,
                best,
            }),
            None => Err(OptimizerError::AllPointsFailed(
                points
                    .into_iter()
                    .find_map(|p| p.outcome.err())
                    .unwrap_or(MetricsError::TooFewSamples(0)),
            )),
        }
    }

    pub fn best_point(&self) -> (f64, &ResonanceMetrics) {
        let p = &self.points[self.best];
        match &p.outcome {
            Ok(m) => (p.value, m),
            Err(_) => unreachable!("best always refers to a successful point"),
        }
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.outcome.is_err()).count()
    }
}

/// Metrics of `stack` with the swept parameter set to `value`.
pub fn evaluate_point(stack: &Stack, spec: &ParameterSpec, value: f64, config: &MetricsConfig) -> Result<ResonanceMetrics, MetricsError> {
    let varied = spec.apply(stack, value)?;
    full_metrics(&varied, config)
}

pub fn sweep_parameter(
    stack: &Stack,
    spec: &ParameterSpec,
    objective: Objective,
    config: &MetricsConfig,
) -> Result<SweepResult, OptimizerError> {
    // a bad layer index would fail every point identically
    spec.apply(stack, spec.lo)?;
    let points = spec
        .values()
        .into_iter()
        .map(|value| SweepPoint {
            value,
            outcome: evaluate_point(stack, spec, value, config),
        })
        .collect();
    SweepResult::from_points(*spec, objective, points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    /// Stop once the bracket is narrower than this (parameter units).
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            tolerance: 0.01,
            max_iterations: 100,
        }
    }
}

/// Golden-section search for a maximum of `f` on `[a, b]`. `None` scores count
/// as worse than anything. Returns the best evaluated point.
pub fn golden_section_max(
    mut f: impl FnMut(f64) -> Option<f64>,
    mut a: f64,
    mut b: f64,
    options: &RefineOptions,
) -> (f64, Option<f64>) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let score = |v: Option<f64>| v.unwrap_or(f64::NEG_INFINITY);

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while (b - a) >= options.tolerance && iterations < options.max_iterations {
        if score(f1) >= score(f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        iterations += 1;
    }
    if score(f1) >= score(f2) {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Refines an interior grid optimum within `[best - step, best + step]`.
/// Never returns a worse score than the grid point it started from.
pub fn refine_bracket(
    spec: &ParameterSpec,
    best: usize,
    best_score: f64,
    f: impl FnMut(f64) -> Option<f64>,
    options: &RefineOptions,
) -> Result<(f64, f64), OptimizerError> {
    let seed = spec.value(best);
    if best == 0 || best + 1 >= spec.len() {
        return Err(OptimizerError::BoundaryOptimum { value: seed });
    }
    let (x, fx) = golden_section_max(f, seed - spec.step, seed + spec.step, options);
    match fx {
        Some(s) if s >= best_score => Ok((x, s)),
        _ => Ok((seed, best_score)),
    }
}

/// Grid sweep plus refinement of an arbitrary scalar objective (larger is better).
pub fn optimize_scalar(
    spec: &ParameterSpec,
    mut f: impl FnMut(f64) -> Option<f64>,
    options: &RefineOptions,
) -> Result<(f64, f64), OptimizerError> {
    let scores: Vec<Option<f64>> = spec.values().into_iter().map(&mut f).collect();
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        if let Some(s) = *s {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
    }
    let (best, best_score) = best.ok_or(OptimizerError::AllPointsFailed(MetricsError::TooFewSamples(0)))?;
    refine_bracket(spec, best, best_score, f, options)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinedOptimum {
    pub value: f64,
    pub metrics: ResonanceMetrics,
    pub grid: SweepResult,
}

/// Refines the optimum of a finished sweep by golden section.
pub fn refine_sweep(
    stack: &Stack,
    sweep: &SweepResult,
    config: &MetricsConfig,
    options: &RefineOptions,
) -> Result<RefinedOptimum, OptimizerError> {
    let (grid_value, grid_metrics) = sweep.best_point();
    let objective = sweep.objective;
    let (value, _) = refine_bracket(
        &sweep.spec,
        sweep.best,
        objective.score(grid_metrics),
        |v| {
            evaluate_point(stack, &sweep.spec, v, config)
                .ok()
                .map(|m| objective.score(&m))
        },
        options,
    )?;
    let metrics = if value == grid_value {
        *grid_metrics
    } else {
        evaluate_point(stack, &sweep.spec, value, config).map_err(OptimizerError::AllPointsFailed)?
    };
    Ok(RefinedOptimum {
        value,
        metrics,
        grid: sweep.clone(),
    })
}

/// Grid sweep followed by golden-section refinement.
pub fn refine_optimum(
    stack: &Stack,
    spec: &ParameterSpec,
    objective: Objective,
    config: &MetricsConfig,
    options: &RefineOptions,
) -> Result<RefinedOptimum, OptimizerError> {
    let sweep = sweep_parameter(stack, spec, objective, config)?;
    refine_sweep(stack, &sweep, config, options)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub name: String,
    pub outcome: Result<ResonanceMetrics, MetricsError>,
}

/// Metrics for each named stack, in input order. Failures stay in their row.
pub fn compare_configurations(stacks: &[(String, Stack)], config: &MetricsConfig) -> Vec<ComparisonRow> {
    stacks
        .iter()
        .map(|(name, stack)| ComparisonRow {
            name: name.clone(),
            outcome: full_metrics(stack, config),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn metrics(s: f64, w: f64, r: f64) -> ResonanceMetrics {
        ResonanceMetrics::new(65.0, r, w, s).unwrap()
    }

    #[test]
    fn grid_arithmetic() {
        let spec = ParameterSpec::new(Target::LayerThickness(0), 30.0, 70.0, 5.0).unwrap();
        assert_eq!(spec.len(), 9);
        assert_eq!(spec.values().last().copied(), Some(70.0));
        let two = ParameterSpec::new(Target::LayerThickness(0), 45.0, 50.0, 5.0).unwrap();
        assert_eq!(two.values(), vec![45.0, 50.0]);
        let idx = ParameterSpec::new(Target::SensingIndex, 1.330, 1.340, 0.002).unwrap();
        assert_eq!(idx.len(), 6);
        assert!(ParameterSpec::new(Target::SensingIndex, 2.0, 1.0, 0.1).is_err());
        assert!(ParameterSpec::new(Target::SensingIndex, 1.0, 2.0, 0.0).is_err());
        assert!(ParameterSpec::new(Target::SensingIndex, 1.0, 2.0, 1.5).is_err());
    }

    #[test]
    fn objectives_pick_the_right_extreme() {
        let pts = vec![
            SweepPoint { value: 1.0, outcome: Ok(metrics(100.0, 2.0, 0.3)) },
            SweepPoint { value: 2.0, outcome: Err(MetricsError::DipAtEdge { theta_deg: 89.0 }) },
            SweepPoint { value: 3.0, outcome: Ok(metrics(120.0, 1.0, 0.1)) },
            SweepPoint { value: 4.0, outcome: Ok(metrics(130.0, 4.0, 0.2)) },
        ];
        assert_eq!(best_index(&pts, Objective::Sensitivity), Some(3));
        assert_eq!(best_index(&pts, Objective::Fom), Some(2));
        assert_eq!(best_index(&pts, Objective::MinFwhm), Some(2));
        assert_eq!(best_index(&pts, Objective::DipDepth), Some(2));
        let spec = ParameterSpec::new(Target::SensingIndex, 1.0, 4.0, 1.0).unwrap();
        let res = SweepResult::from_points(spec, Objective::Sensitivity, pts).unwrap();
        assert_eq!(res.best_point().0, 4.0);
        assert_eq!(res.failures(), 1);
    }

    #[test]
    fn two_point_grid_picks_the_better() {
        let spec = ParameterSpec::new(Target::SensingIndex, 1.0, 2.0, 1.0).unwrap();
        let pts = vec![
            SweepPoint { value: 1.0, outcome: Ok(metrics(90.0, 1.0, 0.1)) },
            SweepPoint { value: 2.0, outcome: Ok(metrics(80.0, 1.0, 0.1)) },
        ];
        assert_eq!(SweepResult::from_points(spec, Objective::Sensitivity, pts).unwrap().best, 0);
    }

    #[test]
    fn all_failed_is_an_error() {
        let spec = ParameterSpec::new(Target::SensingIndex, 1.0, 2.0, 1.0).unwrap();
        let pts = vec![SweepPoint { value: 1.0, outcome: Err(MetricsError::TooFewSamples(1)) }];
        assert!(matches!(
            SweepResult::from_points(spec, Objective::Fom, pts),
            Err(OptimizerError::AllPointsFailed(_))
        ));
    }

    #[test]
    fn quadratic_optimum_is_refined() {
        let spec = ParameterSpec::new(Target::LayerThickness(0), 30.0, 70.0, 5.0).unwrap();
        let (x, fx) = optimize_scalar(&spec, |d| Some(-(d - 47.3) * (d - 47.3)), &RefineOptions::default()).unwrap();
        assert!((x - 47.3).abs() < 0.01, "{x}");
        assert!(fx >= -(45.0f64 - 47.3).powi(2));
    }

    #[test]
    fn boundary_optimum_cannot_be_bracketed() {
        let spec = ParameterSpec::new(Target::LayerThickness(0), 30.0, 70.0, 5.0).unwrap();
        let err = optimize_scalar(&spec, Some, &RefineOptions::default()).unwrap_err();
        assert_eq!(err, OptimizerError::BoundaryOptimum { value: 70.0 });
    }

    #[test]
    fn refinement_never_worsens_the_seed() {
        // spiky objective: the golden section cannot see the spike at the grid point
        let spec = ParameterSpec::new(Target::LayerThickness(0), 0.0, 10.0, 1.0).unwrap();
        let f = |x: f64| Some(if (x - 5.0).abs() < 1e-12 { 10.0 } else { -x.abs() });
        let (x, fx) = optimize_scalar(&spec, f, &RefineOptions::default()).unwrap();
        assert_eq!((x, fx), (5.0, 10.0));
    }

    #[test]
    fn golden_section_respects_budget() {
        let mut calls = 0;
        let opts = RefineOptions { tolerance: 0.0, max_iterations: 5 };
        golden_section_max(|x| { calls += 1; Some(-x * x) }, -1.0, 2.0, &opts);
        assert_eq!(calls, 7);
    }

    #[test]
    fn objective_names_round_trip() {
        for o in Objective::ALL {
            assert_eq!(Objective::from_name(o.name()), Some(o));
        }
        assert_eq!(Objective::from_name("speed"), None);
        assert_eq!(alloc::format!("{}", Target::LayerThickness(2)), "layer:2:thickness");
    }
}
