//! Rayon-backed versions of the core sweeps.
//!
//! Every point is an independent pure computation and results are collected
//! in input order, so output is identical for any worker count.

use rayon::prelude::*;
use rayon::ThreadPoolBuildError;
use spr_core::metrics::{full_metrics, MetricsConfig};
use spr_core::optimizer::{evaluate_point, ComparisonRow, OptimizerError, ParameterSpec, SweepPoint, SweepResult};
use spr_core::tmm::{reflectance, AngleGrid};
use spr_core::{Multilayer, Objective, ReflectanceCurve, Stack};

/// Runs `f` on a pool of `threads` workers; `None` uses rayon's default size.
pub fn with_workers<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, ThreadPoolBuildError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?.install(f))
}

/// p-polarized reflectance over `grid`.
pub fn par_sweep_grid(ml: &Multilayer, grid: &AngleGrid) -> ReflectanceCurve {
    let values = (0..grid.len)
        .into_par_iter()
        .map(|i| reflectance(ml, grid.theta(i)))
        .collect();
    ReflectanceCurve::from_grid(ml.wavelength_nm, grid, values).expect("one value per grid point")
}

pub fn par_sweep_parameter(
    stack: &Stack,
    spec: &ParameterSpec,
    objective: Objective,
    config: &MetricsConfig,
) -> Result<SweepResult, OptimizerError> {
    spec.apply(stack, spec.lo)?;
    let points = spec
        .values()
        .into_par_iter()
        .map(|value| SweepPoint {
            value,
            outcome: evaluate_point(stack, spec, value, config),
        })
        .collect();
    SweepResult::from_points(*spec, objective, points)
}

pub fn par_compare(stacks: &[(String, Stack)], config: &MetricsConfig) -> Vec<ComparisonRow> {
    stacks
        .par_iter()
        .map(|(name, stack)| ComparisonRow {
            name: name.clone(),
            outcome: full_metrics(stack, config),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use spr_core::metrics::sweep_grid;
    use spr_core::optimizer::{sweep_parameter, Target};
    use spr_core::{bundled, Layer};

    fn ag() -> Stack {
        let bk7 = bundled::material("bk7").unwrap().unwrap();
        let ag = bundled::material("ag").unwrap().unwrap();
        Stack::new(bk7, vec![Layer::new(ag, 50.0)], 1.33, 633.0).unwrap()
    }

    #[test]
    fn grid_matches_serial() {
        let ml = ag().multilayer().unwrap();
        let grid = AngleGrid::new(60.0, 75.0, 0.05).unwrap();
        let par = with_workers(Some(4), || par_sweep_grid(&ml, &grid)).unwrap();
        assert_eq!(par, sweep_grid(&ml, &grid));
    }

    #[test]
    fn parameter_sweep_matches_serial() {
        let spec = ParameterSpec::new(Target::LayerThickness(0), 40.0, 60.0, 5.0).unwrap();
        let config = MetricsConfig { step_deg: 0.01, ..MetricsConfig::default() };
        let serial = sweep_parameter(&ag(), &spec, Objective::Fom, &config).unwrap();
        let par = with_workers(Some(3), || par_sweep_parameter(&ag(), &spec, Objective::Fom, &config))
            .unwrap()
            .unwrap();
        assert_eq!(serial, par);
    }
}
