//! BK7 / Ag / water benchmark with the bundled optical constants.
//!
//! The regression constants below were produced by the first run against the
//! bundled tables (`data/materials/ag.csv`, `bk7.csv`) at 633 nm.

use std::sync::Arc;

use spr_core::metrics::{estimate_resonance_angle, full_metrics, resonance_dip, MetricsConfig, SweepWindow};
use spr_core::optimizer::{refine_optimum, sweep_parameter, Objective, ParameterSpec, RefineOptions, Target};
use spr_core::tmm::{angular_sweep, field_profile, interface_continuity, Polarization};
use spr_core::{bundled, table1, Layer, Stack};

const AG_DIP_DEG: f64 = 67.4851;
const AG_FWHM_DEG: f64 = 1.0073;
const AG_SENSITIVITY: f64 = 113.55;

fn ag_stack(thickness: f64) -> Stack {
    let bk7 = bundled::material("bk7").unwrap().unwrap();
    let ag = bundled::material("ag").unwrap().unwrap();
    Stack::new(bk7, vec![Layer::new(ag, thickness)], 1.33, 633.0).unwrap()
}

#[test]
fn dense_sweep_finds_a_deep_dip() {
    let ml = ag_stack(50.0).multilayer().unwrap();
    let curve = angular_sweep(&ml, 40.0, 85.0, 0.01).unwrap();
    let (theta, r) = curve
        .samples()
        .fold((0.0, f64::INFINITY), |best, (t, r)| if r < best.1 { (t, r) } else { best });
    assert!(r < 0.1, "R_min = {r}");
    assert!(theta > 61.4 && theta < 85.0, "dip at {theta}");
    assert!((theta - AG_DIP_DEG).abs() < 0.01);
}

#[test]
fn pinned_metrics() {
    let m = full_metrics(&ag_stack(50.0), &MetricsConfig::default()).unwrap();
    assert!((m.theta_spr - AG_DIP_DEG).abs() < 1e-3, "{m:?}");
    assert!((m.fwhm - AG_FWHM_DEG).abs() < 1e-3, "{m:?}");
    assert!((m.sensitivity - AG_SENSITIVITY).abs() < 0.05, "{m:?}");
    assert_eq!(m.fom, m.sensitivity / m.fwhm);
    assert!(m.theta_spr > estimate_resonance_angle(1.5151, 1.33).unwrap());
}

#[test]
fn explicit_window_matches_default() {
    let config = MetricsConfig {
        window: Some(SweepWindow { theta_min: 55.0, theta_max: 85.0 }),
        ..MetricsConfig::default()
    };
    let m = full_metrics(&ag_stack(50.0), &config).unwrap();
    assert!((m.theta_spr - AG_DIP_DEG).abs() < 1e-3);
    assert!(m.theta_spr > 61.39);
}

#[test]
fn grid_refinement_is_stable() {
    let ml = ag_stack(50.0).multilayer().unwrap();
    let dip_at = |step: f64| {
        let config = MetricsConfig { step_deg: step, ..MetricsConfig::default() };
        resonance_dip(&ml, &config.grid(1.5151, 1.33).unwrap()).unwrap().1.theta_deg
    };
    let mut step = 0.04;
    let mut coarse = dip_at(step);
    while step > 0.001 {
        let fine = dip_at(step / 2.0);
        assert!((fine - coarse).abs() < step, "step {step}: {coarse} -> {fine}");
        step /= 2.0;
        coarse = fine;
    }
}

#[test]
fn resonance_moves_up_with_analyte_index() {
    for (name, stack) in table1::stacks().unwrap() {
        let mut last = f64::NEG_INFINITY;
        for i in 0..=5 {
            let n = 1.330 + 0.002 * i as f64;
            let config = MetricsConfig { step_deg: 0.002, ..MetricsConfig::default() };
            let ml = stack.with_sensing_index(n).unwrap().multilayer().unwrap();
            let grid = config.grid(1.5151, 1.33).unwrap();
            let (_, dip) = resonance_dip(&ml, &grid).unwrap();
            assert!(dip.theta_deg > last, "{name}: {} after {last}", dip.theta_deg);
            last = dip.theta_deg;
        }
    }
}

#[test]
fn field_is_enhanced_at_the_metal_surface() {
    let stack = ag_stack(50.0);
    let ml = stack.multilayer().unwrap();
    let m = full_metrics(&stack, &MetricsConfig::default()).unwrap();
    let profile = field_profile(&ml, m.theta_spr, 0.5).unwrap();
    let peak = profile.peak().unwrap();
    assert!((peak.z_nm - 50.0).abs() <= 0.5, "peak at {}", peak.z_nm);
    assert!(peak.magnitude > 1.0);
    let jumps = interface_continuity(&ml, m.theta_spr, Polarization::P);
    assert!(jumps.iter().all(|&j| j < 1e-8), "{jumps:?}");
}

#[test]
fn silver_thickness_has_an_interior_depth_optimum() {
    let spec = ParameterSpec::new(Target::LayerThickness(0), 30.0, 70.0, 1.0).unwrap();
    let config = MetricsConfig { step_deg: 0.005, ..MetricsConfig::default() };
    let sweep = sweep_parameter(&ag_stack(50.0), &spec, Objective::DipDepth, &config).unwrap();
    assert_eq!(sweep.points.len(), 41);
    assert!(sweep.best > 0 && sweep.best < 40);
    let (best, _) = sweep.best_point();
    assert!((50.0..=60.0).contains(&best), "best Ag thickness {best}");
}

#[test]
fn refined_fom_is_at_least_the_grid_fom() {
    // with half-depth widths the FoM of a single Ag film turns over near 100 nm
    let spec = ParameterSpec::new(Target::LayerThickness(0), 80.0, 120.0, 10.0).unwrap();
    let config = MetricsConfig { step_deg: 0.005, ..MetricsConfig::default() };
    let refined = refine_optimum(&ag_stack(50.0), &spec, Objective::Fom, &config, &RefineOptions::default()).unwrap();
    let (grid_value, grid_best) = refined.grid.best_point();
    assert!(refined.metrics.fom >= grid_best.fom);
    assert!((refined.value - grid_value).abs() <= spec.step);
}

#[test]
fn boundary_fom_optimum_is_reported() {
    let spec = ParameterSpec::new(Target::LayerThickness(0), 30.0, 70.0, 5.0).unwrap();
    let config = MetricsConfig { step_deg: 0.01, ..MetricsConfig::default() };
    let err = refine_optimum(&ag_stack(50.0), &spec, Objective::Fom, &config, &RefineOptions::default()).unwrap_err();
    assert_eq!(err, spr_core::OptimizerError::BoundaryOptimum { value: 70.0 });
}

#[test]
fn index_matched_metal_free_stack_has_no_dip() {
    let bk7 = bundled::material("bk7").unwrap().unwrap();
    let stack = Stack::new(bk7.clone(), vec![Layer::new(Arc::clone(&bk7), 20.0)], 1.5151, 633.0).unwrap();
    let config = MetricsConfig {
        window: Some(SweepWindow { theta_min: 40.0, theta_max: 85.0 }),
        step_deg: 0.01,
        ..MetricsConfig::default()
    };
    assert!(full_metrics(&stack, &config).is_err());
}
