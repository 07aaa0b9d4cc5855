//! Resonance angle, dip width, sensitivity and figure of merit.
//!
//! - The dip is the global minimum of the sampled curve (optionally restricted
//!   to angles above a floor such as the critical angle), refined by a parabola
//!   through the minimum and its two neighbours. Ties go to the smaller angle.
//! - The width is measured at half depth: halfway between the dip minimum and
//!   the lower of the two local maxima flanking it, with crossings found by
//!   linear interpolation.
//! - Sensitivity is a central difference of the resonance angle with respect to
//!   the sensing index, in degrees per refractive index unit.
//! - Figure of merit is sensitivity divided by width.

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::stack::{Stack, StackError};
use crate::tmm::{physical_grid, reflectance, AngleGrid, Multilayer, ReflectanceCurve, SweepError};

/// Default angular step of metric sweeps, degrees.
pub const DEFAULT_STEP_DEG: f64 = 0.001;
/// Default sensing-index step of the sensitivity stencil, RIU.
pub const DEFAULT_DELTA_N: f64 = 1e-4;
/// Default window opens this far below the critical angle.
pub const WINDOW_MARGIN_DEG: f64 = 2.0;
/// Curves whose total variation is below this carry no dip.
pub const FLAT_TOLERANCE: f64 = 1e-12;
/// Default window upper edge.
pub const WINDOW_MAX_DEG: f64 = 89.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("curve has {0} samples, need at least 3")]
    TooFewSamples(usize),
    #[error("reflectance minimum at the window edge ({theta_deg}°): the resonance is not bracketed")]
    DipAtEdge { theta_deg: f64 },
    #[error("reflectance is flat over the window: no resonance dip")]
    FlatCurve,
    #[error("no samples above {floor_deg}° in the window")]
    EmptyAboveFloor { floor_deg: f64 },
    #[error("dip at {theta_deg}° does not cross its half-depth level on both sides")]
    NoHalfDepthCrossing { theta_deg: f64 },
    #[error("FWHM must be positive, got {0}")]
    NonPositiveFwhm(f64),
    #[error("sensing index {n_s} must be below the prism index {n_p}")]
    NoCriticalAngle { n_p: f64, n_s: f64 },
    #[error("index step must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Stack(#[from] StackError),
}

/// One sensor's performance record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceMetrics {
    pub theta_spr: f64,
    pub r_min: f64,
    pub fwhm: f64,
    pub sensitivity: f64,
    pub fom: f64,
}

impl ResonanceMetrics {
    /// Builds a record whose `fom` is recomputed from its own fields.
    pub fn new(theta_spr: f64, r_min: f64, fwhm: f64, sensitivity: f64) -> Result<Self, MetricsError> {
        Ok(Self {
            theta_spr,
            r_min,
            fwhm,
            sensitivity,
            fom: figure_of_merit(sensitivity, fwhm)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepWindow {
    pub theta_min: f64,
    pub theta_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsConfig {
    /// `None` selects `[θc - 2°, 89°]` from the critical-angle estimate.
    pub window: Option<SweepWindow>,
    pub step_deg: f64,
    pub delta_n: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            window: None,
            step_deg: DEFAULT_STEP_DEG,
            delta_n: DEFAULT_DELTA_N,
        }
    }
}

impl MetricsConfig {
    /// Angular grid for a prism/analyte pair.
    pub fn grid(&self, n_p: f64, n_s: f64) -> Result<AngleGrid, MetricsError> {
        let window = match self.window {
            Some(w) => w,
            None => SweepWindow {
                theta_min: (estimate_resonance_angle(n_p, n_s)? - WINDOW_MARGIN_DEG).max(0.0),
                theta_max: WINDOW_MAX_DEG,
            },
        };
        Ok(physical_grid(window.theta_min, window.theta_max, self.step_deg)?)
    }
}

/// `arcsin(n_s/n_p)` in degrees: the critical angle, a lower bound for the
/// metal-backed resonance.
pub fn estimate_resonance_angle(n_p: f64, n_s: f64) -> Result<f64, MetricsError> {
    if !(n_s > 0.0 && n_s < n_p) {
        return Err(MetricsError::NoCriticalAngle { n_p, n_s });
    }
    Ok((n_s / n_p).asin().to_degrees())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dip {
    pub theta_deg: f64,
    pub r_min: f64,
    /// Grid index of the sampled minimum.
    pub index: usize,
}

/// Global minimum with parabolic refinement.
pub fn find_dip(curve: &ReflectanceCurve) -> Result<Dip, MetricsError> {
    find_dip_above(curve, f64::NEG_INFINITY)
}

/// Minimum over samples strictly above `floor_deg`.
pub fn find_dip_above(curve: &ReflectanceCurve, floor_deg: f64) -> Result<Dip, MetricsError> {
    let (thetas, values) = (curve.thetas(), curve.values());
    if curve.len() < 3 {
        return Err(MetricsError::TooFewSamples(curve.len()));
    }
    let first = thetas.partition_point(|&t| t <= floor_deg);
    if first >= thetas.len() {
        return Err(MetricsError::EmptyAboveFloor { floor_deg });
    }
    let mut index = first;
    let mut highest = values[first];
    for i in first + 1..values.len() {
        if values[i] < values[index] {
            index = i;
        }
        highest = highest.max(values[i]);
    }
    if highest - values[index] <= FLAT_TOLERANCE {
        return Err(MetricsError::FlatCurve);
    }
    if index == 0 || index == first || index == values.len() - 1 {
        return Err(MetricsError::DipAtEdge {
            theta_deg: thetas[index],
        });
    }

    let (y0, y1, y2) = (values[index - 1], values[index], values[index + 1]);
    let h = curve.step();
    let curvature = y0 - 2.0 * y1 + y2;
    let (offset, r_min) = if curvature > 0.0 {
        let offset = (0.5 * h * (y0 - y2) / curvature).clamp(-h, h);
        (offset, y1 - (y2 - y0) * (y2 - y0) / (8.0 * curvature))
    } else {
        (0.0, y1)
    };
    Ok(Dip {
        theta_deg: thetas[index] + offset,
        r_min,
        index,
    })
}

/// Half-depth width of the global dip.
pub fn fwhm(curve: &ReflectanceCurve) -> Result<f64, MetricsError> {
    fwhm_of(curve, &find_dip(curve)?)
}

/// Half-depth width of a dip already located on `curve`.
pub fn fwhm_of(curve: &ReflectanceCurve, dip: &Dip) -> Result<f64, MetricsError> {
    let (thetas, values) = (curve.thetas(), curve.values());
    let i0 = dip.index;

    let mut left_peak = i0;
    while left_peak > 0 && values[left_peak - 1] >= values[left_peak] {
        left_peak -= 1;
    }
    let mut right_peak = i0;
    while right_peak + 1 < values.len() && values[right_peak + 1] >= values[right_peak] {
        right_peak += 1;
    }
    let base = values[left_peak].min(values[right_peak]);
    let half = 0.5 * (base + dip.r_min);
    let no_crossing = MetricsError::NoHalfDepthCrossing {
        theta_deg: dip.theta_deg,
    };
    if !(values[i0] < half) {
        return Err(no_crossing);
    }

    let cross = |a: usize, b: usize| {
        let t = (half - values[a]) / (values[b] - values[a]);
        thetas[a] + t * (thetas[b] - thetas[a])
    };
    let left = (left_peak..i0)
        .rev()
        .find(|&i| values[i] >= half)
        .map(|i| cross(i, i + 1))
        .ok_or_else(|| no_crossing.clone())?;
    let right = (i0 + 1..=right_peak)
        .find(|&i| values[i] >= half)
        .map(|i| cross(i - 1, i))
        .ok_or(no_crossing)?;
    let width = right - left;
    if !(width > 0.0) {
        return Err(MetricsError::NonPositiveFwhm(width));
    }
    Ok(width)
}

/// `S / FWHM`.
pub fn figure_of_merit(sensitivity: f64, fwhm: f64) -> Result<f64, MetricsError> {
    if !(fwhm > 0.0 && fwhm.is_finite()) {
        return Err(MetricsError::NonPositiveFwhm(fwhm));
    }
    Ok(sensitivity / fwhm)
}

/// Central difference `[θ(n + δ/2) − θ(n − δ/2)] / δ` of any resonance-angle map.
pub fn central_difference<E>(
    mut theta_of: impl FnMut(f64) -> Result<f64, E>,
    n_s: f64,
    delta_n: f64,
) -> Result<f64, E>
where
    E: From<MetricsError>,
{
    if !(delta_n > 0.0 && delta_n.is_finite()) {
        return Err(MetricsError::NonPositiveDelta(delta_n).into());
    }
    let upper = theta_of(n_s + 0.5 * delta_n)?;
    let lower = theta_of(n_s - 0.5 * delta_n)?;
    Ok((upper - lower) / delta_n)
}

/// Sampled p reflectance of a multilayer on a grid.
pub fn sweep_grid(ml: &Multilayer, grid: &AngleGrid) -> ReflectanceCurve {
    ReflectanceCurve::from_fn(grid, |t| reflectance(ml, t)).at_wavelength(ml.wavelength_nm)
}

/// Dip of `ml` on `grid`, ignoring angles at or below the critical angle.
pub fn resonance_dip(ml: &Multilayer, grid: &AngleGrid) -> Result<(ReflectanceCurve, Dip), MetricsError> {
    let curve = sweep_grid(ml, grid);
    let floor = ml.critical_angle_deg().unwrap_or(f64::NEG_INFINITY);
    let mut dip = find_dip_above(&curve, floor)?;
    // the parabola can undershoot a near-perfect coupling dip
    dip.r_min = dip.r_min.max(0.0);
    Ok((curve, dip))
}

/// Angular sensitivity of `stack` at its own sensing index, deg/RIU. Both
/// shifted curves are sampled on the grid chosen for the unshifted analyte.
pub fn sensitivity(stack: &Stack, delta_n: f64, config: &MetricsConfig) -> Result<f64, MetricsError> {
    let ml = stack.multilayer()?;
    let grid = config.grid(ml.incidence_index, stack.sensing_index())?;
    sensitivity_on(&ml, stack.sensing_index(), delta_n, &grid)
}

fn sensitivity_on(ml: &Multilayer, n_s: f64, delta_n: f64, grid: &AngleGrid) -> Result<f64, MetricsError> {
    central_difference(
        |n| {
            if !(n >= 1.0) {
                return Err(MetricsError::Stack(StackError::InvalidSensingIndex(n)));
            }
            resonance_dip(&ml.with_exit_index(n), grid).map(|(_, d)| d.theta_deg)
        },
        n_s,
        delta_n,
    )
}

/// Resonance angle, depth, width, sensitivity and figure of merit of one stack.
pub fn full_metrics(stack: &Stack, config: &MetricsConfig) -> Result<ResonanceMetrics, MetricsError> {
    let ml = stack.multilayer()?;
    let n_s = stack.sensing_index();
    let grid = config.grid(ml.incidence_index, n_s)?;
    let (curve, dip) = resonance_dip(&ml, &grid)?;
    let width = fwhm_of(&curve, &dip)?;
    let s = sensitivity_on(&ml, n_s, config.delta_n, &grid)?;
    ResonanceMetrics::new(dip.theta_deg, dip.r_min, width, s)
}
