//! Characteristic-matrix (Abelès) solution for plane waves in planar stratified media.
//!
//! Conventions: time dependence `exp(-iωt)`, passive media have `Im(ε) >= 0`,
//! and every normal wavevector is taken on the branch `Im(k_z) >= 0` so that
//! evanescent fields decay away from the interface they originate at. All
//! wavevectors are normalised by the vacuum wavenumber `k0 = 2π/λ`, so the
//! transverse component is `kx = n_prism · sin θ`.
//!
//! For p polarisation the amplitudes are those of the tangential magnetic field
//! `H_y`; for s polarisation, of `E_y`.

mod field;

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Mul;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

pub use field::{field_profile, field_profile_pol, interface_continuity, FieldProfile, FieldSample, FIELD_DEPTH_INTO_MEDIUM_NM, FIELD_DEPTH_INTO_PRISM_NM};

/// Reflectance overshoot above 1 that is treated as rounding and clamped.
pub const REFLECTANCE_CLAMP: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// TM: magnetic field along y, the only polarisation that couples to surface plasmons.
    P,
    /// TE: electric field along y.
    S,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("empty angular range [{min}, {max}] with step {step}")]
    EmptyRange { min: f64, max: f64, step: f64 },
    #[error("step must be positive and finite, got {0}")]
    NonPositiveStep(f64),
    #[error("angles must lie in [0, 90) degrees, got [{min}, {max}]")]
    AngleOutOfRange { min: f64, max: f64 },
    #[error("angles must be strictly increasing and uniformly spaced")]
    NonUniformGrid,
    #[error("{thetas} angles but {values} reflectance values")]
    LengthMismatch { thetas: usize, values: usize },
}

/// A finite film with its permittivity already evaluated at the working wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Film {
    pub permittivity: Complex64,
    pub thickness_nm: f64,
}

impl Film {
    pub fn new(permittivity: Complex64, thickness_nm: f64) -> Self {
        Self {
            permittivity,
            thickness_nm,
        }
    }

    pub fn from_index(index: Complex64, thickness_nm: f64) -> Self {
        Self::new(index * index, thickness_nm)
    }
}

/// Optical problem at a single wavelength: real-index incidence half-space,
/// films listed from the incidence side, and an exit half-space.
#[derive(Debug, Clone, PartialEq)]
pub struct Multilayer {
    pub incidence_index: f64,
    pub films: Vec<Film>,
    pub exit_permittivity: Complex64,
    pub wavelength_nm: f64,
}

impl Multilayer {
    pub fn new(incidence_index: f64, films: Vec<Film>, exit_permittivity: Complex64, wavelength_nm: f64) -> Self {
        Self {
            incidence_index,
            films,
            exit_permittivity,
            wavelength_nm,
        }
    }

    /// Two half-spaces with nothing in between.
    pub fn interface(incidence_index: f64, exit_index: Complex64, wavelength_nm: f64) -> Self {
        Self::new(incidence_index, Vec::new(), exit_index * exit_index, wavelength_nm)
    }

    pub fn incidence_permittivity(&self) -> Complex64 {
        Complex64::new(self.incidence_index * self.incidence_index, 0.0)
    }

    /// Normalised transverse wavevector `n_p sin θ`.
    pub fn kx(&self, theta_deg: f64) -> f64 {
        self.incidence_index * theta_deg.to_radians().sin()
    }

    pub fn total_thickness_nm(&self) -> f64 {
        self.films.iter().map(|f| f.thickness_nm).sum()
    }

    /// Critical angle for total internal reflection against the exit medium,
    /// `None` when the exit medium is optically denser or lossy.
    pub fn critical_angle_deg(&self) -> Option<f64> {
        let eps = self.exit_permittivity;
        if eps.im != 0.0 || eps.re <= 0.0 {
            return None;
        }
        let ratio = eps.re.sqrt() / self.incidence_index;
        (ratio < 1.0).then(|| ratio.asin().to_degrees())
    }

    /// Same films and incidence medium with a real exit index.
    pub fn with_exit_index(&self, n: f64) -> Self {
        Self {
            exit_permittivity: Complex64::new(n * n, 0.0),
            ..self.clone()
        }
    }
}

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2(pub [[Complex64; 2]; 2]);

impl Matrix2 {
    pub const IDENTITY: Self = Self([
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ]);

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Inverse of a unimodular matrix (adjugate).
    pub fn unimodular_inverse(&self) -> Self {
        let m = &self.0;
        Self([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;

    fn mul(self, rhs: Matrix2) -> Matrix2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Matrix2(out)
    }
}

/// Normalised normal wavevector `sqrt(ε - kx²)` on the decaying branch.
pub fn normal_wavevector(eps: Complex64, kx: f64) -> Complex64 {
    let w = (eps - kx * kx).sqrt();
    if w.im < 0.0 || (w.im == 0.0 && w.re < 0.0) {
        -w
    } else {
        w
    }
}

/// Tangential admittance: `k_z/ε` for p, `k_z` for s.
pub fn admittance(eps: Complex64, kz: Complex64, pol: Polarization) -> Complex64 {
    match pol {
        Polarization::P => kz / eps,
        Polarization::S => kz,
    }
}

/// Single-interface amplitude reflection coefficient going from medium `i` into medium `j`.
pub fn fresnel_coefficient(eps_i: Complex64, eps_j: Complex64, kx: f64, pol: Polarization) -> Complex64 {
    let qi = admittance(eps_i, normal_wavevector(eps_i, kx), pol);
    let qj = admittance(eps_j, normal_wavevector(eps_j, kx), pol);
    (qi - qj) / (qi + qj)
}

/// Phase thickness `β = (2π d/λ) · sqrt(ε - kx²)`.
pub fn layer_phase(eps: Complex64, thickness_nm: f64, wavelength_nm: f64, kx: f64) -> Complex64 {
    if thickness_nm == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    normal_wavevector(eps, kx) * (2.0 * PI * thickness_nm / wavelength_nm)
}

/// Characteristic matrix of a film for a partial thickness `depth_nm`.
pub(crate) fn propagation_matrix(
    eps: Complex64,
    depth_nm: f64,
    wavelength_nm: f64,
    kx: f64,
    pol: Polarization,
) -> Matrix2 {
    if depth_nm == 0.0 {
        return Matrix2::IDENTITY;
    }
    let k0d = 2.0 * PI * depth_nm / wavelength_nm;
    let kz = normal_wavevector(eps, kx);
    let beta = kz * k0d;
    let (sin_b, cos_b) = (beta.sin(), beta.cos());
    // sin(β)/k_z, continuous through k_z = 0
    let sin_over_kz = if kz.norm() == 0.0 {
        Complex64::new(k0d, 0.0)
    } else {
        sin_b / kz
    };
    let (sin_over_q, q_sin) = match pol {
        Polarization::P => (eps * sin_over_kz, kz * sin_b / eps),
        Polarization::S => (sin_over_kz, kz * sin_b),
    };
    Matrix2([[cos_b, -I * sin_over_q], [-I * q_sin, cos_b]])
}

/// `[[cos β, -(i/q) sin β], [-i q sin β, cos β]]`; unimodular.
pub fn characteristic_matrix(film: &Film, wavelength_nm: f64, kx: f64, pol: Polarization) -> Matrix2 {
    propagation_matrix(film.permittivity, film.thickness_nm, wavelength_nm, kx, pol)
}

/// Ordered product of all film matrices.
pub fn total_matrix(ml: &Multilayer, kx: f64, pol: Polarization) -> Matrix2 {
    ml.films.iter().fold(Matrix2::IDENTITY, |acc, f| {
        acc * characteristic_matrix(f, ml.wavelength_nm, kx, pol)
    })
}

pub(crate) struct Closure {
    pub q_in: Complex64,
    pub q_out: Complex64,
    pub matrix: Matrix2,
}

impl Closure {
    pub fn new(ml: &Multilayer, kx: f64, pol: Polarization) -> Self {
        let eps_in = ml.incidence_permittivity();
        let eps_out = ml.exit_permittivity;
        Self {
            q_in: admittance(eps_in, normal_wavevector(eps_in, kx), pol),
            q_out: admittance(eps_out, normal_wavevector(eps_out, kx), pol),
            matrix: total_matrix(ml, kx, pol),
        }
    }

    fn terms(&self) -> (Complex64, Complex64) {
        let m = &self.matrix.0;
        let b = m[0][0] + m[0][1] * self.q_out;
        let c = m[1][0] + m[1][1] * self.q_out;
        (self.q_in * b, c)
    }

    pub fn reflection(&self) -> Complex64 {
        let (qb, c) = self.terms();
        (qb - c) / (qb + c)
    }

    pub fn transmission(&self) -> Complex64 {
        let (qb, c) = self.terms();
        2.0 * self.q_in / (qb + c)
    }
}

/// Amplitude reflection coefficient of the whole stack.
pub fn stack_reflection(ml: &Multilayer, theta_deg: f64, pol: Polarization) -> Complex64 {
    Closure::new(ml, ml.kx(theta_deg), pol).reflection()
}

/// Amplitude transmission coefficient into the exit medium.
pub fn stack_transmission(ml: &Multilayer, theta_deg: f64, pol: Polarization) -> Complex64 {
    Closure::new(ml, ml.kx(theta_deg), pol).transmission()
}

pub(crate) fn clamp_reflectance(r: f64) -> f64 {
    if r > 1.0 && r <= 1.0 + REFLECTANCE_CLAMP {
        1.0
    } else {
        r
    }
}

/// `|r|²` for the given polarisation.
pub fn reflectance_pol(ml: &Multilayer, theta_deg: f64, pol: Polarization) -> f64 {
    clamp_reflectance(stack_reflection(ml, theta_deg, pol).norm_sqr())
}

/// p-polarised reflectance, the quantity every SPR metric is read from.
pub fn reflectance(ml: &Multilayer, theta_deg: f64) -> f64 {
    reflectance_pol(ml, theta_deg, Polarization::P)
}

/// Power transmittance `Re(q_out)/Re(q_in) · |t|²`. Meaningful when the
/// incidence and exit media are lossless.
pub fn transmittance(ml: &Multilayer, theta_deg: f64, pol: Polarization) -> f64 {
    let c = Closure::new(ml, ml.kx(theta_deg), pol);
    c.q_out.re / c.q_in.re * c.transmission().norm_sqr()
}

/// Uniform inclusive angular grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl AngleGrid {
    /// `floor((max - min)/step) + 1` points starting at `min`; at least two required.
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self, SweepError> {
        if !(step.is_finite() && step > 0.0) {
            return Err(SweepError::NonPositiveStep(step));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(SweepError::EmptyRange { min, max, step });
        }
        let len = ((max - min) / step + 1e-9).floor() as usize + 1;
        if len < 2 {
            return Err(SweepError::EmptyRange { min, max, step });
        }
        Ok(Self { start: min, step, len })
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.theta(i))
    }

    pub fn last(&self) -> f64 {
        self.theta(self.len - 1)
    }
}

/// Sampled angular reflectance at one wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectanceCurve {
    wavelength_nm: f64,
    thetas: Vec<f64>,
    values: Vec<f64>,
}

impl ReflectanceCurve {
    /// Validates strictly increasing, uniformly spaced angles (to 1e-9°).
    pub fn new(wavelength_nm: f64, thetas: Vec<f64>, values: Vec<f64>) -> Result<Self, SweepError> {
        if thetas.len() != values.len() {
            return Err(SweepError::LengthMismatch {
                thetas: thetas.len(),
                values: values.len(),
            });
        }
        if thetas.len() >= 2 {
            let step = thetas[1] - thetas[0];
            if !(step > 0.0) || thetas.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > 1e-9) {
                return Err(SweepError::NonUniformGrid);
            }
        }
        Ok(Self {
            wavelength_nm,
            thetas,
            values,
        })
    }

    pub fn from_grid(wavelength_nm: f64, grid: &AngleGrid, values: Vec<f64>) -> Result<Self, SweepError> {
        Self::new(wavelength_nm, grid.iter().collect(), values)
    }

    /// Samples an arbitrary function on a grid; used for synthetic curves.
    pub fn from_fn(grid: &AngleGrid, f: impl Fn(f64) -> f64) -> Self {
        let thetas: Vec<f64> = grid.iter().collect();
        let values = thetas.iter().map(|&t| f(t)).collect();
        Self {
            wavelength_nm: f64::NAN,
            thetas,
            values,
        }
    }

    pub fn at_wavelength(mut self, wavelength_nm: f64) -> Self {
        self.wavelength_nm = wavelength_nm;
        self
    }

    pub fn wavelength_nm(&self) -> f64 {
        self.wavelength_nm
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn step(&self) -> f64 {
        if self.thetas.len() < 2 {
            0.0
        } else {
            self.thetas[1] - self.thetas[0]
        }
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.thetas.iter().copied().zip(self.values.iter().copied())
    }
}

/// Checks a grid against the physical angle range `[0, 90)`.
pub fn physical_grid(min: f64, max: f64, step: f64) -> Result<AngleGrid, SweepError> {
    let grid = AngleGrid::new(min, max, step)?;
    if min < 0.0 || grid.last() >= 90.0 {
        return Err(SweepError::AngleOutOfRange { min, max });
    }
    Ok(grid)
}

/// p-polarised reflectance on the inclusive grid `[min, max]` with the given step.
pub fn angular_sweep(ml: &Multilayer, theta_min: f64, theta_max: f64, step: f64) -> Result<ReflectanceCurve, SweepError> {
    let grid = physical_grid(theta_min, theta_max, step)?;
    let values = grid.iter().map(|t| reflectance(ml, t)).collect();
    ReflectanceCurve::from_grid(ml.wavelength_nm, &grid, values)
}
