//! Recursive (Parratt/Airy) reflectivity.
//!
//! Composes single-interface Fresnel coefficients from the exit medium upwards:
//!
//! `r_j = (r_{j,j+1} + r_{j+1} e^{2iβ_{j+1}}) / (1 + r_{j,j+1} r_{j+1} e^{2iβ_{j+1}})`
//!
//! It shares nothing with the matrix engine except [`fresnel_coefficient`] and
//! the branch choice for `k_z`, so agreement between the two is a real check.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::tmm::{clamp_reflectance, fresnel_coefficient, normal_wavevector, Multilayer, Polarization};

/// Amplitude reflection coefficient by bottom-up recursion.
pub fn parratt_reflection(ml: &Multilayer, theta_deg: f64, pol: Polarization) -> Complex64 {
    let kx = ml.incidence_index * theta_deg.to_radians().sin();
    let k0 = 2.0 * PI / ml.wavelength_nm;

    // r for the lowest interface, then walk upwards
    let mut below = ml.exit_permittivity;
    let mut r = Complex64::new(0.0, 0.0);
    let mut first = true;
    for film in ml.films.iter().rev() {
        let r_interface = fresnel_coefficient(film.permittivity, below, kx, pol);
        r = if first {
            r_interface
        } else {
            compose(r_interface, r)
        };
        first = false;
        // propagate r to the top of this film
        let kz = normal_wavevector(film.permittivity, kx);
        let round_trip = (Complex64::new(0.0, 2.0 * k0 * film.thickness_nm) * kz).exp();
        r *= round_trip;
        below = film.permittivity;
    }
    let r_top = fresnel_coefficient(ml.incidence_permittivity(), below, kx, pol);
    if first {
        r_top
    } else {
        compose(r_top, r)
    }
}

fn compose(r_interface: Complex64, r_below_phased: Complex64) -> Complex64 {
    (r_interface + r_below_phased) / (1.0 + r_interface * r_below_phased)
}

/// p-polarised reflectance from the recursion.
pub fn parratt_reflectance(ml: &Multilayer, theta_deg: f64) -> f64 {
    parratt_reflectance_pol(ml, theta_deg, Polarization::P)
}

pub fn parratt_reflectance_pol(ml: &Multilayer, theta_deg: f64, pol: Polarization) -> f64 {
    clamp_reflectance(parratt_reflection(ml, theta_deg, pol).norm_sqr())
}
