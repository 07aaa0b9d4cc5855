use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{normal_wavevector, propagation_matrix, Closure, Multilayer, Polarization, SweepError};

/// Extent of the sampled region on the prism side of the first interface.
pub const FIELD_DEPTH_INTO_PRISM_NM: f64 = 200.0;
/// Extent of the sampled region beyond the last interface.
pub const FIELD_DEPTH_INTO_MEDIUM_NM: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    /// Distance from the prism/first-film interface; negative inside the prism.
    pub z_nm: f64,
    /// 0 is the prism, `1..=N` the films, `N + 1` the sensing medium.
    pub layer_index: usize,
    /// Tangential field magnitude for unit incident amplitude.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    pub theta_deg: f64,
    pub samples: Vec<FieldSample>,
    /// z of every interface, top to bottom.
    pub interfaces_nm: Vec<f64>,
}

impl FieldProfile {
    pub fn peak(&self) -> Option<&FieldSample> {
        self.samples
            .iter()
            .reduce(|best, s| if s.magnitude > best.magnitude { s } else { best })
    }
}

/// Tangential field state `(U, V)` at the top of every film, plus reflection and
/// transmission amplitudes. States are propagated upwards from the transmitted wave.
struct Solution {
    kx: f64,
    r: Complex64,
    t: Complex64,
    kz_in: Complex64,
    kz_out: Complex64,
    tops: Vec<[Complex64; 2]>,
}

fn solve(ml: &Multilayer, theta_deg: f64, pol: Polarization) -> Solution {
    let kx = ml.kx(theta_deg);
    let closure = Closure::new(ml, kx, pol);
    let r = closure.reflection();
    let t = closure.transmission();

    let mut tops = alloc::vec![[Complex64::new(0.0, 0.0); 2]; ml.films.len()];
    let mut state = [t, closure.q_out * t];
    for (j, film) in ml.films.iter().enumerate().rev() {
        let m = propagation_matrix(film.permittivity, film.thickness_nm, ml.wavelength_nm, kx, pol);
        state = m.apply(state);
        tops[j] = state;
    }

    Solution {
        kx,
        r,
        t,
        kz_in: normal_wavevector(ml.incidence_permittivity(), kx),
        kz_out: normal_wavevector(ml.exit_permittivity, kx),
        tops,
    }
}

impl Solution {
    fn in_film(&self, ml: &Multilayer, j: usize, depth_nm: f64, pol: Polarization) -> Complex64 {
        let film = &ml.films[j];
        let m = propagation_matrix(film.permittivity, depth_nm, ml.wavelength_nm, self.kx, pol);
        m.unimodular_inverse().apply(self.tops[j])[0]
    }

    fn in_prism(&self, k0: f64, z_nm: f64) -> Complex64 {
        let phase = Complex64::new(0.0, k0 * z_nm) * self.kz_in;
        phase.exp() + self.r * (-phase).exp()
    }

    fn in_medium(&self, k0: f64, below_nm: f64) -> Complex64 {
        self.t * (Complex64::new(0.0, k0 * below_nm) * self.kz_out).exp()
    }
}

/// Samples `|H_y|` (p polarisation) on a uniform grid from 200 nm inside the
/// prism to 500 nm into the sensing medium.
pub fn field_profile(ml: &Multilayer, theta_deg: f64, resolution_nm: f64) -> Result<FieldProfile, SweepError> {
    field_profile_pol(ml, theta_deg, resolution_nm, Polarization::P)
}

pub fn field_profile_pol(
    ml: &Multilayer,
    theta_deg: f64,
    resolution_nm: f64,
    pol: Polarization,
) -> Result<FieldProfile, SweepError> {
    if !(resolution_nm.is_finite() && resolution_nm > 0.0) {
        return Err(SweepError::NonPositiveStep(resolution_nm));
    }
    let sol = solve(ml, theta_deg, pol);
    let k0 = 2.0 * core::f64::consts::PI / ml.wavelength_nm;

    let mut interfaces = Vec::with_capacity(ml.films.len() + 1);
    let mut z = 0.0;
    interfaces.push(z);
    for f in &ml.films {
        z += f.thickness_nm;
        interfaces.push(z);
    }
    let bottom = z;

    let span = FIELD_DEPTH_INTO_PRISM_NM + bottom + FIELD_DEPTH_INTO_MEDIUM_NM;
    let count = (span / resolution_nm + 1e-9).floor() as usize + 1;
    let exit_index = ml.films.len() + 1;

    let samples = (0..count)
        .map(|i| {
            let z = -FIELD_DEPTH_INTO_PRISM_NM + i as f64 * resolution_nm;
            let (layer_index, value) = if z < 0.0 {
                (0, sol.in_prism(k0, z))
            } else if z >= bottom {
                (exit_index, sol.in_medium(k0, z - bottom))
            } else {
                // last interface at or above z
                let j = interfaces.partition_point(|&b| b <= z) - 1;
                (j + 1, sol.in_film(ml, j, z - interfaces[j], pol))
            };
            FieldSample {
                z_nm: z,
                layer_index,
                magnitude: value.norm(),
            }
        })
        .collect();

    Ok(FieldProfile {
        theta_deg,
        samples,
        interfaces_nm: interfaces,
    })
}

/// Relative mismatch of the tangential field across every interface, each side
/// evaluated from its own layer's expression. Top to bottom.
pub fn interface_continuity(ml: &Multilayer, theta_deg: f64, pol: Polarization) -> Vec<f64> {
    let sol = solve(ml, theta_deg, pol);
    let k0 = 2.0 * core::f64::consts::PI / ml.wavelength_nm;
    let rel = |a: Complex64, b: Complex64| {
        let scale = a.norm().max(b.norm());
        if scale == 0.0 {
            0.0
        } else {
            (a - b).norm() / scale
        }
    };

    let n = ml.films.len();
    let mut jumps = Vec::with_capacity(n + 1);
    let mut above = sol.in_prism(k0, 0.0);
    for j in 0..n {
        jumps.push(rel(above, sol.tops[j][0]));
        above = sol.in_film(ml, j, ml.films[j].thickness_nm, pol);
    }
    jumps.push(rel(above, sol.in_medium(k0, 0.0)));
    jumps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tmm::Film;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn homogeneous_medium_has_unit_field() {
        let eps = c(1.5151 * 1.5151, 0.0);
        let ml = Multilayer::new(1.5151, vec![Film::new(eps, 50.0)], eps, 633.0);
        let p = field_profile(&ml, 35.0, 2.0).unwrap();
        assert!(p.samples.iter().all(|s| (s.magnitude - 1.0).abs() < 1e-12));
    }

    #[test]
    fn evanescent_decay_beyond_critical_angle() {
        let ml = Multilayer::interface(1.5151, c(1.33, 0.0), 633.0);
        let p = field_profile(&ml, 70.0, 1.0).unwrap();
        let exit: Vec<f64> = p
            .samples
            .iter()
            .filter(|s| s.layer_index == 1)
            .map(|s| s.magnitude)
            .collect();
        assert!(exit.len() > 400);
        assert!(exit.windows(2).all(|w| w[1] < w[0]));
        // constant log-decrement
        let ratio0 = exit[1] / exit[0];
        let ratio1 = exit[300] / exit[299];
        assert!((ratio0 - ratio1).abs() < 1e-12);
    }

    #[test]
    fn sample_grid_and_layer_labels() {
        let ml = Multilayer::new(1.5, vec![Film::new(c(-18.0, 0.5), 50.0), Film::new(c(12.0, 0.1), 1.0)], c(1.77, 0.0), 633.0);
        let p = field_profile(&ml, 70.0, 0.5).unwrap();
        assert_eq!(p.samples.len(), ((200.0 + 51.0 + 500.0) / 0.5) as usize + 1);
        assert_eq!(p.samples[0].z_nm, -200.0);
        assert_eq!(p.samples[0].layer_index, 0);
        let s = p.samples.iter().find(|s| s.z_nm == 50.0).unwrap();
        assert_eq!(s.layer_index, 2);
        assert_eq!(p.samples.last().unwrap().layer_index, 3);
        assert_eq!(p.interfaces_nm, vec![0.0, 50.0, 51.0]);
        assert!(field_profile(&ml, 70.0, 0.0).is_err());
    }

    #[test]
    fn continuity_on_lossy_stack() {
        let ml = Multilayer::new(
            1.5151,
            vec![Film::new(c(-17.9, 0.7), 45.0), Film::new(c(12.0, 0.04), 3.0), Film::new(c(25.0, 12.0), 0.65)],
            c(1.7689, 0.0),
            633.0,
        );
        for theta in [10.0, 60.0, 68.0, 80.0] {
            for pol in [Polarization::P, Polarization::S] {
                let jumps = interface_continuity(&ml, theta, pol);
                assert_eq!(jumps.len(), 4);
                assert!(jumps.iter().all(|&j| j < 1e-8), "{jumps:?}");
            }
        }
    }
}
