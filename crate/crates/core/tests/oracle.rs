//! Matrix method against the recursive oracle, plus the stack invariants.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spr_core::parratt::{parratt_reflectance, parratt_reflectance_pol};
use spr_core::tmm::{
    characteristic_matrix, fresnel_coefficient, reflectance, reflectance_pol, stack_reflection, transmittance, Film,
    Multilayer, Polarization,
};
use spr_core::Complex64;

fn random_stack(rng: &mut impl Rng) -> Multilayer {
    let films = (0..rng.gen_range(1..=8))
        .map(|_| {
            Film::new(
                Complex64::new(rng.gen_range(-20.0..16.0), rng.gen_range(0.0..5.0)),
                rng.gen_range(1.0..=200.0),
            )
        })
        .collect();
    Multilayer::new(
        rng.gen_range(1.0..2.5),
        films,
        Complex64::new(rng.gen_range(1.0..4.0), rng.gen_range(0.0..0.5)),
        rng.gen_range(400.0..1000.0),
    )
}

#[test]
fn matrix_and_recursion_agree_on_random_stacks() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let ml = random_stack(&mut rng);
        let theta = rng.gen_range(0.0..=89.0);
        for pol in [Polarization::P, Polarization::S] {
            let a = reflectance_pol(&ml, theta, pol);
            let b = parratt_reflectance_pol(&ml, theta, pol);
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst < 1e-10, "max |ΔR| = {worst:e}");
}

#[test]
fn reflectance_is_passive() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let ml = random_stack(&mut rng);
        let theta = rng.gen_range(0.0..89.9);
        for pol in [Polarization::P, Polarization::S] {
            let r = reflectance_pol(&ml, theta, pol);
            assert!((0.0..=1.0 + 1e-12).contains(&r), "R = {r}");
        }
    }
}

#[test]
fn lossless_energy_balance_below_critical_angle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let n_in = rng.gen_range(1.0..2.0);
        let n_out = rng.gen_range(1.0..2.0);
        let films = (0..rng.gen_range(1..=6))
            .map(|_| Film::from_index(Complex64::new(rng.gen_range(1.0..3.0), 0.0), rng.gen_range(1.0..300.0)))
            .collect();
        let ml = Multilayer::new(n_in, films, Complex64::new(n_out * n_out, 0.0), 633.0);
        let limit = ml.critical_angle_deg().unwrap_or(89.0).min(89.0);
        let theta = rng.gen_range(0.0..limit);
        for pol in [Polarization::P, Polarization::S] {
            let sum = reflectance_pol(&ml, theta, pol) + transmittance(&ml, theta, pol);
            assert!((sum - 1.0).abs() < 1e-10, "R + T = {sum}");
        }
    }
}

fn arb_film() -> impl Strategy<Value = Film> {
    (-20.0f64..16.0, 0.0f64..5.0, 1.0f64..200.0).prop_map(|(re, im, d)| Film::new(Complex64::new(re, im), d))
}

fn arb_stack() -> impl Strategy<Value = Multilayer> {
    (1.0f64..2.5, prop::collection::vec(arb_film(), 1..=8), 1.0f64..4.0, 0.0f64..0.5, 400.0f64..1000.0)
        .prop_map(|(n, films, re, im, wl)| Multilayer::new(n, films, Complex64::new(re, im), wl))
}

proptest! {
    #[test]
    fn unimodular(film in arb_film(), kx in 0.0f64..2.5, pol in prop_oneof![Just(Polarization::P), Just(Polarization::S)]) {
        let det = characteristic_matrix(&film, 633.0, kx, pol).det();
        // entries grow like exp(|Im β|); compare relative to their size
        let m = characteristic_matrix(&film, 633.0, kx, pol).0;
        let scale = (m[0][0] * m[1][1]).norm().max(1.0);
        prop_assert!((det - 1.0).norm() <= 1e-12 * scale, "det = {det}");
    }

    #[test]
    fn zero_thickness_insertion(ml in arb_stack(), at in 0usize..9, eps_re in -20.0f64..16.0, eps_im in 0.0f64..5.0, theta in 0.0f64..89.0) {
        let mut with_zero = ml.clone();
        let at = at.min(ml.films.len());
        with_zero.films.insert(at, Film::new(Complex64::new(eps_re, eps_im), 0.0));
        let a = stack_reflection(&ml, theta, Polarization::P);
        let b = stack_reflection(&with_zero, theta, Polarization::P);
        prop_assert!((a - b).norm() < 1e-12);
        prop_assert!((parratt_reflectance(&ml, theta) - parratt_reflectance(&with_zero, theta)).abs() < 1e-12);
    }

    #[test]
    fn layer_splitting(ml in arb_stack(), which in 0usize..8, frac in 0.01f64..0.99, theta in 0.0f64..89.0) {
        let which = which % ml.films.len();
        let mut split = ml.clone();
        let f = ml.films[which];
        split.films[which].thickness_nm = f.thickness_nm * frac;
        split.films.insert(which + 1, Film::new(f.permittivity, f.thickness_nm * (1.0 - frac)));
        prop_assert!((reflectance(&ml, theta) - reflectance(&split, theta)).abs() < 1e-12);
    }

    #[test]
    fn half_wave_sign_flip(ml in arb_stack(), n in 1.2f64..3.0) {
        // a lossless half-wave film at normal incidence has matrix −I
        let mut flipped = ml.clone();
        flipped.films.push(Film::from_index(Complex64::new(n, 0.0), ml.wavelength_nm / (2.0 * n)));
        let a = stack_reflection(&ml, 0.0, Polarization::P);
        let b = stack_reflection(&flipped, 0.0, Polarization::P);
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn empty_stack_is_single_interface(n1 in 1.0f64..2.5, n2 in 0.1f64..3.0, k2 in 0.0f64..4.0, theta in 0.0f64..89.0) {
        let ml = Multilayer::interface(n1, Complex64::new(n2, k2), 600.0);
        let kx = ml.kx(theta);
        for pol in [Polarization::P, Polarization::S] {
            let r = fresnel_coefficient(ml.incidence_permittivity(), ml.exit_permittivity, kx, pol);
            prop_assert!((stack_reflection(&ml, theta, pol) - r).norm() < 1e-12);
        }
    }
}
