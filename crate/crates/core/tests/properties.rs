use num_complex::Complex64;
use proptest::prelude::*;

use cpo_oam::fit::fit_gaussian_decay;
use cpo_oam::io::{decode_field, encode_field};
use cpo_oam::memory::{decay_envelope, PolarizationConfig};
use cpo_oam::spectrum::fwm_reflectivity;
use cpo_oam::{
    count_fringes, imprint_helical_phase, lg_mode, mirror_x, oam_spectrum, propagate, total_power, BeamSpec, ComplexField,
    DecayParams, Direction, GridSpec, Image, PolarizationMode, SpectralModel,
};

fn grid() -> GridSpec {
    GridSpec::new(128, 4e-3, 852e-9).unwrap()
}

fn beam(ell: i32, waist_um: f64, tilt: f64) -> ComplexField {
    lg_mode(&grid(), &BeamSpec::new(ell, waist_um * 1e-6).with_tilt(tilt)).unwrap()
}

fn rms_diff(a: &ComplexField, b: &ComplexField) -> f64 {
    let sum: f64 = a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y).norm_sqr()).sum();
    (sum / a.samples().len() as f64).sqrt()
}

fn max_diff(a: &ComplexField, b: &ComplexField) -> f64 {
    a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mirror_is_an_involution(ell in -4i32..=4, waist in 300.0f64..600.0, tilt in -2e4f64..2e4) {
        let f = beam(ell, waist, tilt);
        prop_assert_eq!(mirror_x(&mirror_x(&f)), f);
    }

    #[test]
    fn mirror_negates_charge(ell in -4i32..=4) {
        let f = beam(ell, 500.0, 0.0);
        prop_assert_eq!(oam_spectrum(&mirror_x(&f), -6, 6).unwrap().dominant(), -ell);
    }

    #[test]
    fn propagation_round_trip(ell in -3i32..=3, z in -0.3f64..0.3) {
        let f = beam(ell, 400.0, 0.0);
        let back = propagate(&propagate(&f, z), -z);
        prop_assert!(rms_diff(&f, &back) < 1e-9);
        prop_assert!((total_power(&propagate(&f, z)) / total_power(&f) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn helical_imprints_add(a in -3i32..=3, b in -3i32..=3) {
        prop_assume!((a + b).abs() <= 6);
        let f = beam(0, 500.0, 0.0);
        let two = imprint_helical_phase(&imprint_helical_phase(&f, a).unwrap(), b).unwrap();
        let one = imprint_helical_phase(&f, a + b).unwrap();
        prop_assert!(max_diff(&two, &one) < 1e-12);
    }

    #[test]
    fn spectrum_weights_are_a_distribution(ell in -5i32..=5, waist in 300.0f64..600.0) {
        let s = oam_spectrum(&beam(ell, waist, 0.0), -8, 8).unwrap();
        prop_assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(s.weights.iter().all(|w| *w >= 0.0));
        // Parseval over the sampled bins
        let p = s.in_range_power;
        prop_assert!((s.weights.iter().map(|w| w * p).sum::<f64>() - p).abs() < 1e-6 * p);
    }

    #[test]
    fn field_files_round_trip(ell in -3i32..=3, back in any::<bool>()) {
        let dir = if back { Direction::Backward } else { Direction::Forward };
        let f = lg_mode(&grid(), &BeamSpec::new(ell, 4e-4).with_direction(dir)).unwrap();
        prop_assert_eq!(decode_field(&encode_field(&f).unwrap()).unwrap(), f);
    }

    #[test]
    fn fringe_count_is_scale_invariant(seed in 0u64..1000, k in 1e-6f64..1e6) {
        let n = 64;
        let px: Vec<f64> = (0..n * n)
            .map(|i| {
                let (r, c) = ((i / n) as f64 - 32.0, (i % n) as f64 - 32.0);
                let u = (r + c) / 2f64.sqrt();
                let v = (r - c) / 2f64.sqrt();
                let lobes = (u * 0.4 + seed as f64).cos().powi(2);
                lobes * (-(u * u / 200.0 + v * v / 20.0)).exp()
            })
            .collect();
        let img = Image::new(n, px).unwrap();
        prop_assert_eq!(count_fringes(&img).unwrap(), count_fringes(&img.map(|p| p * k)).unwrap());
    }

    #[test]
    fn reflectivity_is_non_negative(delta in -50.0f64..50.0) {
        let m = SpectralModel::default();
        for mode in [PolarizationMode::LinPerpLin, PolarizationMode::CircPerpCirc] {
            prop_assert!(fwm_reflectivity(delta, &m, mode) >= 0.0);
        }
    }

    #[test]
    fn decay_envelope_monotone(t in 0.0f64..30.0, dt in 0.01f64..5.0, grad in 0.0f64..1.0, ell in 0i32..=4) {
        let p = DecayParams::default();
        for pol in [PolarizationConfig::cpo(3.7, grad), PolarizationConfig::eit(grad)] {
            let a = decay_envelope(t, &p, &pol, ell, 0);
            let b = decay_envelope(t + dt, &p, &pol, ell, 0);
            prop_assert!(b < a || (a == 0.0 && b == 0.0));
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn fit_recovers_tau(tau in 2.0f64..20.0, a0 in 0.01f64..10.0) {
        let s: Vec<(f64, f64)> = (0..=50).map(|i| i as f64 * 0.5).map(|t| (t, a0 * (-(t / tau).powi(2)).exp())).collect();
        let f = fit_gaussian_decay(&s).unwrap();
        prop_assert!((f.tau / tau - 1.0).abs() < 1e-6);
    }

    #[test]
    fn product_charges_add(a in -3i32..=3, b in -3i32..=3) {
        let p = beam(a, 500.0, 0.0).product(&beam(b, 500.0, 0.0)).unwrap();
        prop_assert_eq!(oam_spectrum(&p, -8, 8).unwrap().dominant(), a + b);
        let s = p.scale(Complex64::new(0.0, 2.0));
        prop_assert_eq!(oam_spectrum(&s, -8, 8).unwrap().dominant(), a + b);
    }
}
