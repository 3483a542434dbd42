use cpo_oam::charge::{measure_from_pattern, TiltedLensDiagnostic};
use cpo_oam::experiments::add_pattern_noise;
use cpo_oam::{lg_mode, BeamSpec, GridSpec};

#[test]
fn tilted_lens_survives_five_percent_noise() {
    let grid = GridSpec::default_grid();
    let diag = TiltedLensDiagnostic::default();
    for ell in -3..=3 {
        let f = lg_mode(&grid, &BeamSpec::new(ell, 0.5e-3)).unwrap();
        let clean = diag.pattern(&f).unwrap();
        for seed in 0..5 {
            let noisy = add_pattern_noise(&clean, 0.05, seed).unwrap();
            let m = measure_from_pattern(&f, &noisy).unwrap();
            assert_eq!(m.ell_tilted, ell, "ell {ell}, seed {seed}: {m:?}");
        }
    }
}
