use num_complex::Complex64;

use cpo_oam::experiments::{cmd_decay, MemoryKind, Session};
use cpo_oam::field::mirror_x;
use cpo_oam::memory::{read, write_grating};
use cpo_oam::physics::grating_period;
use cpo_oam::{measure_charge_oracle, measure_charge_tilted, Config, Direction, Error};

fn session() -> Session {
    Session::new(&Config::default()).unwrap()
}

#[test]
fn read_examples() {
    let s = session();
    for (w, wp, out) in [(1, 0, -1), (0, 2, 2), (-2, 2, 4), (1, 1, 0), (0, 0, 0)] {
        let d = s.store_and_read(MemoryKind::Cpo, w, wp, 1.0).unwrap();
        assert_eq!(measure_charge_oracle(&d).unwrap(), out, "({w},{wp})");
        assert_eq!(measure_charge_tilted(&d).unwrap().ell_tilted, out, "({w},{wp})");
    }
}

#[test]
fn lab_frame_charge_has_opposite_sign() {
    let s = session();
    let chi = Complex64::new(1.0, 0.0);
    let mem = write_grating(&s.writer(1).unwrap(), &s.writer_prime(-1).unwrap(), s.polarization(MemoryKind::Cpo), chi).unwrap();
    let d = read(&mem, &s.reader().unwrap(), 0.0, &s.decay).unwrap();
    assert_eq!(measure_charge_oracle(&d).unwrap(), -2);
    assert_eq!(measure_charge_oracle(&mirror_x(&d)).unwrap(), 2);
}

#[test]
fn readout_is_linear_in_reader() {
    let s = session();
    let chi = Complex64::new(0.3, 0.1);
    let mem = write_grating(&s.writer(1).unwrap(), &s.writer_prime(2).unwrap(), s.polarization(MemoryKind::Eit), chi).unwrap();
    let r = s.reader().unwrap();
    let a = Complex64::new(-1.5, 0.7);
    let d1 = read(&mem, &r, 2.0, &s.decay).unwrap();
    let d2 = read(&mem, &r.scale(a), 2.0, &s.decay).unwrap();
    let max_err = d1.samples().iter().zip(d2.samples()).map(|(x, y)| (x * a - y).norm()).fold(0.0, f64::max);
    let scale = d1.samples().iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(max_err <= 1e-12 * scale * a.norm());
}

#[test]
fn swapping_writer_charges_negates_output() {
    let s = session();
    for (w, wp) in [(0, 1), (-2, 1), (2, -1)] {
        let a = s.store_and_read(MemoryKind::Cpo, w, wp, 1.0).unwrap();
        let b = s.store_and_read(MemoryKind::Cpo, wp, w, 1.0).unwrap();
        assert_eq!(measure_charge_oracle(&a).unwrap(), -measure_charge_oracle(&b).unwrap());
    }
}

#[test]
fn reader_must_counter_propagate() {
    let s = session();
    let chi = Complex64::new(1.0, 0.0);
    let mem = write_grating(&s.writer(0).unwrap(), &s.writer_prime(0).unwrap(), s.polarization(MemoryKind::Cpo), chi).unwrap();
    let wrong = s.reader().unwrap().with_direction(Direction::Forward);
    assert!(matches!(read(&mem, &wrong, 1.0, &s.decay), Err(Error::DirectionMismatch(_))));
}

#[test]
fn grating_fringe_spacing() {
    // zero crossings of Re(G) along x on axis, for W tilted by θ against W′
    let s = session();
    let mem = write_grating(
        &s.writer(0).unwrap(),
        &s.writer_prime(0).unwrap(),
        s.polarization(MemoryKind::Cpo),
        Complex64::new(1.0, 0.0),
    )
    .unwrap();
    let step = 0.05e-6;
    let xs: Vec<f64> = (0..8000).map(|i| -200e-6 + i as f64 * step).collect();
    let re: Vec<f64> = xs.iter().map(|&x| mem.grating.value_at(x, 0.0).re).collect();
    let crossings: Vec<f64> = (1..xs.len()).filter(|&i| re[i - 1].signum() != re[i].signum()).map(|i| xs[i]).collect();
    assert!(crossings.len() > 10);
    let period = 2.0 * (crossings.last().unwrap() - crossings[0]) / (crossings.len() - 1) as f64;
    let theta = 2f64.to_radians();
    // independent oracle: λ/sinθ for one beam tilted by θ
    let oracle = s.grid.wavelength() / theta.sin();
    assert!((period - oracle).abs() < 0.05e-6, "{period} vs {oracle}");
    assert!((period * 1e6 - 24.4).abs() < 0.3);
    assert!((period - grating_period(theta, s.grid.wavelength())).abs() < 0.05e-6);
}

#[test]
fn stored_efficiency_ordering_and_decay() {
    let s = session();
    let eff = |k, t| s.store_and_read(k, 0, 0, t).unwrap().peak_intensity() / 15.0;
    assert!((eff(MemoryKind::Cpo, 1.0) - 0.01).abs() < 1e-10);
    assert!((eff(MemoryKind::Eit, 1.0) - 0.02).abs() < 1e-10);
    assert!(eff(MemoryKind::Cpo, 5.0) < eff(MemoryKind::Cpo, 1.0));
    let ratio = eff(MemoryKind::Cpo, 9.2) / eff(MemoryKind::Cpo, 0.0);
    // intensity falls as the envelope squared
    assert!((ratio - (-2f64).exp()).abs() < 1e-9);
}

#[test]
fn oam_carrying_decay_scan_fits() {
    let run = cmd_decay(&Config::default(), 2, 0).unwrap();
    for c in &run.data {
        assert!((c.fit.tau / c.tau_model - 1.0).abs() < 1e-6, "{:?}", c.kind);
        assert!(c.samples.windows(2).all(|w| w[1].1 < w[0].1));
    }
}
