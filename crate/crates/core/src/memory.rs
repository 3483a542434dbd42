//! CPO/EIT memory: grating write, Gaussian storage decay and phase-conjugate
//! read-out.
//!
//! In the non-saturated regime the diffracted amplitude is
//! `E_D ∝ χ⁽³⁾·E_W·conj(E_W′)·E_R`. Stored, the product `E_W·conj(E_W′)` is
//! the grating; reading multiplies it by `E_R` and by the decay envelope.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{mirror_x, ComplexField, Direction};
use crate::grid::CS_D2_WAVELENGTH;
use crate::oam::oam_spectrum;
use crate::physics::transit_limit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolarizationMode {
    /// Orthogonal linear writers (CPO memory).
    LinPerpLin,
    /// Orthogonal circular writers (EIT memory).
    CircPerpCirc,
}

impl PolarizationMode {
    pub fn label(self) -> &'static str {
        match self {
            PolarizationMode::LinPerpLin => "lin_perp_lin",
            PolarizationMode::CircPerpCirc => "circ_perp_circ",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationConfig {
    pub mode: PolarizationMode,
    /// Longitudinal dc field, G.
    pub dc_field_b: f64,
    /// Residual field gradient, G/cm.
    pub gradient: f64,
}

impl PolarizationConfig {
    /// CPO memory: lin⊥lin with the dc field on.
    pub fn cpo(dc_field_b: f64, gradient: f64) -> Self {
        Self { mode: PolarizationMode::LinPerpLin, dc_field_b, gradient }
    }

    /// EIT memory: circ⊥circ with the dc field off.
    pub fn eit(gradient: f64) -> Self {
        Self { mode: PolarizationMode::CircPerpCirc, dc_field_b: 0.0, gradient }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dc_field_b >= 0.0) || !(self.gradient >= 0.0) {
            return Err(Error::InvalidParameter("field and gradient must be non-negative".into()));
        }
        Ok(())
    }
}

/// Storage decay channels; all rates combine in quadrature into a Gaussian
/// amplitude envelope `exp(−(t/τ)²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    /// Floor from stray transverse fields, µs.
    pub tau_spurious_us: f64,
    /// Gradient dephasing, 1/(µs·G/cm); EIT memory only.
    pub kappa_grad: f64,
    /// Atomic transit speed across the grating, m/s.
    pub transit_speed: f64,
    /// Angle between the writers, rad.
    pub theta: f64,
    pub wavelength: f64,
}

/// Back-solved so the CPO memory decays in 9.2 µs at ℓ = 0 given the 120 µs transit limit.
pub const DEFAULT_TAU_SPURIOUS_US: f64 = 9.227_159_382_316_518;
/// Back-solved so the EIT memory decays in 5.1 µs at 0.2 G/cm.
pub const DEFAULT_KAPPA_GRAD: f64 = 0.815_965_784_331_780_8;
pub const DEFAULT_TRANSIT_SPEED: f64 = 0.2035;

impl Default for DecayParams {
    fn default() -> Self {
        Self {
            tau_spurious_us: DEFAULT_TAU_SPURIOUS_US,
            kappa_grad: DEFAULT_KAPPA_GRAD,
            transit_speed: DEFAULT_TRANSIT_SPEED,
            theta: 2f64.to_radians(),
            wavelength: CS_D2_WAVELENGTH,
        }
    }
}

impl DecayParams {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.tau_spurious_us, self.kappa_grad, self.transit_speed, self.theta, self.wavelength]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !ok {
            return Err(Error::InvalidParameter("decay parameters must be positive".into()));
        }
        Ok(())
    }

    /// `1/τ² = 1/τ_sp² + 1/τ_transit(ℓ)² + [EIT]·(κ·∇B)²`, µs.
    pub fn tau_total(&self, pol: &PolarizationConfig, ell_abs_max: u32) -> f64 {
        let transit = transit_limit(ell_abs_max as i32, self.theta, self.wavelength, self.transit_speed).tau_us;
        let mut rate2 = self.tau_spurious_us.powi(-2) + transit.powi(-2);
        if pol.mode == PolarizationMode::CircPerpCirc {
            rate2 += (self.kappa_grad * pol.gradient).powi(2);
        }
        rate2.sqrt().recip()
    }
}

/// Gaussian amplitude envelope after storing for `t_s` µs.
pub fn decay_envelope(t_s: f64, params: &DecayParams, pol: &PolarizationConfig, ell_w: i32, ell_wp: i32) -> f64 {
    assert!(t_s >= 0.0, "storage time must be non-negative");
    let tau = params.tau_total(pol, ell_w.unsigned_abs().max(ell_wp.unsigned_abs()));
    (-(t_s / tau).powi(2)).exp()
}

/// Stored grating plus everything needed to read it back.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryState {
    /// `E_W·conj(E_W′)` in the lab frame.
    pub grating: ComplexField,
    pub pol: PolarizationConfig,
    pub chi3_eff: Complex64,
    /// µs.
    pub write_time: f64,
    /// Azimuthal charges of W and W′ found at write time.
    pub writer_charges: (i32, i32),
    pub writer_direction: Direction,
}

/// Stores `E_W·conj(E_W′)`; W carries the tilt, W′ is on axis.
pub fn write_grating(
    e_w: &ComplexField,
    e_wp: &ComplexField,
    pol: PolarizationConfig,
    chi3_eff: Complex64,
) -> Result<MemoryState> {
    pol.validate()?;
    if e_w.grid() != e_wp.grid() {
        return Err(Error::GridMismatch);
    }
    if e_w.direction() != e_wp.direction() {
        return Err(Error::DirectionMismatch("writing beams must co-propagate".into()));
    }
    let grating = e_w.product(&e_wp.conj())?;
    let charge = |f: &ComplexField| oam_spectrum(f, -8, 8).map(|s| s.dominant()).unwrap_or(0);
    Ok(MemoryState {
        grating,
        pol,
        chi3_eff,
        write_time: 0.0,
        writer_charges: (charge(e_w), charge(e_wp)),
        writer_direction: e_w.direction(),
    })
}

impl MemoryState {
    pub fn with_chi3(mut self, chi3_eff: Complex64) -> Self {
        self.chi3_eff = chi3_eff;
        self
    }

    pub fn envelope(&self, t_s: f64, params: &DecayParams) -> f64 {
        decay_envelope(t_s, params, &self.pol, self.writer_charges.0, self.writer_charges.1)
    }
}

/// Diffracted beam D after `t_s` µs of storage, expressed in its own frame.
///
/// R must counter-propagate W. D leaves along −W′, so the lab-frame product is
/// mirrored: its charge becomes `ℓ_W′ − ℓ_W`.
pub fn read(memory: &MemoryState, e_r: &ComplexField, t_s: f64, params: &DecayParams) -> Result<ComplexField> {
    if e_r.direction() != memory.writer_direction.flipped() {
        return Err(Error::DirectionMismatch("reading beam must counter-propagate W".into()));
    }
    if e_r.grid() != memory.grating.grid() {
        return Err(Error::GridMismatch);
    }
    if !(t_s >= 0.0) {
        return Err(Error::InvalidParameter(format!("storage time {t_s} must be non-negative")));
    }
    let amp = memory.chi3_eff * memory.envelope(t_s, params);
    let lab = memory.grating.product(e_r)?.scale(amp).with_direction(e_r.direction());
    Ok(mirror_x(&lab))
}

/// Retrieved peak intensity over the W′ intensity.
pub fn retrieval_efficiency(d_peak_intensity: f64, wp_intensity: f64) -> Result<f64> {
    if !(wp_intensity > 0.0) {
        return Err(Error::InvalidParameter("W′ intensity must be positive".into()));
    }
    Ok(d_peak_intensity / wp_intensity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{lg_mode, BeamSpec};
    use crate::grid::GridSpec;

    fn cpo() -> PolarizationConfig {
        PolarizationConfig::cpo(3.7, 0.2)
    }

    fn eit() -> PolarizationConfig {
        PolarizationConfig::eit(0.2)
    }

    #[test]
    fn envelope_starts_at_one() {
        let p = DecayParams::default();
        assert_eq!(decay_envelope(0.0, &p, &cpo(), 0, 0), 1.0);
    }

    #[test]
    fn measured_decay_times() {
        let p = DecayParams::default();
        assert!((p.tau_total(&cpo(), 0) - 9.2).abs() < 1e-9);
        assert!((p.tau_total(&eit(), 0) - 5.1).abs() < 1e-9);
        let e = decay_envelope(9.2, &p, &cpo(), 0, 0);
        assert!((e - (-1f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn kappa_solves_the_two_decay_times() {
        let k = (5.1f64.powi(-2) - 9.2f64.powi(-2)).sqrt() / 0.2;
        assert!((k - 0.816).abs() < 1e-3);
        assert!((k - DEFAULT_KAPPA_GRAD).abs() < 1e-12);
    }

    #[test]
    fn gradient_ordering() {
        let p = DecayParams::default();
        assert!(p.tau_total(&cpo(), 0) > p.tau_total(&eit(), 0));
        let a = p.tau_total(&PolarizationConfig::cpo(3.7, 0.0), 0);
        let b = p.tau_total(&PolarizationConfig::eit(0.0), 0);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn envelope_strictly_decreasing() {
        let p = DecayParams::default();
        let mut last = 1.0;
        for i in 1..100 {
            let e = decay_envelope(i as f64 * 0.25, &p, &eit(), 1, -1);
            assert!(e < last);
            last = e;
        }
    }

    #[test]
    fn read_rejects_co_propagating_reader() {
        let g = GridSpec::default_grid();
        let w = lg_mode(&g, &BeamSpec::new(0, 0.5e-3)).unwrap();
        let mem = write_grating(&w, &w, cpo(), Complex64::new(1.0, 0.0)).unwrap();
        let err = read(&mem, &w, 1.0, &DecayParams::default()).unwrap_err();
        assert!(matches!(err, Error::DirectionMismatch(_)));
    }

    #[test]
    fn write_rejects_grid_mismatch() {
        let a = lg_mode(&GridSpec::default_grid(), &BeamSpec::new(0, 0.5e-3)).unwrap();
        let b = lg_mode(&GridSpec::new(128, 8e-3, 852e-9).unwrap(), &BeamSpec::new(0, 0.5e-3)).unwrap();
        assert!(matches!(write_grating(&a, &b, cpo(), Complex64::new(1.0, 0.0)), Err(Error::GridMismatch)));
    }

    #[test]
    fn efficiency_ratio() {
        assert_eq!(retrieval_efficiency(0.0, 15.0).unwrap(), 0.0);
        assert!((retrieval_efficiency(0.15, 15.0).unwrap() - 0.01).abs() < 1e-15);
        assert!(retrieval_efficiency(1.0, 0.0).is_err());
    }
}
