//! Phenomenological FWM spectrum: a sum of Lorentzian peaks per polarization
//! configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::memory::PolarizationMode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub center_mhz: f64,
    pub hwhm_mhz: f64,
    pub reflectivity: f64,
}

impl Peak {
    pub fn new(center_mhz: f64, hwhm_mhz: f64, reflectivity: f64) -> Self {
        Self { center_mhz, hwhm_mhz, reflectivity }
    }

    pub fn eval(&self, delta: f64) -> f64 {
        let g2 = self.hwhm_mhz * self.hwhm_mhz;
        self.reflectivity * g2 / ((delta - self.center_mhz).powi(2) + g2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralModel {
    pub lin_perp_lin: Vec<Peak>,
    pub circ_perp_circ: Vec<Peak>,
}

pub const CPO_HWHM_MHZ: f64 = 0.15;
pub const EIT_HWHM_MHZ: f64 = 0.6;

impl Default for SpectralModel {
    /// Narrow CPO peak at δ = 0 flanked by EIT peaks at ±2.5 MHz for lin⊥lin;
    /// a single EIT peak for circ⊥circ.
    fn default() -> Self {
        Self {
            lin_perp_lin: vec![
                Peak::new(0.0, CPO_HWHM_MHZ, 0.003),
                Peak::new(-2.5, EIT_HWHM_MHZ, 0.0001),
                Peak::new(2.5, EIT_HWHM_MHZ, 0.0001),
            ],
            circ_perp_circ: vec![Peak::new(2.5, EIT_HWHM_MHZ, 0.0001)],
        }
    }
}

impl SpectralModel {
    pub fn peaks(&self, mode: PolarizationMode) -> &[Peak] {
        match mode {
            PolarizationMode::LinPerpLin => &self.lin_perp_lin,
            PolarizationMode::CircPerpCirc => &self.circ_perp_circ,
        }
    }

    /// Widths positive, reflectivities in [0, 1], and in lin⊥lin the δ = 0
    /// (CPO) peak narrower than every other peak.
    pub fn validate(&self) -> Result<()> {
        for p in self.lin_perp_lin.iter().chain(&self.circ_perp_circ) {
            if !(p.hwhm_mhz > 0.0 && p.hwhm_mhz.is_finite()) {
                return Err(Error::Config(format!("peak width {} must be positive", p.hwhm_mhz)));
            }
            if !(0.0..=1.0).contains(&p.reflectivity) {
                return Err(Error::Config(format!("peak reflectivity {} outside [0, 1]", p.reflectivity)));
            }
            if !p.center_mhz.is_finite() {
                return Err(Error::Config("peak center must be finite".into()));
            }
        }
        if let Some(cpo) = self.lin_perp_lin.iter().find(|p| p.center_mhz == 0.0) {
            if self.lin_perp_lin.iter().any(|p| p.center_mhz != 0.0 && p.hwhm_mhz <= cpo.hwhm_mhz) {
                return Err(Error::Config("CPO peak must be narrower than the EIT peaks".into()));
            }
        }
        Ok(())
    }
}

/// `Σ Rᵢ·Γᵢ²/((δ−δᵢ)²+Γᵢ²)` over the peaks of `mode`.
pub fn fwm_reflectivity(delta: f64, model: &SpectralModel, mode: PolarizationMode) -> f64 {
    model.peaks(mode).iter().map(|p| p.eval(delta)).sum()
}

/// Factor mapping the raw Lorentz sum to calibrated reflectivity, so that the
/// lin⊥lin curve equals `|χ|²·I_W·I_R` at δ = 0.
pub fn calibration_scale(model: &SpectralModel, chi3_abs: f64, intensity_w: f64, intensity_r: f64) -> f64 {
    let raw0 = fwm_reflectivity(0.0, model, PolarizationMode::LinPerpLin);
    if raw0 > 0.0 {
        chi3_abs * chi3_abs * intensity_w * intensity_r / raw0
    } else {
        0.0
    }
}

/// `(δ, R)` samples on `[start, stop]` with at most `step` spacing.
pub fn scan(
    model: &SpectralModel,
    mode: PolarizationMode,
    start: f64,
    stop: f64,
    step: f64,
    scale: f64,
) -> Vec<(f64, f64)> {
    let intervals = ((stop - start) / step).ceil().max(1.0) as usize;
    (0..=intervals)
        .map(|i| {
            let d = start + (stop - start) * i as f64 / intervals as f64;
            (d, scale * fwm_reflectivity(d, model, mode))
        })
        .collect()
}

/// Strict interior local maxima, refined by a parabola through the three
/// neighbouring samples. Returns `(position, value)`.
pub fn local_maxima(samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in samples.windows(3) {
        let ((x0, y0), (x1, y1), (x2, y2)) = (w[0], w[1], w[2]);
        if y1 > y0 && y1 > y2 {
            let denom = y0 - 2.0 * y1 + y2;
            let h = 0.5 * (x2 - x0);
            let shift = if denom != 0.0 { 0.5 * (y0 - y2) / denom * h } else { 0.0 };
            out.push((x1 + shift, y1));
        }
    }
    out
}
