//! TOML configuration. Every key has a default; unknown keys are rejected.
//!
//! ```toml
//! chi3_eff = 0.0077459667
//! [grid]
//! n = 512
//! width_mm = 8.0
//! [field]
//! B_gauss = 3.7
//! gradient_G_per_cm = 0.2
//! [[spectrum.lin_perp_lin]]
//! center_mhz = 0.0
//! hwhm_mhz = 0.15
//! reflectivity = 0.003
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::charge::TiltedLensDiagnostic;
use crate::error::{Error, Result};
use crate::field::DEFAULT_ELL_MAX;
use crate::grid::{GridSpec, CS_D2_WAVELENGTH};
use crate::memory::{DecayParams, DEFAULT_KAPPA_GRAD, DEFAULT_TAU_SPURIOUS_US, DEFAULT_TRANSIT_SPEED};
use crate::optics::LensSpec;
use crate::spectrum::SpectralModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    pub width_mm: f64,
    pub wavelength_nm: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 512, width_mm: 8.0, wavelength_nm: CS_D2_WAVELENGTH * 1e9 }
    }
}

/// Beam geometry and peak intensities (mW/cm²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamConfig {
    pub waist_mm: f64,
    pub theta_deg: f64,
    pub ell_max: i32,
    pub intensity_w: f64,
    pub intensity_wp: f64,
    pub intensity_r: f64,
}

impl Default for BeamConfig {
    fn default() -> Self {
        Self { waist_mm: 0.5, theta_deg: 2.0, ell_max: DEFAULT_ELL_MAX, intensity_w: 10.0, intensity_wp: 15.0, intensity_r: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MagneticConfig {
    #[serde(rename = "B_gauss")]
    pub b_gauss: f64,
    #[serde(rename = "gradient_G_per_cm")]
    pub gradient_g_per_cm: f64,
}

impl Default for MagneticConfig {
    fn default() -> Self {
        Self { b_gauss: 3.7, gradient_g_per_cm: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayConfig {
    pub tau_spurious_us: f64,
    pub kappa_grad: f64,
    pub transit_speed_m_s: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            tau_spurious_us: DEFAULT_TAU_SPURIOUS_US,
            kappa_grad: DEFAULT_KAPPA_GRAD,
            transit_speed_m_s: DEFAULT_TRANSIT_SPEED,
        }
    }
}

/// Read-out calibration: target efficiencies at `calibration_time_us`, and
/// the storage time used for charge tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MemoryConfig {
    pub efficiency_cpo: f64,
    pub efficiency_eit: f64,
    pub calibration_time_us: f64,
    pub storage_time_us: f64,
}

impl Default for MemoryConfig {
    fn default() -> Self {
        Self { efficiency_cpo: 0.01, efficiency_eit: 0.02, calibration_time_us: 1.0, storage_time_us: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticConfig {
    pub focal_mm: f64,
    pub tilt_rad: f64,
    pub z_probe_mm: f64,
}

impl Default for DiagnosticConfig {
    fn default() -> Self {
        let d = TiltedLensDiagnostic::default();
        Self { focal_mm: d.lens.focal * 1e3, tilt_rad: d.lens.tilt, z_probe_mm: d.z_probe * 1e3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub delta_min_mhz: f64,
    pub delta_max_mhz: f64,
    pub delta_step_mhz: f64,
    pub t_max_us: f64,
    pub t_step_us: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { delta_min_mhz: -6.0, delta_max_mhz: 6.0, delta_step_mhz: 0.05, t_max_us: 25.0, t_step_us: 0.5 }
    }
}

/// `|χ|²·I_W·I_R = 0.003` at the default intensities.
pub fn default_chi3() -> f64 {
    (0.003f64 / (10.0 * 5.0)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// Steady-state coupling, cm²/mW.
    pub chi3_eff: f64,
    pub grid: GridConfig,
    pub beam: BeamConfig,
    pub field: MagneticConfig,
    pub decay: DecayConfig,
    pub spectrum: SpectralModel,
    pub memory: MemoryConfig,
    pub diagnostic: DiagnosticConfig,
    pub scan: ScanConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            chi3_eff: default_chi3(),
            grid: GridConfig::default(),
            beam: BeamConfig::default(),
            field: MagneticConfig::default(),
            decay: DecayConfig::default(),
            spectrum: SpectralModel::default(),
            memory: MemoryConfig::default(),
            diagnostic: DiagnosticConfig::default(),
            scan: ScanConfig::default(),
        }
    }
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(s).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        self.grid_spec()?;
        self.diagnostic()?;
        self.decay_params().validate()?;
        self.spectrum.validate()?;
        let b = &self.beam;
        if !(b.waist_mm > 0.0 && b.theta_deg > 0.0 && b.ell_max >= 0) {
            return Err(Error::Config("beam waist, angle must be positive and ell_max ≥ 0".into()));
        }
        if !(b.intensity_w > 0.0 && b.intensity_wp > 0.0 && b.intensity_r > 0.0) {
            return Err(Error::Config("beam intensities must be positive".into()));
        }
        if !(self.field.b_gauss >= 0.0 && self.field.gradient_g_per_cm >= 0.0) {
            return Err(Error::Config("field and gradient must be non-negative".into()));
        }
        if !(self.chi3_eff.is_finite() && self.chi3_eff >= 0.0) {
            return Err(Error::Config("chi3_eff must be non-negative".into()));
        }
        let m = &self.memory;
        if !(m.efficiency_cpo >= 0.0 && m.efficiency_eit >= 0.0 && m.calibration_time_us >= 0.0 && m.storage_time_us >= 0.0) {
            return Err(Error::Config("memory calibration values must be non-negative".into()));
        }
        let s = &self.scan;
        if !(s.delta_step_mhz > 0.0 && s.delta_max_mhz > s.delta_min_mhz && s.t_step_us > 0.0 && s.t_max_us > 0.0) {
            return Err(Error::Config("scan ranges must be non-empty with positive steps".into()));
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.n, self.grid.width_mm * 1e-3, self.grid.wavelength_nm * 1e-9)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn diagnostic(&self) -> Result<TiltedLensDiagnostic> {
        let lens = LensSpec::new(self.diagnostic.focal_mm * 1e-3, self.diagnostic.tilt_rad)
            .map_err(|e| Error::Config(e.to_string()))?;
        if !(self.diagnostic.z_probe_mm > 0.0) {
            return Err(Error::Config("diagnostic.z_probe_mm must be positive".into()));
        }
        Ok(TiltedLensDiagnostic { lens, z_probe: self.diagnostic.z_probe_mm * 1e-3 })
    }

    pub fn decay_params(&self) -> DecayParams {
        DecayParams {
            tau_spurious_us: self.decay.tau_spurious_us,
            kappa_grad: self.decay.kappa_grad,
            transit_speed: self.decay.transit_speed_m_s,
            theta: self.beam.theta_deg.to_radians(),
            wavelength: self.grid.wavelength_nm * 1e-9,
        }
    }
}
