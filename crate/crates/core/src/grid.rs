//! Square sampling grid shared by every transverse field.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cesium D2 vacuum wavelength.
pub const CS_D2_WAVELENGTH: f64 = 852.347e-9;

/// `n × n` samples over a `width × width` window, row-major with y outer.
///
/// Sample `(row, col)` sits at `x = (col − n/2)·dx`, `y = (row − n/2)·dx`, so
/// the optical axis passes exactly through sample `(n/2, n/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    width: f64,
    wavelength: f64,
}

impl GridSpec {
    pub fn new(n: usize, width: f64, wavelength: f64) -> Result<Self> {
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n = {n} must be a power of two ≥ 64")));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidGrid(format!("width = {width} must be positive")));
        }
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::InvalidGrid(format!("wavelength = {wavelength} must be positive")));
        }
        Ok(Self { n, width, wavelength })
    }

    /// 512 samples over 8 mm at the Cs D2 line.
    pub fn default_grid() -> Self {
        Self { n: 512, width: 8e-3, wavelength: CS_D2_WAVELENGTH }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn dx(&self) -> f64 {
        self.width / self.n as f64
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Physical coordinate of column/row index `i`.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.dx()
    }

    /// Largest transverse wavevector that can be sampled with at least four
    /// samples per period.
    pub fn max_sampled_kx(&self) -> f64 {
        2.0 * PI / (4.0 * self.dx())
    }

    /// Checks that a helical phase of charge `ell` changes by less than π per
    /// pixel at radius `radius` (the beam waist for LG modes).
    pub fn check_helical_sampling(&self, ell: i32, radius: f64) -> Result<()> {
        if !(radius > 0.0) {
            return Err(Error::Sampling(format!("reference radius {radius} must be positive")));
        }
        let per_pixel = ell.unsigned_abs() as f64 * self.dx() / radius;
        if per_pixel >= PI {
            return Err(Error::Sampling(format!(
                "charge {ell} changes phase by {per_pixel:.3} rad/pixel at r = {radius:.3e} m"
            )));
        }
        Ok(())
    }

    /// Checks that a linear phase `exp(i·kx·x)` can be written into samples.
    pub fn check_tilt_sampling(&self, kx: f64) -> Result<()> {
        if kx.abs() >= self.max_sampled_kx() {
            return Err(Error::Sampling(format!(
                "tilt kx = {kx:.4e} rad/m exceeds the sampled limit {:.4e} rad/m",
                self.max_sampled_kx()
            )));
        }
        Ok(())
    }
}
