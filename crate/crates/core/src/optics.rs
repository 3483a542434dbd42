//! Free-space propagation and thin-lens transforms.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::field::ComplexField;

/// Band-limited angular-spectrum propagation over `z` meters.
///
/// Evanescent components are dropped, and spatial frequencies above the
/// Matsushima–Shimobaba limit `1/(λ√((2Δf·z)²+1))` are cut so the circular
/// convolution does not alias. The carrier is honored by evaluating the
/// transfer function at the shifted frequency.
pub fn propagate(field: &ComplexField, z: f64) -> ComplexField {
    if z == 0.0 {
        return field.clone();
    }
    let grid = *field.grid();
    let n = grid.n();
    let dx = grid.dx();
    let lambda = grid.wavelength();
    let k = grid.wavenumber();
    let df = 1.0 / grid.width();
    let f_limit = 1.0 / (lambda * ((2.0 * df * z).powi(2) + 1.0).sqrt());
    let f_carrier = field.carrier_kx() / (2.0 * PI);

    let mut out = field.clone();
    let data = out.samples_mut();
    fft::forward(data, n);
    for r in 0..n {
        let fy = fft::freq(r, n, dx);
        for c in 0..n {
            let fx = fft::freq(c, n, dx) + f_carrier;
            let kz2 = k * k - (2.0 * PI).powi(2) * (fx * fx + fy * fy);
            let h = if kz2 > 0.0 && fx.abs() < f_limit && fy.abs() < f_limit {
                Complex64::cis(kz2.sqrt() * z)
            } else {
                Complex64::default()
            };
            data[r * n + c] *= h;
        }
    }
    fft::inverse(data, n);
    out
}

/// Thin lens rotated by `tilt` about the y axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensSpec {
    /// Focal length, meters.
    pub focal: f64,
    /// Rotation about y, radians.
    pub tilt: f64,
}

impl LensSpec {
    pub fn new(focal: f64, tilt: f64) -> Result<Self> {
        let lens = Self { focal, tilt };
        lens.validate()?;
        Ok(lens)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.focal.is_finite() && self.focal > 0.0) {
            return Err(Error::InvalidLens(format!("focal length {} must be positive", self.focal)));
        }
        if !(0.0..PI / 3.0).contains(&self.tilt) {
            return Err(Error::InvalidLens(format!("tilt {} must lie in [0, π/3)", self.tilt)));
        }
        Ok(())
    }

    /// Focal lengths along x and y: `f·cos α` and `f / cos α`.
    pub fn focal_xy(&self) -> (f64, f64) {
        let c = self.tilt.cos();
        (self.focal * c, self.focal / c)
    }
}

/// Multiplies by `exp(−ik(x²/2f_x + y²/2f_y))`.
pub fn apply_lens(field: &ComplexField, lens: &LensSpec) -> Result<ComplexField> {
    lens.validate()?;
    let grid = *field.grid();
    let n = grid.n();
    let k = grid.wavenumber();
    let (fx, fy) = lens.focal_xy();
    let mut out = field.clone();
    let data = out.samples_mut();
    for r in 0..n {
        let y = grid.coord(r);
        let qy = y * y / (2.0 * fy);
        for c in 0..n {
            let x = grid.coord(c);
            data[r * n + c] *= Complex64::cis(-k * (x * x / (2.0 * fx) + qy));
        }
    }
    Ok(out)
}

/// Square intensity image, row-major with rows along +y.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    n: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(n: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != n * n || n == 0 {
            return Err(Error::InvalidParameter(format!("image of side {n} needs {} pixels", n * n)));
        }
        Ok(Self { n, pixels })
    }

    pub fn from_field(field: &ComplexField) -> Self {
        Self { n: field.grid().n(), pixels: field.intensity() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.n + col]
    }

    pub fn max(&self) -> f64 {
        self.pixels.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { n: self.n, pixels: self.pixels.iter().map(|&p| f(p)).collect() }
    }
}

/// Intensity `z_probe` behind a tilted (astigmatic) lens.
pub fn tilted_lens_pattern(field: &ComplexField, lens: &LensSpec, z_probe: f64) -> Result<Image> {
    if !(lens.tilt > 0.0) {
        return Err(Error::InvalidLens("tilted-lens pattern needs a nonzero tilt".into()));
    }
    let after = apply_lens(field, lens)?;
    Ok(Image::from_field(&propagate(&after, z_probe)))
}

/// Second-moment beam radius `w = 2σ` along x and y, about the intensity centroid.
pub fn second_moment_widths(field: &ComplexField) -> (f64, f64) {
    let grid = field.grid();
    let n = grid.n();
    let s = field.samples();
    let (mut m0, mut mx, mut my) = (0.0, 0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            let i = s[r * n + c].norm_sqr();
            m0 += i;
            mx += i * grid.coord(c);
            my += i * grid.coord(r);
        }
    }
    let (cx, cy) = (mx / m0, my / m0);
    let (mut sxx, mut syy) = (0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            let i = s[r * n + c].norm_sqr();
            sxx += i * (grid.coord(c) - cx).powi(2);
            syy += i * (grid.coord(r) - cy).powi(2);
        }
    }
    (2.0 * (sxx / m0).sqrt(), 2.0 * (syy / m0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{lg_mode, total_power, BeamSpec};
    use crate::grid::GridSpec;
    use crate::oam::oam_spectrum;

    fn grid() -> GridSpec {
        GridSpec::default_grid()
    }

    #[test]
    fn zero_distance_is_identity() {
        let f = lg_mode(&grid(), &BeamSpec::new(1, 0.5e-3)).unwrap();
        assert_eq!(propagate(&f, 0.0), f);
    }

    #[test]
    fn gaussian_width_at_rayleigh_range() {
        let g = grid();
        let w0 = 0.5e-3;
        let f = lg_mode(&g, &BeamSpec::new(0, w0)).unwrap();
        let zr = PI * w0 * w0 / g.wavelength();
        let (wx, wy) = second_moment_widths(&propagate(&f, zr));
        let expect = w0 * 2f64.sqrt();
        assert!((wx / expect - 1.0).abs() < 0.01, "{wx} vs {expect}");
        assert!((wy / expect - 1.0).abs() < 0.01);
    }

    #[test]
    fn oam_survives_propagation() {
        let f = lg_mode(&grid(), &BeamSpec::new(2, 0.5e-3)).unwrap();
        let s = oam_spectrum(&propagate(&f, 0.05), -6, 6).unwrap();
        assert!(s.weight(2) >= 0.999);
    }

    #[test]
    fn unitary_and_reversible() {
        let f = lg_mode(&grid(), &BeamSpec::new(3, 0.5e-3)).unwrap();
        let p0 = total_power(&f);
        let fwd = propagate(&f, 0.2);
        assert!((total_power(&fwd) / p0 - 1.0).abs() < 1e-10);
        let back = propagate(&fwd, -0.2);
        let rms = (f.samples().iter().zip(back.samples()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>()
            / f.samples().len() as f64)
            .sqrt();
        assert!(rms < 1e-9, "rms {rms}");
    }

    #[test]
    fn untilted_lens_is_stigmatic() {
        let l = LensSpec::new(0.15, 0.0).unwrap();
        assert_eq!(l.focal_xy(), (0.15, 0.15));
        let t = LensSpec::new(0.15, 0.15).unwrap();
        let (fx, fy) = t.focal_xy();
        assert!((fx / fy - 0.15f64.cos().powi(2)).abs() < 1e-12);
        assert!((fx / fy - 0.9776).abs() < 1e-4);
    }

    #[test]
    fn lens_validation() {
        assert!(LensSpec::new(0.0, 0.1).is_err());
        assert!(LensSpec::new(0.1, -0.1).is_err());
        assert!(LensSpec::new(0.1, 1.1).is_err());
    }

    #[test]
    fn lens_preserves_power_and_charge() {
        let f = lg_mode(&grid(), &BeamSpec::new(-2, 0.5e-3)).unwrap();
        let l = apply_lens(&f, &LensSpec::new(0.5, 0.0).unwrap()).unwrap();
        assert!((total_power(&l) / total_power(&f) - 1.0).abs() < 1e-12);
        assert_eq!(oam_spectrum(&propagate(&l, 0.1), -6, 6).unwrap().dominant(), -2);
    }

    #[test]
    fn tilted_pattern_needs_tilt() {
        let f = lg_mode(&grid(), &BeamSpec::new(0, 0.5e-3)).unwrap();
        assert!(tilted_lens_pattern(&f, &LensSpec::new(0.15, 0.0).unwrap(), 0.15).is_err());
    }

    #[test]
    fn carrier_shift_walks_the_beam() {
        // a tilted Gaussian drifts by z·kx/k across the window
        let g = grid();
        let kx = 2.0e4;
        let f = lg_mode(&g, &BeamSpec::new(0, 0.5e-3).with_tilt(kx)).unwrap();
        let z = 0.1;
        let p = propagate(&f, z);
        let n = g.n();
        let (mut m0, mut mx) = (0.0, 0.0);
        for (i, v) in p.samples().iter().enumerate() {
            m0 += v.norm_sqr();
            mx += v.norm_sqr() * g.coord(i % n);
        }
        let kz = (g.wavenumber().powi(2) - kx * kx).sqrt();
        let expect = z * kx / kz;
        assert!((mx / m0 - expect).abs() < 0.02 * expect, "{} vs {expect}", mx / m0);
    }
}
