//! Topological-charge measurement: tilted-lens fringe counting, cross-checked
//! against the azimuthal-spectrum oracle.
//!
//! Behind an astigmatic lens an LG beam of charge ℓ breaks into |ℓ|+1 bright
//! lobes lined up along one of the two diagonals of the lens axes; which
//! diagonal gives the sign of ℓ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::oam::oam_spectrum;
use crate::optics::{tilted_lens_pattern, Image, LensSpec};

/// Lobes are counted above this fraction of the image maximum.
pub const PEAK_THRESHOLD: f64 = 0.15;
/// Peaks closer than this many pixels are merged.
pub const MIN_PEAK_SEPARATION_PX: f64 = 3.0;
/// Diagonal second-moment ratio needed to assign an orientation.
pub const ANISOTROPY_THRESHOLD: f64 = 1.1;
/// Oracle bin range.
pub const ORACLE_M_RANGE: (i32, i32) = (-8, 8);

const PROFILE_STEP_PX: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltedLensDiagnostic {
    pub lens: LensSpec,
    /// Observation distance behind the lens, meters.
    pub z_probe: f64,
}

impl Default for TiltedLensDiagnostic {
    fn default() -> Self {
        Self { lens: LensSpec { focal: 0.15, tilt: 0.7 }, z_probe: 0.15 }
    }
}

impl TiltedLensDiagnostic {
    pub fn pattern(&self, field: &ComplexField) -> Result<Image> {
        // the diagnostic is aligned on the beam's own axis
        tilted_lens_pattern(&field.envelope(), &self.lens, self.z_probe)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargeMeasurement {
    pub fringe_count: u32,
    pub orientation_sign: i8,
    pub ell_tilted: i32,
    pub ell_oracle: i32,
    pub purity: f64,
}

impl ChargeMeasurement {
    pub fn agrees(&self) -> bool {
        self.ell_tilted == self.ell_oracle
    }
}

fn box_smooth(img: &Image) -> Vec<f64> {
    let n = img.n();
    let mut out = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            let mut s = 0.0;
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    let rr = r as i64 + dr;
                    let cc = c as i64 + dc;
                    if rr >= 0 && cc >= 0 && (rr as usize) < n && (cc as usize) < n {
                        s += img.get(rr as usize, cc as usize);
                    }
                }
            }
            out[r * n + c] = s / 9.0;
        }
    }
    out
}

fn bilinear(data: &[f64], n: usize, row: f64, col: f64) -> Option<f64> {
    if !(row >= 0.0 && col >= 0.0) {
        return None;
    }
    let (r0, c0) = (row.floor() as usize, col.floor() as usize);
    if r0 + 1 >= n || c0 + 1 >= n {
        return None;
    }
    let (tr, tc) = (row - r0 as f64, col - c0 as f64);
    let a = data[r0 * n + c0] * (1.0 - tc) + data[r0 * n + c0 + 1] * tc;
    let b = data[(r0 + 1) * n + c0] * (1.0 - tc) + data[(r0 + 1) * n + c0 + 1] * tc;
    Some(a * (1.0 - tr) + b * tr)
}

/// Counts bright lobes in a tilted-lens pattern and reads their orientation.
///
/// The image is box-smoothed (3×3) and masked at [`PEAK_THRESHOLD`] of its
/// maximum. The masked second moments along the two diagonals decide the
/// orientation; their ratio must exceed [`ANISOTROPY_THRESHOLD`], otherwise
/// the pattern is a single spot and `(1, 0)` is returned. Lobes are then
/// counted as thresholded local maxima of the smoothed intensity sampled
/// along the elongated diagonal through the centroid.
pub fn count_fringes(image: &Image) -> Result<(u32, i8)> {
    if image.pixels().iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::DegenerateImage("pixels must be finite and non-negative".into()));
    }
    if !(image.max() > 0.0) {
        return Err(Error::DegenerateImage("image is all zero".into()));
    }
    let n = image.n();
    let smooth = box_smooth(image);
    let smax = smooth.iter().copied().fold(0.0, f64::max);
    let cut = PEAK_THRESHOLD * smax;

    let (mut m0, mut mx, mut my) = (0.0, 0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            let v = smooth[r * n + c];
            if v > cut {
                m0 += v;
                mx += v * c as f64;
                my += v * r as f64;
            }
        }
    }
    let (cx, cy) = (mx / m0, my / m0);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            let v = smooth[r * n + c];
            if v > cut {
                let (dx, dy) = (c as f64 - cx, r as f64 - cy);
                sxx += v * dx * dx;
                syy += v * dy * dy;
                sxy += v * dx * dy;
            }
        }
    }
    let mean = 0.5 * (sxx + syy) / m0;
    let s_diag = mean + sxy / m0;
    let s_anti = mean - sxy / m0;
    let ratio = s_diag.max(s_anti) / s_diag.min(s_anti);
    if !(ratio > ANISOTROPY_THRESHOLD) {
        return Ok((1, 0));
    }
    let along = if sxy > 0.0 { 1.0 } else { -1.0 };
    // unit vector (col, row) of the elongated diagonal
    let (uc, ur) = (std::f64::consts::FRAC_1_SQRT_2, along * std::f64::consts::FRAC_1_SQRT_2);

    let steps = (2.0 * n as f64 / PROFILE_STEP_PX) as i64;
    let mut profile = Vec::with_capacity(2 * steps as usize + 1);
    for s in -steps..=steps {
        let t = s as f64 * PROFILE_STEP_PX;
        profile.push(bilinear(&smooth, n, cy + t * ur, cx + t * uc).unwrap_or(0.0));
    }
    let mut peaks: Vec<usize> = Vec::new();
    for i in 1..profile.len() - 1 {
        let v = profile[i];
        if v > cut && v > profile[i - 1] && v >= profile[i + 1] {
            if let Some(&last) = peaks.last() {
                if (i - last) as f64 * PROFILE_STEP_PX < MIN_PEAK_SEPARATION_PX {
                    if v > profile[last] {
                        *peaks.last_mut().unwrap() = i;
                    }
                    continue;
                }
            }
            peaks.push(i);
        }
    }
    let count = peaks.len().max(1) as u32;
    // positive charge lines the lobes up along the (+x, −y) diagonal
    Ok((count, -(along as i8)))
}

pub fn measure_charge_oracle(field: &ComplexField) -> Result<i32> {
    Ok(oam_spectrum(field, ORACLE_M_RANGE.0, ORACLE_M_RANGE.1)?.dominant())
}

/// Tilted-lens measurement with the default diagnostic.
pub fn measure_charge_tilted(field: &ComplexField) -> Result<ChargeMeasurement> {
    measure_charge_with(field, &TiltedLensDiagnostic::default())
}

pub fn measure_charge_with(field: &ComplexField, diag: &TiltedLensDiagnostic) -> Result<ChargeMeasurement> {
    let pattern = diag.pattern(field)?;
    measure_from_pattern(field, &pattern)
}

/// Builds the measurement from an already computed pattern of `field`.
pub fn measure_from_pattern(field: &ComplexField, pattern: &Image) -> Result<ChargeMeasurement> {
    let (fringe_count, orientation_sign) = count_fringes(pattern)?;
    let spectrum = oam_spectrum(field, ORACLE_M_RANGE.0, ORACLE_M_RANGE.1)?;
    let ell_oracle = spectrum.dominant();
    Ok(ChargeMeasurement {
        fringe_count,
        orientation_sign,
        ell_tilted: orientation_sign as i32 * (fringe_count as i32 - 1),
        ell_oracle,
        purity: spectrum.weight(ell_oracle),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{imprint_helical_phase, lg_mode, mirror_x, BeamSpec, Direction};
    use crate::grid::GridSpec;
    use num_complex::Complex64;

    fn lg(ell: i32) -> ComplexField {
        lg_mode(&GridSpec::default_grid(), &BeamSpec::new(ell, 0.5e-3)).unwrap()
    }

    fn fringes(ell: i32) -> (u32, i8) {
        count_fringes(&TiltedLensDiagnostic::default().pattern(&lg(ell)).unwrap()).unwrap()
    }

    #[test]
    fn fringe_examples() {
        assert_eq!(fringes(0), (1, 0));
        assert_eq!(fringes(1), (2, 1));
        assert_eq!(fringes(-2), (3, -1));
        assert_eq!(fringes(2), (3, 1));
    }

    #[test]
    fn degenerate_images() {
        let z = Image::new(64, vec![0.0; 64 * 64]).unwrap();
        assert!(matches!(count_fringes(&z), Err(Error::DegenerateImage(_))));
        let mut p = vec![1.0; 64 * 64];
        p[5] = -1.0;
        assert!(count_fringes(&Image::new(64, p).unwrap()).is_err());
    }

    #[test]
    fn tilted_measurements() {
        let m = measure_charge_tilted(&lg(2)).unwrap();
        assert_eq!((m.ell_tilted, m.ell_oracle), (2, 2));
        assert_eq!(measure_charge_tilted(&lg(0)).unwrap().ell_tilted, 0);
        let m4 = measure_charge_tilted(&lg(4)).unwrap();
        assert_eq!((m4.ell_tilted, m4.fringe_count), (4, 5));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(measure_charge_oracle(&lg(-1)).unwrap(), -1);
        let imprinted = imprint_helical_phase(&lg(0), 3).unwrap();
        assert_eq!(measure_charge_oracle(&imprinted).unwrap(), 3);
        assert_eq!(measure_charge_oracle(&mirror_x(&lg(2))).unwrap(), -2);
        let z = ComplexField::zeros(GridSpec::default_grid(), Direction::Forward);
        assert!(measure_charge_oracle(&z).is_err());
    }

    #[test]
    fn scale_invariant() {
        let f = lg(-3);
        let a = measure_charge_tilted(&f).unwrap();
        let b = measure_charge_tilted(&f.scale(Complex64::new(-0.03, 2.5))).unwrap();
        assert_eq!(a.fringe_count, b.fringe_count);
        assert_eq!(a.orientation_sign, b.orientation_sign);
        assert_eq!(a.ell_oracle, b.ell_oracle);
        assert!((a.purity - b.purity).abs() < 1e-12);
    }

    #[test]
    fn invariant_between_fields() {
        for ell in -4..=4 {
            let m = measure_charge_tilted(&lg(ell)).unwrap();
            assert_eq!(m.ell_tilted, m.orientation_sign as i32 * (m.fringe_count as i32 - 1));
            if m.orientation_sign == 0 {
                assert_eq!(m.fringe_count, 1);
            }
        }
    }
}
