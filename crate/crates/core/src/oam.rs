//! Azimuthal (OAM) decomposition of a field about the grid center.
//!
//! The envelope is resampled onto polar rings by bilinear interpolation; on
//! each ring `c_m(r) = (1/2π)∮E(r,φ)e^{−imφ}dφ` is evaluated as a discrete sum,
//! and ring contributions `r·|c_m(r)|²` are integrated with the trapezoid rule.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OamSpectrum {
    pub m_min: i32,
    pub m_max: i32,
    /// Normalized power per index, `weights[i]` ↔ `m = m_min + i`.
    pub weights: Vec<f64>,
    /// Unnormalized power captured by the bins in range.
    pub in_range_power: f64,
    /// Power of the polar resampling over all angular harmonics.
    pub polar_power: f64,
}

impl OamSpectrum {
    pub fn weight(&self, m: i32) -> f64 {
        if m < self.m_min || m > self.m_max {
            0.0
        } else {
            self.weights[(m - self.m_min) as usize]
        }
    }

    /// Index with the largest weight (lowest `m` on ties).
    pub fn dominant(&self) -> i32 {
        let mut best = 0;
        for (i, w) in self.weights.iter().enumerate() {
            if *w > self.weights[best] {
                best = i;
            }
        }
        self.m_min + best as i32
    }

    pub fn purity(&self) -> f64 {
        self.weight(self.dominant())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.weights.iter().enumerate().map(move |(i, w)| (self.m_min + i as i32, *w))
    }
}

fn angular_samples(m_abs: u32) -> usize {
    (8 * (m_abs as usize + 1)).next_power_of_two().max(128)
}

pub fn oam_spectrum(field: &ComplexField, m_min: i32, m_max: i32) -> Result<OamSpectrum> {
    if m_min > m_max {
        return Err(Error::InvalidParameter(format!("empty bin range [{m_min}, {m_max}]")));
    }
    let grid = field.grid();
    let n_rings = grid.n() / 2;
    let dr = grid.width() / 2.0 / n_rings as f64;
    let m_abs = m_min.unsigned_abs().max(m_max.unsigned_abs());
    let n_phi = angular_samples(m_abs);
    let n_bins = (m_max - m_min + 1) as usize;

    let (cos_t, sin_t): (Vec<f64>, Vec<f64>) =
        (0..n_phi).map(|k| (2.0 * PI * k as f64 / n_phi as f64).sin_cos()).map(|(s, c)| (c, s)).unzip();
    // twiddles[b][k] = exp(−i m φ_k)
    let twiddles: Vec<Vec<Complex64>> = (m_min..=m_max)
        .map(|m| (0..n_phi).map(|k| Complex64::cis(-2.0 * PI * (m as f64) * k as f64 / n_phi as f64)).collect())
        .collect();

    let mut weights = vec![0.0; n_bins];
    let mut polar_power = 0.0;
    let mut ring = vec![Complex64::default(); n_phi];
    for j in 1..=n_rings {
        let r = j as f64 * dr;
        let trap = if j == n_rings { 0.5 } else { 1.0 };
        let ring_w = 2.0 * PI * trap * r * dr;
        for k in 0..n_phi {
            ring[k] = field.envelope_at(r * cos_t[k], r * sin_t[k]);
        }
        polar_power += ring_w * ring.iter().map(|v| v.norm_sqr()).sum::<f64>() / n_phi as f64;
        for (b, tw) in twiddles.iter().enumerate() {
            let c: Complex64 = ring.iter().zip(tw).map(|(e, t)| e * t).sum::<Complex64>() / n_phi as f64;
            weights[b] += ring_w * c.norm_sqr();
        }
    }
    let in_range_power: f64 = weights.iter().sum();
    if !(in_range_power > 0.0) {
        return Err(Error::UndefinedSpectrum);
    }
    weights.iter_mut().for_each(|w| *w /= in_range_power);
    Ok(OamSpectrum { m_min, m_max, weights, in_range_power, polar_power })
}
