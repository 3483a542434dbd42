//! Sampled transverse fields, Laguerre-Gauss modes and field algebra.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Largest topological charge accepted for beam specs by default.
pub const DEFAULT_ELL_MAX: i32 = 6;

/// Propagation direction relative to the frame the samples are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> i8 {
        match self {
            Direction::Forward => 1,
            Direction::Backward => -1,
        }
    }

    pub fn from_sign(s: i8) -> Option<Self> {
        match s {
            1 => Some(Direction::Forward),
            -1 => Some(Direction::Backward),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// A transverse complex field `E(x, y) = A(x, y)·exp(i·carrier_kx·x)`.
///
/// `A` is the sampled envelope; the linear-phase carrier is kept analytic so
/// beams tilted by more than the grid can resolve (the 2° writer) stay exact.
/// Power is `Σ|A|²·dx²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    samples: Vec<Complex64>,
    direction: Direction,
    carrier_kx: f64,
}

impl ComplexField {
    pub fn new(grid: GridSpec, samples: Vec<Complex64>, direction: Direction) -> Result<Self> {
        Self::with_carrier(grid, samples, direction, 0.0)
    }

    pub fn with_carrier(
        grid: GridSpec,
        samples: Vec<Complex64>,
        direction: Direction,
        carrier_kx: f64,
    ) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if samples.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter("field samples must be finite".into()));
        }
        if !carrier_kx.is_finite() {
            return Err(Error::InvalidParameter("carrier must be finite".into()));
        }
        Ok(Self { grid, samples, direction, carrier_kx })
    }

    pub fn zeros(grid: GridSpec, direction: Direction) -> Self {
        Self { grid, samples: vec![Complex64::default(); grid.len()], direction, carrier_kx: 0.0 }
    }

    /// Builds a field by evaluating `f(x, y)` at every sample.
    pub fn from_fn(grid: GridSpec, direction: Direction, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let n = grid.n();
        let mut samples = Vec::with_capacity(n * n);
        for r in 0..n {
            let y = grid.coord(r);
            for c in 0..n {
                samples.push(f(grid.coord(c), y));
            }
        }
        Self { grid, samples, direction, carrier_kx: 0.0 }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn carrier_kx(&self) -> f64 {
        self.carrier_kx
    }

    pub(crate) fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    /// Same field with the carrier discarded, i.e. seen from the beam's own axis.
    pub fn envelope(&self) -> Self {
        Self { carrier_kx: 0.0, ..self.clone() }
    }

    /// Writes the carrier into the samples. Fails when the tilt would alias.
    pub fn bake_carrier(&self) -> Result<Self> {
        if self.carrier_kx == 0.0 {
            return Ok(self.clone());
        }
        self.grid.check_tilt_sampling(self.carrier_kx)?;
        let n = self.grid.n();
        let mut out = self.clone();
        for (i, v) in out.samples.iter_mut().enumerate() {
            *v *= Complex64::cis(self.carrier_kx * self.grid.coord(i % n));
        }
        out.carrier_kx = 0.0;
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.samples.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|v| v.conj()).collect(),
            direction: self.direction,
            carrier_kx: -self.carrier_kx,
        }
    }

    /// Pointwise product; carriers add, direction is taken from `self`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect(),
            direction: self.direction,
            carrier_kx: self.carrier_kx + other.carrier_kx,
        })
    }

    /// Pointwise sum; both fields must share grid and carrier.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.carrier_kx != other.carrier_kx {
            return Err(Error::InvalidParameter("cannot add fields with different carriers".into()));
        }
        Ok(Self {
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn peak_intensity(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max)
    }

    /// Bilinear interpolation of the envelope at `(x, y)`; zero outside the window.
    pub fn envelope_at(&self, x: f64, y: f64) -> Complex64 {
        let n = self.grid.n();
        let dx = self.grid.dx();
        let half = (n / 2) as f64;
        let fx = x / dx + half;
        let fy = y / dx + half;
        if !(fx >= 0.0 && fy >= 0.0) {
            return Complex64::default();
        }
        let c0 = fx.floor() as usize;
        let r0 = fy.floor() as usize;
        if c0 + 1 >= n || r0 + 1 >= n {
            return Complex64::default();
        }
        let tx = fx - c0 as f64;
        let ty = fy - r0 as f64;
        let s = &self.samples;
        let a = s[r0 * n + c0] * (1.0 - tx) + s[r0 * n + c0 + 1] * tx;
        let b = s[(r0 + 1) * n + c0] * (1.0 - tx) + s[(r0 + 1) * n + c0 + 1] * tx;
        a * (1.0 - ty) + b * ty
    }

    /// Full field value, carrier included.
    pub fn value_at(&self, x: f64, y: f64) -> Complex64 {
        self.envelope_at(x, y) * Complex64::cis(self.carrier_kx * x)
    }

    /// Intensity-weighted RMS radius about the grid center.
    pub fn rms_radius(&self) -> f64 {
        let n = self.grid.n();
        let (mut m0, mut m2) = (0.0, 0.0);
        for r in 0..n {
            let y = self.grid.coord(r);
            for c in 0..n {
                let x = self.grid.coord(c);
                let i = self.samples[r * n + c].norm_sqr();
                m0 += i;
                m2 += i * (x * x + y * y);
            }
        }
        if m0 > 0.0 {
            (m2 / m0).sqrt()
        } else {
            0.0
        }
    }
}

/// Analytic incident beam: LG mode with radial index 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    pub ell: i32,
    /// w0 in meters.
    pub waist: f64,
    /// Peak field modulus.
    pub amplitude: f64,
    /// Transverse wavevector, rad/m.
    pub tilt_kx: f64,
    pub direction: Direction,
}

impl BeamSpec {
    pub fn new(ell: i32, waist: f64) -> Self {
        Self { ell, waist, amplitude: 1.0, tilt_kx: 0.0, direction: Direction::Forward }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn with_tilt(mut self, tilt_kx: f64) -> Self {
        self.tilt_kx = tilt_kx;
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn validate(&self, ell_max: i32) -> Result<()> {
        if !(self.waist.is_finite() && self.waist > 0.0) {
            return Err(Error::InvalidBeam(format!("waist {} must be positive", self.waist)));
        }
        if self.ell.abs() > ell_max {
            return Err(Error::InvalidBeam(format!("|ell| = {} exceeds ell_max = {ell_max}", self.ell.abs())));
        }
        if !self.amplitude.is_finite() || !self.tilt_kx.is_finite() {
            return Err(Error::InvalidBeam("amplitude and tilt must be finite".into()));
        }
        Ok(())
    }

    /// Analytic power `A²·(π w0²/2)·|ℓ|! / (|ℓ|^|ℓ| e^−|ℓ|)` of the peak-normalized mode.
    pub fn analytic_power(&self) -> f64 {
        let l = self.ell.unsigned_abs();
        let fact: f64 = (1..=l).map(f64::from).product();
        self.amplitude * self.amplitude * PI * self.waist * self.waist / 2.0 * fact / peak_norm(l).powi(2)
    }
}

/// Peak of `(r√2/w0)^l·exp(−r²/w0²)`, reached at `r = w0·√(l/2)`.
fn peak_norm(l: u32) -> f64 {
    if l == 0 {
        1.0
    } else {
        let l = l as f64;
        l.powf(l / 2.0) * (-l / 2.0).exp()
    }
}

/// `A·(r√2/w0)^|ℓ|·exp(−r²/w0²)·exp(iℓφ)` centered on the grid, carrier `tilt_kx`.
pub fn lg_mode(grid: &GridSpec, spec: &BeamSpec) -> Result<ComplexField> {
    lg_mode_bounded(grid, spec, DEFAULT_ELL_MAX)
}

pub fn lg_mode_bounded(grid: &GridSpec, spec: &BeamSpec, ell_max: i32) -> Result<ComplexField> {
    spec.validate(ell_max)?;
    grid.check_helical_sampling(spec.ell, spec.waist)?;
    let l = spec.ell.unsigned_abs();
    let norm = spec.amplitude / peak_norm(l);
    let w0 = spec.waist;
    let ell = spec.ell as f64;
    let mut f = ComplexField::from_fn(*grid, spec.direction, |x, y| {
        let r2 = x * x + y * y;
        let radial = (2.0 * r2 / (w0 * w0)).powf(l as f64 / 2.0) * (-r2 / (w0 * w0)).exp();
        Complex64::from_polar(norm * radial, ell * y.atan2(x))
    });
    f.carrier_kx = spec.tilt_kx;
    Ok(f)
}

/// Multiplies by `exp(i·ell·φ)` about the grid center.
pub fn imprint_helical_phase(field: &ComplexField, ell: i32) -> Result<ComplexField> {
    if ell == 0 {
        return Ok(field.clone());
    }
    let radius = field.rms_radius();
    if radius > 0.0 {
        field.grid.check_helical_sampling(ell, radius)?;
    }
    let n = field.grid.n();
    let mut out = field.clone();
    for r in 0..n {
        let y = field.grid.coord(r);
        for c in 0..n {
            let x = field.grid.coord(c);
            out.samples[r * n + c] *= Complex64::cis(ell as f64 * y.atan2(x));
        }
    }
    Ok(out)
}

pub fn total_power(field: &ComplexField) -> f64 {
    let dx = field.grid.dx();
    field.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx * dx
}

/// `Σ f·conj(g)·dx²` including any carrier difference.
pub fn inner_product(f: &ComplexField, g: &ComplexField) -> Result<Complex64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    let dx = f.grid.dx();
    let dk = f.carrier_kx - g.carrier_kx;
    let n = f.grid.n();
    let sum: Complex64 = if dk == 0.0 {
        f.samples.iter().zip(&g.samples).map(|(a, b)| a * b.conj()).sum()
    } else {
        f.samples
            .iter()
            .zip(&g.samples)
            .enumerate()
            .map(|(i, (a, b))| a * b.conj() * Complex64::cis(dk * f.grid.coord(i % n)))
            .sum()
    };
    Ok(sum * dx * dx)
}

/// Reflects `x → −x` and reverses the direction tag; re-expresses a field in
/// the frame of a beam travelling the opposite way.
pub fn mirror_x(field: &ComplexField) -> ComplexField {
    let n = field.grid.n();
    let mut samples = vec![Complex64::default(); n * n];
    for r in 0..n {
        let row = &field.samples[r * n..(r + 1) * n];
        let dst = &mut samples[r * n..(r + 1) * n];
        for c in 0..n {
            dst[(n - c) % n] = row[c];
        }
    }
    ComplexField {
        grid: field.grid,
        samples,
        direction: field.direction.flipped(),
        carrier_kx: -field.carrier_kx,
    }
}
