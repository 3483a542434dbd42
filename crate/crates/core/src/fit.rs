//! Least-squares fit of `A0·exp(−(t/τ)²)` to storage-decay data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub a0: f64,
    pub tau: f64,
    /// RMS of `A − model`.
    pub residual_rms: f64,
}

fn model(a0: f64, tau: f64, t: f64) -> f64 {
    a0 * (-(t / tau).powi(2)).exp()
}

fn sse(samples: &[(f64, f64)], a0: f64, tau: f64) -> f64 {
    samples.iter().map(|&(t, a)| (a - model(a0, tau, t)).powi(2)).sum()
}

/// Straight line through `(t², ln A)`; `None` if any amplitude is non-positive
/// or the slope is not decaying.
fn log_linear(samples: &[(f64, f64)]) -> Option<(f64, f64)> {
    if samples.iter().any(|&(_, a)| !(a > 0.0)) {
        return None;
    }
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, a) in samples {
        let (x, y) = (t * t, a.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    if !(slope < 0.0) {
        return None;
    }
    Some((intercept.exp(), (-1.0 / slope).sqrt()))
}

/// Crude start for data the log-linearization cannot take: peak amplitude and
/// the first time the data drop below `peak/e`.
fn heuristic_start(samples: &[(f64, f64)]) -> (f64, f64) {
    let a0 = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let t_max = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    let tau = samples
        .iter()
        .find(|&&(_, a)| a < a0 / std::f64::consts::E)
        .map(|s| s.0)
        .filter(|t| *t > 0.0)
        .unwrap_or(0.5 * t_max.max(1e-12));
    (a0, tau)
}

/// Levenberg–Marquardt refinement over `(A0, τ)`.
fn refine(samples: &[(f64, f64)], mut a0: f64, mut tau: f64) -> (f64, f64) {
    let mut lambda = 1e-3;
    let mut cost = sse(samples, a0, tau);
    for _ in 0..200 {
        // normal equations J^T J δ = −J^T r with r = A − model
        let (mut jaa, mut jat, mut jtt, mut ga, mut gt) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(t, a) in samples {
            let e = (-(t / tau).powi(2)).exp();
            let r = a - a0 * e;
            let da = e;
            let dt = a0 * e * 2.0 * t * t / tau.powi(3);
            jaa += da * da;
            jat += da * dt;
            jtt += dt * dt;
            ga += da * r;
            gt += dt * r;
        }
        let mut improved = false;
        for _ in 0..30 {
            let (m11, m22) = (jaa * (1.0 + lambda), jtt * (1.0 + lambda));
            let det = m11 * m22 - jat * jat;
            if det == 0.0 || !det.is_finite() {
                lambda *= 10.0;
                continue;
            }
            let step_a = (ga * m22 - gt * jat) / det;
            let step_t = (m11 * gt - jat * ga) / det;
            let (na, nt) = (a0 + step_a, tau + step_t);
            if nt > 0.0 {
                let c = sse(samples, na, nt);
                if c <= cost {
                    let converged = (cost - c) <= 1e-15 * cost.max(1e-300);
                    a0 = na;
                    tau = nt;
                    cost = c;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = !converged;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (a0, tau)
}

/// Fits `A0·exp(−(t/τ)²)`.
///
/// Starts from the log-linear solution when all amplitudes are positive,
/// otherwise from a heuristic guess, then refines by nonlinear least squares.
pub fn fit_gaussian_decay(samples: &[(f64, f64)]) -> Result<GaussianFit> {
    if samples.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 samples, got {}", samples.len())));
    }
    if samples.iter().any(|&(t, a)| !(t >= 0.0) || !t.is_finite() || !a.is_finite()) {
        return Err(Error::Fit("times must be non-negative and values finite".into()));
    }
    let first = samples[0].1;
    if samples.iter().all(|&(_, a)| a == first) {
        return Err(Error::Fit("all amplitudes are equal".into()));
    }
    let (a_start, tau_start) = log_linear(samples).unwrap_or_else(|| heuristic_start(samples));
    let (a0, tau) = refine(samples, a_start, tau_start);
    if !(a0.is_finite() && tau.is_finite() && tau > 0.0) {
        return Err(Error::Fit("did not converge".into()));
    }
    let residual_rms = (sse(samples, a0, tau) / samples.len() as f64).sqrt();
    Ok(GaussianFit { a0, tau, residual_rms })
}
