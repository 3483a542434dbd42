//! 2-D FFT over square row-major buffers, backed by `rustfft`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type PlanCache = RwLock<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().expect("fft plan cache poisoned").get(&(n, forward)) {
        return Arc::clone(p);
    }
    let dir = if forward { FftDirection::Forward } else { FftDirection::Inverse };
    let p = FftPlanner::new().plan_fft(n, dir);
    cache
        .write()
        .expect("fft plan cache poisoned")
        .entry((n, forward))
        .or_insert(p)
        .clone()
}

fn transpose(data: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in (r + 1)..n {
            data.swap(r * n + c, c * n + r);
        }
    }
}

fn fft2(data: &mut [Complex64], n: usize, forward: bool) {
    assert_eq!(data.len(), n * n);
    let p = plan(n, forward);
    let mut scratch = vec![Complex64::default(); p.get_inplace_scratch_len()];
    p.process_with_scratch(data, &mut scratch);
    transpose(data, n);
    p.process_with_scratch(data, &mut scratch);
    transpose(data, n);
}

/// Unnormalized forward transform.
pub fn forward(data: &mut [Complex64], n: usize) {
    fft2(data, n, true);
}

/// Inverse transform, normalized so `inverse(forward(x)) == x`.
pub fn inverse(data: &mut [Complex64], n: usize) {
    fft2(data, n, false);
    let s = 1.0 / (n * n) as f64;
    data.iter_mut().for_each(|v| *v *= s);
}

/// Spatial frequency (cycles per meter) of FFT bin `i` for `n` samples at pitch `dx`.
#[inline]
pub fn freq(i: usize, n: usize, dx: f64) -> f64 {
    let k = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
    k / (n as f64 * dx)
}
