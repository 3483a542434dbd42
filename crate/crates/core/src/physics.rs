//! Closed-form estimates: Zeeman splitting and transit-time limits.

/// Bohr magneton over Planck constant, MHz/G (CODATA 2018: 13.996 244 936 GHz/T).
pub const BOHR_MHZ_PER_GAUSS: f64 = 1.399_624_493_6;

/// |g_F| of the Cs 6S₁/₂ F = 3 ground level.
pub const CS_F3_G_FACTOR: f64 = 0.25;

/// Splitting between consecutive ground sublevels, MHz.
pub fn zeeman_shift(b_gauss: f64) -> f64 {
    assert!(b_gauss >= 0.0, "field magnitude must be non-negative");
    CS_F3_G_FACTOR * BOHR_MHZ_PER_GAUSS * b_gauss
}

/// Grating period written by two beams crossing at `theta`, meters.
pub fn grating_period(theta: f64, wavelength: f64) -> f64 {
    wavelength / (2.0 * (theta / 2.0).sin())
}

/// Transit-limited structure size and lifetime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitLimit {
    /// Effective fringe spacing, µm.
    pub spacing_um: f64,
    /// Time to cross it, µs.
    pub tau_us: f64,
}

/// Near the vortex core the fork fringes tighten by `|ℓ|+1`, so
/// `Λ(ℓ) = Λ(0)/(|ℓ|+1)` and `τ = Λ(ℓ)/speed`.
pub fn transit_limit(ell: i32, theta: f64, wavelength: f64, speed: f64) -> TransitLimit {
    assert!(theta > 0.0 && speed > 0.0, "theta and speed must be positive");
    let spacing = grating_period(theta, wavelength) / (ell.unsigned_abs() as f64 + 1.0);
    TransitLimit { spacing_um: spacing * 1e6, tau_us: spacing / speed * 1e6 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeeman_values() {
        assert_eq!(zeeman_shift(0.0), 0.0);
        assert!((zeeman_shift(1.0) - 0.3499).abs() < 1e-4);
        assert!((zeeman_shift(3.7) - 1.29).abs() < 0.02);
    }

    #[test]
    fn transit_values() {
        let th = 2f64.to_radians();
        let t0 = transit_limit(0, th, 852e-9, 0.2035);
        assert!((t0.spacing_um - 24.4).abs() < 0.3);
        assert!((t0.tau_us - 120.0).abs() < 1.0);
        let t2 = transit_limit(2, th, 852e-9, 0.2035);
        assert!((t2.tau_us - 40.0).abs() < 0.5);
        assert!((t0.tau_us / t2.tau_us - 3.0).abs() < 1e-12);
        let fast = transit_limit(0, th, 852e-9, 0.407);
        assert!((fast.tau_us - t0.tau_us / 2.0).abs() < 1e-9);
    }
}
