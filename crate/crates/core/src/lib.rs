//! Scalar wave-optics model of an orbital-angular-momentum memory built on
//! coherent population oscillation (CPO) in cold atoms.
//!
//! Two writing beams W and W′ store a grating `E_W·conj(E_W′)`; a reading
//! beam R counter-propagating W diffracts off it into the phase-conjugate
//! beam D. The crate covers the sampled fields, free-space optics, the
//! tilted-lens charge diagnostic, the phenomenological CPO/EIT memory model,
//! and the scripted experiments driven by the `cpo-oam` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charge;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod field;
pub mod fit;
pub mod grid;
pub mod io;
pub mod memory;
pub mod oam;
pub mod optics;
pub mod physics;
pub mod spectrum;

pub use charge::{count_fringes, measure_charge_oracle, measure_charge_tilted, ChargeMeasurement, TiltedLensDiagnostic};
pub use config::Config;
pub use error::{Error, Result};
pub use field::{imprint_helical_phase, inner_product, lg_mode, mirror_x, total_power, BeamSpec, ComplexField, Direction};
pub use grid::GridSpec;
pub use memory::{DecayParams, MemoryState, PolarizationConfig, PolarizationMode};
pub use oam::{oam_spectrum, OamSpectrum};
pub use optics::{apply_lens, propagate, tilted_lens_pattern, Image, LensSpec};
pub use spectrum::{Peak, SpectralModel};
