//! Scripted experiments behind the `cpo-oam` subcommands.
//!
//! Every command computes all of its outputs in memory first and only then
//! writes them, together with `report.json`, into the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::charge::{measure_from_pattern, ChargeMeasurement, TiltedLensDiagnostic};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::field::{lg_mode_bounded, BeamSpec, ComplexField, Direction};
use crate::fit::{fit_gaussian_decay, GaussianFit};
use crate::grid::GridSpec;
use crate::io::{encode_field, encode_pgm};
use crate::memory::{decay_envelope, read, retrieval_efficiency, write_grating, DecayParams, PolarizationConfig, PolarizationMode};
use crate::optics::Image;
use crate::spectrum::{calibration_scale, local_maxima, scan};

pub const REPORT_FILE: &str = "report.json";

/// Memory flavours: CPO is lin⊥lin with the dc field on, EIT circ⊥circ with it off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MemoryKind {
    Cpo,
    Eit,
}

impl MemoryKind {
    pub const ALL: [MemoryKind; 2] = [MemoryKind::Cpo, MemoryKind::Eit];

    pub fn label(self) -> &'static str {
        match self {
            MemoryKind::Cpo => "cpo",
            MemoryKind::Eit => "eit",
        }
    }
}

/// Grid, beams and calibration derived from one config.
#[derive(Debug, Clone)]
pub struct Session {
    pub config: Config,
    pub grid: GridSpec,
    pub diagnostic: TiltedLensDiagnostic,
    pub decay: DecayParams,
}

impl Session {
    pub fn new(config: &Config) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config: config.clone(),
            grid: config.grid_spec()?,
            diagnostic: config.diagnostic()?,
            decay: config.decay_params(),
        })
    }

    fn waist(&self) -> f64 {
        self.config.beam.waist_mm * 1e-3
    }

    /// Transverse wavevector of W relative to the W′ axis.
    pub fn writer_tilt_kx(&self) -> f64 {
        self.grid.wavenumber() * self.config.beam.theta_deg.to_radians().sin()
    }

    fn beam(&self, spec: BeamSpec) -> Result<ComplexField> {
        lg_mode_bounded(&self.grid, &spec, self.config.beam.ell_max)
    }

    pub fn writer(&self, ell: i32) -> Result<ComplexField> {
        self.beam(
            BeamSpec::new(ell, self.waist())
                .with_amplitude(self.config.beam.intensity_w.sqrt())
                .with_tilt(self.writer_tilt_kx()),
        )
    }

    pub fn writer_prime(&self, ell: i32) -> Result<ComplexField> {
        self.beam(BeamSpec::new(ell, self.waist()).with_amplitude(self.config.beam.intensity_wp.sqrt()))
    }

    /// Gaussian reader counter-propagating W.
    pub fn reader(&self) -> Result<ComplexField> {
        self.beam(
            BeamSpec::new(0, self.waist())
                .with_amplitude(self.config.beam.intensity_r.sqrt())
                .with_tilt(-self.writer_tilt_kx())
                .with_direction(Direction::Backward),
        )
    }

    pub fn polarization(&self, kind: MemoryKind) -> PolarizationConfig {
        let f = &self.config.field;
        match kind {
            MemoryKind::Cpo => PolarizationConfig::cpo(f.b_gauss, f.gradient_g_per_cm),
            MemoryKind::Eit => PolarizationConfig::eit(f.gradient_g_per_cm),
        }
    }

    /// Coupling used at read-out, scaled so Gaussian beams reach the
    /// configured efficiency after `calibration_time_us`.
    pub fn readout_chi3(&self, kind: MemoryKind) -> f64 {
        let c = &self.config;
        let target = match kind {
            MemoryKind::Cpo => c.memory.efficiency_cpo,
            MemoryKind::Eit => c.memory.efficiency_eit,
        };
        let env = decay_envelope(c.memory.calibration_time_us, &self.decay, &self.polarization(kind), 0, 0);
        let steady = c.chi3_eff * c.chi3_eff * c.beam.intensity_w * c.beam.intensity_r;
        if steady > 0.0 && env > 0.0 {
            c.chi3_eff * (target / (steady * env * env)).sqrt()
        } else {
            0.0
        }
    }

    /// Write with (ℓ_W, ℓ_W′), store `t_s` µs, read; D in its own frame.
    pub fn store_and_read(&self, kind: MemoryKind, ell_w: i32, ell_wp: i32, t_s: f64) -> Result<ComplexField> {
        let chi = Complex64::new(self.readout_chi3(kind), 0.0);
        let memory = write_grating(&self.writer(ell_w)?, &self.writer_prime(ell_wp)?, self.polarization(kind), chi)?;
        read(&memory, &self.reader()?, t_s, &self.decay)
    }
}

/// Summary written as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: Config,
    pub manifest: Vec<String>,
    pub summary: Value,
}

/// A finished command: typed results plus the files it will write.
#[derive(Debug, Clone)]
pub struct Run<T> {
    pub data: T,
    pub report: ExperimentReport,
    pub files: Vec<(String, Vec<u8>)>,
}

impl<T> Run<T> {
    fn new(experiment: &str, config: &Config, data: T, summary: Value, mut files: Vec<(String, Vec<u8>)>) -> Self {
        let mut manifest: Vec<String> = files.iter().map(|f| f.0.clone()).collect();
        manifest.push(REPORT_FILE.to_string());
        let report = ExperimentReport { experiment: experiment.to_string(), config: config.clone(), manifest, summary };
        let mut json = serde_json::to_vec_pretty(&report).expect("report serializes");
        json.push(b'\n');
        files.push((REPORT_FILE.to_string(), json));
        Self { data, report, files }
    }

    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|f| f.0 == name).map(|f| f.1.as_slice())
    }

    /// Writes every file; on failure removes what was already written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            if let Err(e) = fs::write(&path, bytes) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                return Err(e.into());
            }
            written.push(path);
        }
        Ok(written)
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn num(v: f64) -> String {
    format!("{v}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumData {
    /// Calibration factor applied to the raw Lorentz sum.
    pub scale: f64,
    pub lin_perp_lin: Vec<(f64, f64)>,
    pub circ_perp_circ: Vec<(f64, f64)>,
    pub lin_maxima: Vec<(f64, f64)>,
    pub circ_maxima: Vec<(f64, f64)>,
}

pub fn cmd_spectrum(config: &Config) -> Result<Run<SpectrumData>> {
    config.validate()?;
    let s = &config.scan;
    let scale = calibration_scale(&config.spectrum, config.chi3_eff, config.beam.intensity_w, config.beam.intensity_r);
    let curve = |mode| scan(&config.spectrum, mode, s.delta_min_mhz, s.delta_max_mhz, s.delta_step_mhz, scale);
    let lin = curve(PolarizationMode::LinPerpLin);
    let circ = curve(PolarizationMode::CircPerpCirc);
    let data = SpectrumData {
        scale,
        lin_maxima: local_maxima(&lin),
        circ_maxima: local_maxima(&circ),
        lin_perp_lin: lin,
        circ_perp_circ: circ,
    };
    let mut files = Vec::new();
    for (mode, curve) in [(PolarizationMode::LinPerpLin, &data.lin_perp_lin), (PolarizationMode::CircPerpCirc, &data.circ_perp_circ)] {
        let rows = curve.iter().map(|&(d, r)| vec![num(d), num(r)]);
        files.push((format!("spectrum_{}.csv", mode.label()), csv_bytes(&["delta_MHz", "reflectivity"], rows)?));
    }
    let maxima = |m: &[(f64, f64)]| m.iter().map(|&(d, r)| json!({"delta_mhz": d, "reflectivity": r})).collect::<Vec<_>>();
    let summary = json!({
        "calibration_scale": scale,
        "maxima": {
            "lin_perp_lin": maxima(&data.lin_maxima),
            "circ_perp_circ": maxima(&data.circ_maxima),
        }
    });
    Ok(Run::new("spectrum", config, data, summary, files))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurve {
    pub kind: MemoryKind,
    /// `(t_s µs, retrieved peak amplitude)`.
    pub samples: Vec<(f64, f64)>,
    pub fit: GaussianFit,
    /// Model τ_tot for comparison, µs.
    pub tau_model: f64,
}

fn time_grid(t_max: f64, step: f64) -> Vec<f64> {
    let n = (t_max / step + 1e-9).floor() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

/// Peak retrieved amplitude vs storage time for both memories, with Gaussian fits.
pub fn cmd_decay(config: &Config, ell_w: i32, ell_wp: i32) -> Result<Run<Vec<DecayCurve>>> {
    let session = Session::new(config)?;
    let times = time_grid(config.scan.t_max_us, config.scan.t_step_us);
    let (w, wp, r) = (session.writer(ell_w)?, session.writer_prime(ell_wp)?, session.reader()?);
    let mut curves = Vec::new();
    for kind in MemoryKind::ALL {
        let chi = Complex64::new(session.readout_chi3(kind), 0.0);
        let pol = session.polarization(kind);
        let memory = write_grating(&w, &wp, pol, chi)?;
        let samples = times
            .par_iter()
            .map(|&t| Ok((t, read(&memory, &r, t, &session.decay)?.peak_intensity().sqrt())))
            .collect::<Result<Vec<_>>>()?;
        let fit = fit_gaussian_decay(&samples)?;
        let tau_model = session.decay.tau_total(&pol, ell_w.unsigned_abs().max(ell_wp.unsigned_abs()));
        curves.push(DecayCurve { kind, samples, fit, tau_model });
    }
    let mut files = Vec::new();
    for c in &curves {
        let rows = c.samples.iter().map(|&(t, a)| vec![num(t), num(a)]);
        files.push((format!("decay_{}.csv", c.kind.label()), csv_bytes(&["t_s_us", "amplitude"], rows)?));
    }
    let rows = curves.iter().map(|c| {
        vec![c.kind.label().to_string(), num(c.fit.a0), num(c.fit.tau), num(c.fit.residual_rms), num(c.tau_model)]
    });
    files.push(("decay_fit.csv".into(), csv_bytes(&["memory", "a0", "tau_us", "residual_rms", "tau_model_us"], rows)?));
    let mut fits = serde_json::Map::new();
    for c in &curves {
        fits.insert(c.kind.label().into(), json!({"a0": c.fit.a0, "tau_us": c.fit.tau, "residual_rms": c.fit.residual_rms}));
    }
    let summary = json!({"ell_w": ell_w, "ell_wp": ell_wp, "fits": fits});
    Ok(Run::new("decay", config, curves, summary, files))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargeCell {
    pub ell_w: i32,
    pub ell_wp: i32,
    pub expected: i32,
    pub measurement: ChargeMeasurement,
    pub pattern: Image,
}

impl ChargeCell {
    pub fn passes(&self) -> bool {
        self.measurement.ell_tilted == self.expected && self.measurement.ell_oracle == self.expected
    }

    pub fn pattern_file(&self) -> String {
        format!("pattern_w{:+}_wp{:+}.pgm", self.ell_w, self.ell_wp)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargeTable {
    pub cells: Vec<ChargeCell>,
}

impl ChargeTable {
    pub fn pass_count(&self) -> usize {
        self.cells.iter().filter(|c| c.passes()).count()
    }
}

/// One CPO store/read per `(ℓ_W, ℓ_W′)` pair, D measured both ways.
pub fn cmd_charge_table(config: &Config, range_w: &[i32], range_wp: &[i32]) -> Result<Run<ChargeTable>> {
    let session = Session::new(config)?;
    let t_s = config.memory.storage_time_us;
    let pairs: Vec<(i32, i32)> = range_w.iter().flat_map(|&a| range_wp.iter().map(move |&b| (a, b))).collect();
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("empty charge range".into()));
    }
    let cells = pairs
        .par_iter()
        .map(|&(ell_w, ell_wp)| {
            let d = session.store_and_read(MemoryKind::Cpo, ell_w, ell_wp, t_s)?;
            let pattern = session.diagnostic.pattern(&d)?;
            let measurement = measure_from_pattern(&d, &pattern)?;
            Ok(ChargeCell { ell_w, ell_wp, expected: ell_wp - ell_w, measurement, pattern })
        })
        .collect::<Result<Vec<_>>>()?;
    let table = ChargeTable { cells };
    let header = [
        "ell_W", "ell_Wp", "ell_expected", "ell_tilted", "ell_oracle", "fringe_count", "orientation_sign", "purity", "pass",
    ];
    let rows = table.cells.iter().map(|c| {
        let m = &c.measurement;
        vec![
            c.ell_w.to_string(),
            c.ell_wp.to_string(),
            c.expected.to_string(),
            m.ell_tilted.to_string(),
            m.ell_oracle.to_string(),
            m.fringe_count.to_string(),
            m.orientation_sign.to_string(),
            num(m.purity),
            c.passes().to_string(),
        ]
    });
    let mut files = vec![("charge_table.csv".to_string(), csv_bytes(&header, rows)?)];
    for c in &table.cells {
        files.push((c.pattern_file(), encode_pgm(&c.pattern)));
    }
    let summary = json!({"cells": table.cells.len(), "pass_count": table.pass_count(), "storage_time_us": t_s});
    Ok(Run::new("table", config, table, summary, files))
}

/// Adds zero-mean Gaussian noise of `sigma_rel · max` to every pixel, clipping
/// at zero like a camera would.
pub fn add_pattern_noise(image: &Image, sigma_rel: f64, seed: u64) -> Result<Image> {
    if !(sigma_rel >= 0.0 && sigma_rel.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise level {sigma_rel} must be non-negative")));
    }
    if sigma_rel == 0.0 {
        return Ok(image.clone());
    }
    let noise = Normal::new(0.0, sigma_rel * image.max()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = image.pixels().iter().map(|&p| (p + noise.sample(&mut rng)).max(0.0)).collect();
    Image::new(image.n(), pixels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TiltData {
    pub measurement: ChargeMeasurement,
    pub pattern: Image,
}

/// Tilted-lens measurement of a stored field, optionally with pattern noise.
pub fn cmd_tilt(config: &Config, field: &ComplexField, noise: f64, seed: u64) -> Result<Run<TiltData>> {
    let diag = config.diagnostic()?;
    let pattern = add_pattern_noise(&diag.pattern(field)?, noise, seed)?;
    let measurement = measure_from_pattern(field, &pattern)?;
    let m = &measurement;
    let row = vec![
        m.fringe_count.to_string(),
        m.orientation_sign.to_string(),
        m.ell_tilted.to_string(),
        m.ell_oracle.to_string(),
        num(m.purity),
    ];
    let header = ["fringe_count", "orientation_sign", "ell_tilted", "ell_oracle", "purity"];
    let files = vec![
        ("tilt.csv".to_string(), csv_bytes(&header, [row])?),
        ("tilt_pattern.pgm".to_string(), encode_pgm(&pattern)),
    ];
    let summary = json!({"measurement": measurement, "noise": noise, "seed": seed});
    Ok(Run::new("tilt", config, TiltData { measurement, pattern }, summary, files))
}

/// LG beam on the configured grid, saved as an OAM1 file.
pub fn cmd_lg(config: &Config, ell: i32, tilt_kx: f64, direction: Direction, file_name: &str) -> Result<Run<ComplexField>> {
    config.validate()?;
    let grid = config.grid_spec()?;
    let spec = BeamSpec::new(ell, config.beam.waist_mm * 1e-3).with_tilt(tilt_kx).with_direction(direction);
    let field = lg_mode_bounded(&grid, &spec, config.beam.ell_max)?;
    let files = vec![(file_name.to_string(), encode_field(&field)?)];
    let summary = json!({"ell": ell, "power": crate::field::total_power(&field), "file": file_name});
    Ok(Run::new("lg", config, field, summary, files))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoreData {
    pub diffracted: ComplexField,
    pub efficiency: f64,
    pub measurement: ChargeMeasurement,
}

/// Single write/store/read; saves D and its measured charge.
pub fn cmd_store(config: &Config, kind: MemoryKind, ell_w: i32, ell_wp: i32, t_s: f64) -> Result<Run<StoreData>> {
    let session = Session::new(config)?;
    let d = session.store_and_read(kind, ell_w, ell_wp, t_s)?;
    let efficiency = retrieval_efficiency(d.peak_intensity(), config.beam.intensity_wp)?;
    let pattern = session.diagnostic.pattern(&d)?;
    let measurement = measure_from_pattern(&d, &pattern)?;
    let header = ["memory", "ell_W", "ell_Wp", "t_s_us", "efficiency", "ell_tilted", "ell_oracle", "purity"];
    let row = vec![
        kind.label().to_string(),
        ell_w.to_string(),
        ell_wp.to_string(),
        num(t_s),
        num(efficiency),
        measurement.ell_tilted.to_string(),
        measurement.ell_oracle.to_string(),
        num(measurement.purity),
    ];
    let files = vec![
        ("store.csv".to_string(), csv_bytes(&header, [row])?),
        ("diffracted.oam1".to_string(), encode_field(&d)?),
        ("diffracted_pattern.pgm".to_string(), encode_pgm(&pattern)),
    ];
    let summary = json!({"memory": kind.label(), "efficiency": efficiency, "measurement": measurement});
    Ok(Run::new("store", config, StoreData { diffracted: d, efficiency, measurement }, summary, files))
}
