//! File formats: OAM1 binary fields and 16-bit PGM intensity images.
//!
//! OAM1 layout (little-endian): magic `OAM1`, `u32 n`, `f64 dx`, `f64
//! wavelength`, `i8 direction`, then `n²` interleaved `(re, im)` f64 pairs,
//! row-major.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField, Direction};
use crate::grid::GridSpec;
use crate::optics::Image;

pub const OAM1_MAGIC: &[u8; 4] = b"OAM1";
const HEADER_LEN: usize = 4 + 4 + 8 + 8 + 1;

/// Serializes a field; an analytic carrier is written into the samples first.
pub fn encode_field(field: &ComplexField) -> Result<Vec<u8>> {
    let field = field.bake_carrier()?;
    let grid = field.grid();
    let n = grid.n();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * n * n);
    out.extend_from_slice(OAM1_MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&grid.dx().to_le_bytes());
    out.extend_from_slice(&grid.wavelength().to_le_bytes());
    out.push(field.direction().sign() as u8);
    for v in field.samples() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    Ok(out)
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

pub fn decode_field(bytes: &[u8]) -> Result<ComplexField> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != OAM1_MAGIC {
        return Err(Error::Format("bad magic, expected OAM1".into()));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().expect("4-byte slice")) as usize;
    let dx = f64_at(bytes, 8);
    let wavelength = f64_at(bytes, 16);
    let direction = Direction::from_sign(bytes[24] as i8)
        .ok_or_else(|| Error::Format(format!("direction byte {} is not ±1", bytes[24] as i8)))?;
    let expected = n
        .checked_mul(n)
        .and_then(|nn| nn.checked_mul(16))
        .and_then(|b| b.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Format(format!("n = {n} overflows")))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!("expected {expected} bytes for n = {n}, found {}", bytes.len())));
    }
    let grid = GridSpec::new(n, dx * n as f64, wavelength).map_err(|e| Error::Format(e.to_string()))?;
    let samples = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| Complex64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    ComplexField::new(grid, samples, direction).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_field(path: &Path, field: &ComplexField) -> Result<()> {
    fs::write(path, encode_field(field)?)?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<ComplexField> {
    decode_field(&fs::read(path)?)
}

/// Binary 16-bit PGM (P5), big-endian samples, scaled so the maximum is 65535.
pub fn encode_pgm(image: &Image) -> Vec<u8> {
    let n = image.n();
    let max = image.max();
    let scale = if max > 0.0 { 65535.0 / max } else { 0.0 };
    let mut out = format!("P5\n{n} {n}\n65535\n").into_bytes();
    out.reserve(2 * n * n);
    // PGM rows run top to bottom; image rows run along +y
    for r in (0..n).rev() {
        for c in 0..n {
            let v = (image.get(r, c).max(0.0) * scale).round().min(65535.0) as u16;
            out.extend_from_slice(&v.to_be_bytes());
        }
    }
    out
}

pub fn write_pgm(path: &Path, image: &Image) -> Result<()> {
    fs::write(path, encode_pgm(image))?;
    Ok(())
}
