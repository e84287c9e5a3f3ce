//! 16-bit binary PGM (`P5`, maxval 65535) images of field intensity and phase.
//!
//! The first image row is the largest `y`, so the picture has `y` pointing up.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use lgbeam::ComplexField;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    Intensity,
    Phase,
}

/// Pixel values in image order (top row first).
pub fn pixels(field: &ComplexField, what: Quantity) -> Vec<u16> {
    let n = field.grid().n();
    let values: Vec<u16> = match what {
        Quantity::Intensity => {
            let peak = field.samples().iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
            field
                .samples()
                .iter()
                .map(|c| if peak > 0.0 { (c.norm_sqr() / peak * 65535.0).round() as u16 } else { 0 })
                .collect()
        }
        Quantity::Phase => field
            .samples()
            .iter()
            .map(|c| {
                // (-π, π]
                let mut a = c.arg();
                if a <= -PI {
                    a = PI;
                }
                ((a + PI) / (2.0 * PI) * 65535.0).round() as u16
            })
            .collect(),
    };
    values.chunks_exact(n).rev().flatten().copied().collect()
}

pub fn encode_pgm(width: usize, height: usize, pixels: &[u16]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    for p in pixels {
        out.extend_from_slice(&p.to_be_bytes());
    }
    out
}

/// Parses a `P5` image with maxval 65535 into `(width, height, pixels)`.
pub fn decode_pgm(data: &[u8]) -> Option<(usize, usize, Vec<u16>)> {
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < data.len() && data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        fields.push(std::str::from_utf8(data.get(start..pos)?).ok()?.to_string());
    }
    pos += 1;
    if fields[0] != "P5" || fields[3] != "65535" {
        return None;
    }
    let (w, h): (usize, usize) = (fields[1].parse().ok()?, fields[2].parse().ok()?);
    let body = data.get(pos..)?;
    if body.len() != 2 * w * h {
        return None;
    }
    Some((w, h, body.chunks_exact(2).map(|b| u16::from_be_bytes([b[0], b[1]])).collect()))
}

pub fn write_pgm(path: &Path, field: &ComplexField, what: Quantity) -> CliResult<()> {
    let n = field.grid().n();
    fs::write(path, encode_pgm(n, n, &pixels(field, what))).map_err(|e| CliError::io(path, e))
}
