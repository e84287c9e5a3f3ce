//! `LGF1` binary field files.
//!
//! All integers and floats little-endian:
//!
//! | offset | size | content                                   |
//! |--------|------|-------------------------------------------|
//! | 0      | 4    | magic `LGF1`                              |
//! | 4      | 4    | format version, `u32` = 1                 |
//! | 8      | 8    | `n`, `u64`                                |
//! | 16     | 32   | `extent`, `z`, `k`, `b` as `f64`          |
//! | 48     | 4    | layout tag length `t`, `u32`              |
//! | 52     | t    | layout tag, ASCII `row-major y,x`         |
//! | 52+t   | 16n² | samples, `(re, im)` `f64` pairs           |
//!
//! A sidecar `<file>.manifest` repeats the header as `key: value` lines.

use std::fs;
use std::path::{Path, PathBuf};

use lgbeam::{BeamParams, Complex64, ComplexField, Grid};

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 4] = b"LGF1";
pub const VERSION: u32 = 1;
pub const LAYOUT: &str = "row-major y,x";

pub fn encode(field: &ComplexField) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(52 + LAYOUT.len() + 16 * grid.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.n() as u64).to_le_bytes());
    for v in [grid.extent(), field.z(), field.params().k(), field.params().b()] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&(LAYOUT.len() as u32).to_le_bytes());
    out.extend_from_slice(LAYOUT.as_bytes());
    for c in field.samples() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], String> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| format!("truncated at byte {}", self.pos))?;
        let bytes = &self.data[self.pos..end];
        self.pos = end;
        Ok(bytes)
    }

    fn u32(&mut self) -> Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, String> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode(data: &[u8]) -> Result<ComplexField, String> {
    let mut r = Reader { data, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err("missing LGF1 magic".into());
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let n = usize::try_from(r.u64()?).map_err(|_| "grid size overflows".to_string())?;
    let (extent, z, k, b) = (r.f64()?, r.f64()?, r.f64()?, r.f64()?);
    let tag_len = r.u32()? as usize;
    let tag = r.take(tag_len)?;
    if tag != LAYOUT.as_bytes() {
        return Err(format!("unknown layout tag {:?}", String::from_utf8_lossy(tag)));
    }
    let grid = Grid::new(n, extent).map_err(|e| e.to_string())?;
    let params = BeamParams::new(k, b).map_err(|e| e.to_string())?;
    let count = n.checked_mul(n).ok_or("grid size overflows")?;
    let expected = count.checked_mul(16).ok_or("grid size overflows")?;
    if data.len() - r.pos != expected {
        return Err(format!("expected {expected} sample bytes, found {}", data.len() - r.pos));
    }
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        samples.push(Complex64::new(r.f64()?, r.f64()?));
    }
    ComplexField::new(grid, z, params, samples).map_err(|e| e.to_string())
}

pub fn manifest_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

pub fn manifest(field: &ComplexField) -> String {
    let g = field.grid();
    format!(
        "format: LGF1\nversion: {VERSION}\nn: {}\nextent: {:?}\nz: {:?}\nk: {:?}\nb: {:?}\nlayout: {LAYOUT}\n",
        g.n(),
        g.extent(),
        field.z(),
        field.params().k(),
        field.params().b()
    )
}

/// Parses `key: value` lines.
pub fn parse_manifest(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|line| line.split_once(':'))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

/// Writes the binary file and its manifest.
pub fn write_field(path: &Path, field: &ComplexField) -> CliResult<()> {
    fs::write(path, encode(field)).map_err(|e| CliError::io(path, e))?;
    let side = manifest_path(path);
    fs::write(&side, manifest(field)).map_err(|e| CliError::io(&side, e))
}

pub fn read_field(path: &Path) -> CliResult<ComplexField> {
    let data = fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode(&data).map_err(|reason| CliError::Format {
        path: path.display().to_string(),
        reason,
    })
}
