use crate::error::{LgError, Result};
use crate::params::BeamParams;

/// Default samples per axis for desk-scale runs.
pub const DEFAULT_SAMPLES: usize = 512;

/// Default half-width of the window in units of the beam radius.
pub const DEFAULT_EXTENT_RADII: f64 = 8.0;

/// Uniform, cell-centered square sampling window `[-extent, extent]²`.
///
/// Sample `i` sits at `-extent + (i + 1/2)·spacing`, so even `n` never samples
/// the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    extent: f64,
}

impl Grid {
    pub fn new(n: usize, extent: f64) -> Result<Self> {
        if n < 2 {
            return Err(LgError::InvalidParameter(format!("grid needs at least 2 samples per axis, got {n}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(LgError::InvalidParameter(format!("grid extent must be finite and > 0, got {extent}")));
        }
        Ok(Self { n, extent })
    }

    /// `n = 512`, half-width `8·w(z_max)`.
    pub fn default_for(params: &BeamParams, z_max: f64) -> Self {
        Self {
            n: DEFAULT_SAMPLES,
            extent: DEFAULT_EXTENT_RADII * params.radius_at(z_max),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of sample `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.extent + (i as f64 + 0.5) * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    /// Angular wavenumbers in FFT order; the Nyquist bin of an even grid is
    /// reported as `-π/spacing`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n as i64;
        let scale = 2.0 * std::f64::consts::PI / (self.n as f64 * self.spacing());
        (0..n)
            .map(|j| {
                let signed = if j < (n + 1) / 2 { j } else { j - n };
                signed as f64 * scale
            })
            .collect()
    }

    /// Grid enlarged by `pad` cells on every side, keeping the spacing and
    /// sample positions of the original.
    pub fn padded(&self, pad: usize) -> Self {
        Self {
            n: self.n + 2 * pad,
            extent: self.extent + pad as f64 * self.spacing(),
        }
    }

    /// Whether both grids describe the same samples.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.extent == other.extent
    }
}
