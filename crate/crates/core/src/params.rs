use std::fmt;

use crate::error::{LgError, Result};

/// Wavenumber `k` and Rayleigh range `b` shared by a family of modes.
///
/// The waist follows from `w0² = 2b/k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams {
    k: f64,
    b: f64,
}

impl BeamParams {
    pub fn new(k: f64, b: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(LgError::InvalidParameter(format!("wavenumber k must be finite and > 0, got {k}")));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(LgError::InvalidParameter(format!("Rayleigh range b must be finite and > 0, got {b}")));
        }
        let w0 = (2.0 * b / k).sqrt();
        if !(w0.is_finite() && w0 > 0.0) {
            return Err(LgError::InvalidParameter(format!("waist sqrt(2b/k) is degenerate for k={k}, b={b}")));
        }
        Ok(Self { k, b })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Beam radius at the waist plane.
    pub fn waist(&self) -> f64 {
        (2.0 * self.b / self.k).sqrt()
    }

    /// Beam radius `w(z) = sqrt(2(z² + b²)/(k b))`.
    pub fn radius_at(&self, z: f64) -> f64 {
        (2.0 * (z * z + self.b * self.b) / (self.k * self.b)).sqrt()
    }
}

impl Default for BeamParams {
    /// `k = 2`, `b = 1`, so that `w0 = 1`.
    fn default() -> Self {
        Self { k: 2.0, b: 1.0 }
    }
}

/// Azimuthal index `l` and radial index `p` of a Laguerre-Gauss mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    l: i32,
    p: u32,
}

impl ModeIndex {
    pub fn new(l: i32, p: i32) -> Result<Self> {
        let p = u32::try_from(p)
            .map_err(|_| LgError::InvalidParameter(format!("radial index p must be >= 0, got {p}")))?;
        Ok(Self { l, p })
    }

    /// Infallible constructor for indices known to be valid.
    pub const fn from_parts(l: i32, p: u32) -> Self {
        Self { l, p }
    }

    pub fn l(&self) -> i32 {
        self.l
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn abs_l(&self) -> u32 {
        self.l.unsigned_abs()
    }

    /// Mode order `N = 2p + |l|`.
    pub fn order(&self) -> u32 {
        2 * self.p + self.abs_l()
    }

    /// All indices with `|l| <= lmax` and `p <= pmax`, ordered by `l` then `p`.
    pub fn window(lmax: u32, pmax: u32) -> Vec<ModeIndex> {
        let lmax = lmax as i32;
        (-lmax..=lmax)
            .flat_map(|l| (0..=pmax).map(move |p| ModeIndex { l, p }))
            .collect()
    }

    /// All indices with `2p + |l| <= max_order`.
    pub fn up_to_order(max_order: u32) -> Vec<ModeIndex> {
        let lmax = max_order as i32;
        (-lmax..=lmax)
            .flat_map(|l| {
                let pmax = (max_order - l.unsigned_abs()) / 2;
                (0..=pmax).map(move |p| ModeIndex { l, p })
            })
            .collect()
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(l={}, p={})", self.l, self.p)
    }
}
