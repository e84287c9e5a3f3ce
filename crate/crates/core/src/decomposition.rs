use std::collections::{BTreeMap, HashSet};

use num_complex::Complex64;

use crate::analytic::eval_lg_mode;
use crate::error::{LgError, Result};
use crate::field::{inner_product, ComplexField};
use crate::grid::Grid;
use crate::params::{BeamParams, ModeIndex};

/// Laguerre-Gauss expansion coefficients of a field at one plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalSpectrum {
    entries: Vec<(ModeIndex, Complex64)>,
    z: f64,
    params: BeamParams,
}

impl ModalSpectrum {
    pub fn new(entries: Vec<(ModeIndex, Complex64)>, z: f64, params: BeamParams) -> Result<Self> {
        let mut seen = HashSet::new();
        for (idx, c) in &entries {
            if !seen.insert(*idx) {
                return Err(LgError::InvalidParameter(format!("duplicate mode {idx} in spectrum")));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(LgError::NonFinite);
            }
        }
        if !z.is_finite() {
            return Err(LgError::InvalidParameter(format!("plane z must be finite, got {z}")));
        }
        Ok(Self { entries, z, params })
    }

    pub fn entries(&self) -> &[(ModeIndex, Complex64)] {
        &self.entries
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn params(&self) -> &BeamParams {
        &self.params
    }

    pub fn coefficient(&self, idx: ModeIndex) -> Option<Complex64> {
        self.entries.iter().find(|(i, _)| *i == idx).map(|(_, c)| *c)
    }

    /// `Σ |c|²`.
    pub fn power(&self) -> f64 {
        self.entries.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Output of [`decompose`].
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub spectrum: ModalSpectrum,
    /// `||f||²` of the decomposed field.
    pub field_power: f64,
    /// Set when the basis parameters differ from the field's own.
    pub basis_mismatch: bool,
}

impl Decomposition {
    pub fn captured_power(&self) -> f64 {
        self.spectrum.power()
    }

    /// `||f||² - Σ|c|²`; non-negative up to quadrature error.
    pub fn residual_power(&self) -> f64 {
        self.field_power - self.captured_power()
    }
}

/// Projects `f` onto `u_{l,p}` for `|l| <= lmax`, `p <= pmax`, using the
/// field's own beam parameters at its plane.
pub fn decompose(f: &ComplexField, lmax: u32, pmax: u32) -> Result<Decomposition> {
    decompose_with_basis(f, f.params(), lmax, pmax)
}

/// Same as [`decompose`] with an explicit basis; a basis that differs from the
/// field's parameters is flagged in the result.
pub fn decompose_with_basis(f: &ComplexField, basis: &BeamParams, lmax: u32, pmax: u32) -> Result<Decomposition> {
    let entries = ModeIndex::window(lmax, pmax)
        .into_iter()
        .map(|idx| {
            let mode = eval_lg_mode(idx, basis, f.grid(), f.z())?;
            Ok((idx, inner_product(&mode, f)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Decomposition {
        spectrum: ModalSpectrum::new(entries, f.z(), *basis)?,
        field_power: f.norm_sqr(),
        basis_mismatch: basis != f.params(),
    })
}

/// `Σ c_{l,p}·u_{l,p}` on `grid` at the spectrum's plane.
pub fn reconstruct(s: &ModalSpectrum, grid: &Grid) -> Result<ComplexField> {
    let mut field = ComplexField::zeros(*grid, s.z, s.params);
    for (idx, c) in &s.entries {
        let mode = eval_lg_mode(*idx, &s.params, grid, s.z)?;
        field = field.axpy(*c, &mode)?;
    }
    Ok(field)
}

/// Power per azimuthal index and its weighted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct OamSpectrum {
    pub power: BTreeMap<i32, f64>,
    /// `Σ l·P(l) / Σ P(l)`; `None` when the spectrum carries no power.
    pub mean: Option<f64>,
}

pub fn oam_spectrum(s: &ModalSpectrum) -> OamSpectrum {
    let mut power = BTreeMap::new();
    for (idx, c) in &s.entries {
        *power.entry(idx.l()).or_insert(0.0) += c.norm_sqr();
    }
    let total: f64 = power.values().sum();
    let mean = (total > 0.0).then(|| power.iter().map(|(&l, &p)| l as f64 * p).sum::<f64>() / total);
    OamSpectrum { power, mean }
}
