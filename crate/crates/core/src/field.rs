use num_complex::Complex64;

use crate::error::{LgError, Result};
use crate::grid::Grid;
use crate::params::BeamParams;

/// Relative tolerance when deciding whether two fields live on the same plane.
const PLANE_TOLERANCE: f64 = 1e-9;

/// Complex transverse field `u(x, y)` sampled on a [`Grid`] at plane `z`.
///
/// Samples are row-major over `(y, x)`: index `iy * n + ix`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    z: f64,
    params: BeamParams,
    samples: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, z: f64, params: BeamParams, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(LgError::Mismatch(format!(
                "expected {} samples for a {}x{} grid, got {}",
                grid.len(),
                grid.n(),
                grid.n(),
                samples.len()
            )));
        }
        if !z.is_finite() {
            return Err(LgError::InvalidParameter(format!("plane z must be finite, got {z}")));
        }
        if samples.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(LgError::NonFinite);
        }
        Ok(Self { grid, z, params, samples })
    }

    pub fn zeros(grid: Grid, z: f64, params: BeamParams) -> Self {
        Self {
            grid,
            z,
            params,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Builds a field from a function of the sample coordinates `(x, y)`.
    pub fn from_fn(
        grid: Grid,
        z: f64,
        params: BeamParams,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let xs = grid.coords();
        let samples = xs
            .iter()
            .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(grid, z, params, samples)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn params(&self) -> &BeamParams {
        &self.params
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Sample at column `ix`, row `iy`.
    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.samples[iy * self.grid.n() + ix]
    }

    /// Same grid and parameters, new samples and plane. Samples are checked
    /// for finiteness.
    pub fn with_samples(&self, z: f64, samples: Vec<Complex64>) -> Result<Self> {
        Self::new(self.grid, z, self.params, samples)
    }

    pub(crate) fn with_samples_unchecked(&self, z: f64, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), self.grid.len());
        Self {
            grid: self.grid,
            z,
            params: self.params,
            samples,
        }
    }

    pub fn with_params(mut self, params: BeamParams) -> Self {
        self.params = params;
        self
    }

    /// `||f||² = Σ |f_i|² · spacing²`.
    pub fn norm_sqr(&self) -> f64 {
        let ds = self.grid.spacing();
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() * ds * ds
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let samples = self.samples.iter().map(|s| s * c).collect();
        self.with_samples_unchecked(self.z, samples)
    }

    /// Unit-norm copy of the field.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(LgError::ZeroNorm);
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn add(&self, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: Complex64, other: &ComplexField) -> Result<Self> {
        self.zip_with(other, |a, b| a + c * b)
    }

    fn zip_with(&self, other: &ComplexField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        check_compatible(self, other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(self.with_samples_unchecked(self.z, samples))
    }

    /// Largest intensity on the outermost ring of samples divided by the peak
    /// intensity. Zero for an all-zero field.
    pub fn edge_intensity_ratio(&self) -> f64 {
        let (edge, peak) = self.edge_and_peak_intensity();
        if peak == 0.0 {
            return 0.0;
        }
        edge / peak
    }

    /// Largest intensity on the outermost ring of samples, and the largest
    /// intensity anywhere.
    pub fn edge_and_peak_intensity(&self) -> (f64, f64) {
        let n = self.grid.n();
        let peak = self.samples.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
        let mut edge = 0.0_f64;
        for i in 0..n {
            for (ix, iy) in [(i, 0), (i, n - 1), (0, i), (n - 1, i)] {
                edge = edge.max(self.at(ix, iy).norm_sqr());
            }
        }
        (edge, peak)
    }
}

fn check_compatible(f: &ComplexField, g: &ComplexField) -> Result<()> {
    if !f.grid.same_as(&g.grid) {
        return Err(LgError::Mismatch(format!(
            "grids differ: n={} extent={} vs n={} extent={}",
            f.grid.n(),
            f.grid.extent(),
            g.grid.n(),
            g.grid.extent()
        )));
    }
    let scale = 1.0_f64.max(f.z.abs()).max(g.z.abs());
    if (f.z - g.z).abs() > PLANE_TOLERANCE * scale {
        return Err(LgError::Mismatch(format!("planes differ: z={} vs z={}", f.z, g.z)));
    }
    Ok(())
}

/// `⟨f, g⟩ = Σ conj(f_i)·g_i · spacing²`, conjugate-linear in `f`.
pub fn inner_product(f: &ComplexField, g: &ComplexField) -> Result<Complex64> {
    check_compatible(f, g)?;
    let ds = f.grid.spacing();
    let sum: Complex64 = f
        .samples
        .iter()
        .zip(&g.samples)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(sum * ds * ds)
}

/// `|⟨f, g⟩| / (||f||·||g||)`, clamped to `[0, 1]`.
pub fn fidelity(f: &ComplexField, g: &ComplexField) -> Result<f64> {
    let overlap = inner_product(f, g)?;
    let nf = f.norm();
    let ng = g.norm();
    if nf == 0.0 || ng == 0.0 {
        return Err(LgError::ZeroNorm);
    }
    Ok((overlap.norm() / (nf * ng)).min(1.0))
}
