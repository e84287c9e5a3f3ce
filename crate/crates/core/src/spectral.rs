//! FFT-based differentiation on the periodic extension of a [`Grid`].
//!
//! Derivatives multiply by `iκ` per axis with the Nyquist bin of even grids
//! zeroed, which keeps `∂x` and `∂y` exactly anti-Hermitian under the
//! Riemann-sum inner product. Plans are cached per transform length.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::ComplexField;
use crate::grid::Grid;

struct Plan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plan(n: usize) -> Arc<Plan> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<Plan>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().unwrap().get(&n) {
        return p.clone();
    }
    let mut planner = FftPlanner::new();
    let p = Arc::new(Plan {
        forward: planner.plan_fft_forward(n),
        inverse: planner.plan_fft_inverse(n),
    });
    cache.write().unwrap().entry(n).or_insert(p).clone()
}

fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for (iy, row) in data.chunks_exact(n).enumerate() {
        for (ix, v) in row.iter().enumerate() {
            out[ix * n + iy] = *v;
        }
    }
    out
}

/// Wavenumbers for first derivatives: Nyquist bin set to zero.
fn derivative_wavenumbers(grid: &Grid) -> Vec<f64> {
    let mut k = grid.wavenumbers();
    if grid.n().is_multiple_of(2) {
        k[grid.n() / 2] = 0.0;
    }
    k
}

/// Applies a per-row spectral multiplier along the contiguous axis.
fn filter_rows(data: &mut [Complex64], n: usize, multiplier: &[Complex64]) {
    let p = plan(n);
    p.forward.process(data);
    let scale = 1.0 / n as f64;
    for row in data.chunks_exact_mut(n) {
        for (v, m) in row.iter_mut().zip(multiplier) {
            *v *= m * scale;
        }
    }
    p.inverse.process(data);
}

fn derivative_along_rows(data: &[Complex64], grid: &Grid) -> Vec<Complex64> {
    let multiplier: Vec<Complex64> = derivative_wavenumbers(grid)
        .into_iter()
        .map(|k| Complex64::new(0.0, k))
        .collect();
    let mut out = data.to_vec();
    filter_rows(&mut out, grid.n(), &multiplier);
    out
}

/// `∂u/∂x` samples.
pub fn d_dx(f: &ComplexField) -> Vec<Complex64> {
    derivative_along_rows(f.samples(), f.grid())
}

/// `∂u/∂y` samples.
pub fn d_dy(f: &ComplexField) -> Vec<Complex64> {
    let n = f.grid().n();
    let t = transpose(f.samples(), n);
    transpose(&derivative_along_rows(&t, f.grid()), n)
}

/// Forward 2D DFT (unnormalized), FFT ordering on both axes.
pub fn fft2(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let p = plan(n);
    let mut buf = data.to_vec();
    p.forward.process(&mut buf);
    let mut t = transpose(&buf, n);
    p.forward.process(&mut t);
    transpose(&t, n)
}

/// Inverse of [`fft2`], including the `1/n²` factor.
pub fn ifft2(spectrum: &[Complex64], n: usize) -> Vec<Complex64> {
    let p = plan(n);
    let mut buf = spectrum.to_vec();
    p.inverse.process(&mut buf);
    let mut t = transpose(&buf, n);
    p.inverse.process(&mut t);
    let scale = 1.0 / (n * n) as f64;
    let mut out = transpose(&t, n);
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

/// Multiplies the 2D spectrum by `multiplier(κx, κy)`.
pub fn apply_multiplier(
    data: &[Complex64],
    grid: &Grid,
    multiplier: impl Fn(f64, f64) -> Complex64,
) -> Vec<Complex64> {
    let n = grid.n();
    let k = grid.wavenumbers();
    let mut spec = fft2(data, n);
    for (iy, row) in spec.chunks_exact_mut(n).enumerate() {
        for (ix, v) in row.iter_mut().enumerate() {
            *v *= multiplier(k[ix], k[iy]);
        }
    }
    ifft2(&spec, n)
}

/// Transverse Laplacian `∂²u/∂x² + ∂²u/∂y²` samples.
pub fn laplacian(f: &ComplexField) -> Vec<Complex64> {
    apply_multiplier(f.samples(), f.grid(), |kx, ky| Complex64::new(-(kx * kx + ky * ky), 0.0))
}

/// Trigonometric interpolant of the samples evaluated at `(x, y)`.
///
/// Uses the symmetric convention for the Nyquist bin of even grids, so a real
/// field interpolates to a real value.
pub fn interpolate(f: &ComplexField, x: f64, y: f64) -> Complex64 {
    let grid = f.grid();
    let n = grid.n();
    let spec = fft2(f.samples(), n);
    let k = grid.wavenumbers();
    let x0 = grid.coord(0);
    let phase = |kk: f64, d: f64| Complex64::from_polar(1.0, kk * d);
    // Nyquist bin split evenly between ±κ: cos(κ d) instead of e^{-iκd}.
    let axis = |d: f64| -> Vec<Complex64> {
        (0..n)
            .map(|j| {
                if n.is_multiple_of(2) && j == n / 2 {
                    Complex64::new((k[j] * d).cos(), 0.0)
                } else {
                    phase(k[j], d)
                }
            })
            .collect()
    };
    let ex = axis(x - x0);
    let ey = axis(y - x0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (iy, row) in spec.chunks_exact(n).enumerate() {
        let row_sum: Complex64 = row.iter().zip(&ex).map(|(s, e)| s * e).sum();
        acc += row_sum * ey[iy];
    }
    acc / (n * n) as f64
}
