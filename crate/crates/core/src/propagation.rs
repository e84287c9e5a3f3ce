//! Paraxial free-space propagation by exact spectral multiplication, and a
//! residual check of the paraxial equation `∇²u + 2ik ∂u/∂z = 0`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::analytic::{eval_lg_envelope, eval_lg_mode};
use crate::error::{LgError, Result};
use crate::field::{inner_product, ComplexField};
use crate::grid::Grid;
use crate::params::{BeamParams, ModeIndex};
use crate::spectral;

/// Edge intensity, relative to peak, above which propagation refuses to run.
pub const EDGE_GUARD: f64 = 1e-6;

/// How a propagation step is carried out.
///
/// The transform runs on the field zero-padded to `padding_factor` times its
/// width and is cropped back afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropagationPlan {
    padding_factor: usize,
}

impl PropagationPlan {
    pub fn new(padding_factor: usize) -> Result<Self> {
        if padding_factor == 0 {
            return Err(LgError::InvalidParameter("padding factor must be >= 1".into()));
        }
        Ok(Self { padding_factor })
    }

    /// Padding 2 when the step exceeds the Rayleigh range, otherwise none.
    pub fn for_step(params: &BeamParams, dz: f64) -> Self {
        Self {
            padding_factor: if dz.abs() > params.b() { 2 } else { 1 },
        }
    }

    pub fn padding_factor(&self) -> usize {
        self.padding_factor
    }
}

impl Default for PropagationPlan {
    fn default() -> Self {
        Self { padding_factor: 1 }
    }
}

/// Unit-modulus transfer function `exp(-i(κx² + κy²)·dz/(2k))`.
pub fn transfer_function(kx: f64, ky: f64, k: f64, dz: f64) -> Complex64 {
    Complex64::from_polar(1.0, -(kx * kx + ky * ky) * dz / (2.0 * k))
}

fn edge_guard(f: &ComplexField, reference_peak: f64) -> Result<()> {
    let (edge, peak) = f.edge_and_peak_intensity();
    let peak = peak.max(reference_peak);
    if peak == 0.0 {
        return Ok(());
    }
    guard(edge / peak)
}

fn guard(ratio: f64) -> Result<()> {
    if ratio > EDGE_GUARD {
        return Err(LgError::AliasingGuard {
            edge_ratio: ratio,
            limit: EDGE_GUARD,
        });
    }
    Ok(())
}

/// Propagates `f` from its plane `z` to `z + dz`.
///
/// Fails with [`LgError::AliasingGuard`] when the input or output field has
/// more than [`EDGE_GUARD`] of its peak intensity on the window edge, or when
/// that fraction of the energy leaves the padded window's central crop.
pub fn propagate(f: &ComplexField, dz: f64, plan: &PropagationPlan) -> Result<ComplexField> {
    propagate_against(f, dz, plan, 0.0)
}

/// As [`propagate`], with edge intensities measured against at least
/// `reference_peak`. Lets a field that is numerically zero, such as a mode
/// after its own annihilation operator, pass the guard.
pub fn propagate_against(f: &ComplexField, dz: f64, plan: &PropagationPlan, reference_peak: f64) -> Result<ComplexField> {
    if !dz.is_finite() {
        return Err(LgError::InvalidParameter(format!("step dz must be finite, got {dz}")));
    }
    edge_guard(f, reference_peak)?;
    if dz == 0.0 {
        return Ok(f.clone());
    }

    let grid = *f.grid();
    let n = grid.n();
    let pad = (n * (plan.padding_factor - 1)).div_ceil(2);
    let big = grid.padded(pad);
    let nb = big.n();

    let mut buf = vec![Complex64::new(0.0, 0.0); big.len()];
    for (iy, row) in f.samples().chunks_exact(n).enumerate() {
        let start = (iy + pad) * nb + pad;
        buf[start..start + n].copy_from_slice(row);
    }
    let k = f.params().k();
    let out = spectral::apply_multiplier(&buf, &big, |kx, ky| transfer_function(kx, ky, k, dz));

    let mut cropped = Vec::with_capacity(grid.len());
    for iy in 0..n {
        let start = (iy + pad) * nb + pad;
        cropped.extend_from_slice(&out[start..start + n]);
    }
    if pad > 0 {
        let total: f64 = out.iter().map(|c| c.norm_sqr()).sum();
        let kept: f64 = cropped.iter().map(|c| c.norm_sqr()).sum();
        let reference = total.max(reference_peak * grid.len() as f64);
        if reference > 0.0 {
            guard((total - kept).max(0.0) / reference)?;
        }
    }
    let result = f.with_samples(f.z() + dz, cropped)?;
    edge_guard(&result, reference_peak)?;
    Ok(result)
}

/// `||U(dz2)·U(dz1)·f - U(dz1+dz2)·f|| / ||f||`.
pub fn composition_check(f: &ComplexField, dz1: f64, dz2: f64, plan: &PropagationPlan) -> Result<f64> {
    let norm = f.norm();
    if norm == 0.0 {
        return Err(LgError::ZeroNorm);
    }
    let two_step = propagate(&propagate(f, dz1, plan)?, dz2, plan)?;
    let one_step = propagate(f, dz1 + dz2, plan)?;
    // the planes agree only up to rounding of dz1 + dz2
    let one_step = two_step.with_samples(two_step.z(), one_step.into_samples())?;
    Ok(two_step.sub(&one_step)?.norm() / norm)
}

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Phases measured on a numerically propagated mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GouyReport {
    pub idx: ModeIndex,
    pub z: f64,
    /// `(2p+|l|+1)·atan(z/b)`.
    pub expected: f64,
    /// Phase lag of the propagated field behind the Gouy-free envelope, in
    /// `[0, 2π)`.
    pub measured: f64,
    /// `arg⟨u_analytic(z), u_propagated(z)⟩`; zero when the closed form and
    /// the propagator agree.
    pub shape_phase: f64,
    /// Measured lag minus the lag of the fundamental mode, in `[0, 2π)`;
    /// should equal `(2p+|l|)·atan(z/b)`.
    pub relative_to_fundamental: f64,
}

impl GouyReport {
    /// Measured minus expected phase, wrapped to `(-π, π]`.
    pub fn error(&self) -> f64 {
        wrap_angle(self.measured - self.expected)
    }

    pub fn relative_error(&self, b: f64) -> f64 {
        let expected = self.idx.order() as f64 * (self.z / b).atan();
        wrap_angle(self.relative_to_fundamental - expected)
    }
}

fn propagated_lag(idx: ModeIndex, params: &BeamParams, grid: &Grid, z: f64, plan: &PropagationPlan) -> Result<(f64, f64)> {
    let start = eval_lg_mode(idx, params, grid, 0.0)?;
    let moved = propagate(&start, z, plan)?;
    let envelope = eval_lg_envelope(idx, params, grid, z)?;
    let analytic = eval_lg_mode(idx, params, grid, z)?;
    let lag = (-inner_product(&envelope, &moved)?.arg()).rem_euclid(2.0 * PI);
    let shape = inner_product(&analytic, &moved)?.arg();
    Ok((lag, shape))
}

/// Propagates the analytic mode from the waist to `z` and measures its Gouy
/// phase, on the default grid for that distance.
pub fn gouy_phase_extract(idx: ModeIndex, params: &BeamParams, z: f64) -> Result<GouyReport> {
    let grid = Grid::default_for(params, z);
    gouy_phase_extract_on(idx, params, &grid, z, &PropagationPlan::for_step(params, z))
}

pub fn gouy_phase_extract_on(
    idx: ModeIndex,
    params: &BeamParams,
    grid: &Grid,
    z: f64,
    plan: &PropagationPlan,
) -> Result<GouyReport> {
    let (measured, shape_phase) = propagated_lag(idx, params, grid, z, plan)?;
    let (fundamental, _) = propagated_lag(ModeIndex::from_parts(0, 0), params, grid, z, plan)?;
    Ok(GouyReport {
        idx,
        z,
        expected: (idx.order() + 1) as f64 * (z / params.b()).atan(),
        measured,
        shape_phase,
        relative_to_fundamental: (measured - fundamental).rem_euclid(2.0 * PI),
    })
}

/// Normalized residual `||∇²u + 2ik·(u(z+h) - u(z-h))/(2h)|| / ||∇²u||` of the
/// analytic mode, with the Laplacian taken spectrally.
pub fn paraxial_residual(idx: ModeIndex, params: &BeamParams, grid: &Grid, z: f64, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(LgError::InvalidParameter(format!("finite-difference step h must be > 0, got {h}")));
    }
    let centre = eval_lg_mode(idx, params, grid, z)?;
    let ahead = eval_lg_mode(idx, params, grid, z + h)?;
    let behind = eval_lg_mode(idx, params, grid, z - h)?;
    let lap = spectral::laplacian(&centre);
    let two_ik = Complex64::new(0.0, 2.0 * params.k());
    let ds2 = grid.spacing() * grid.spacing();
    let mut residual = 0.0;
    let mut reference = 0.0;
    for ((l, a), b) in lap.iter().zip(ahead.samples()).zip(behind.samples()) {
        let dz = (a - b) / (2.0 * h);
        residual += (l + two_ik * dz).norm_sqr();
        reference += l.norm_sqr();
    }
    if reference == 0.0 {
        return Err(LgError::ZeroNorm);
    }
    Ok((residual * ds2).sqrt() / (reference * ds2).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fidelity;

    fn params() -> BeamParams {
        BeamParams::default()
    }

    #[test]
    fn transfer_function_is_pure_phase() {
        for (kx, ky, dz) in [(0.0, 0.0, 1.0), (3.0, -7.0, 0.25), (100.0, 50.0, -2.0)] {
            let t = transfer_function(kx, ky, 2.0, dz);
            assert!((t.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let grid = Grid::new(64, 8.0).unwrap();
        let u = eval_lg_mode(ModeIndex::from_parts(1, 1), &params(), &grid, 0.0).unwrap();
        let v = propagate(&u, 0.0, &PropagationPlan::default()).unwrap();
        assert_eq!(u, v);
    }

    #[test]
    fn guard_trips_on_small_window() {
        let grid = Grid::new(64, 2.0).unwrap();
        let u = eval_lg_mode(ModeIndex::from_parts(0, 0), &params(), &grid, 0.0).unwrap();
        let err = propagate(&u, 0.5, &PropagationPlan::default()).unwrap_err();
        assert!(matches!(err, LgError::AliasingGuard { .. }));
    }

    #[test]
    fn guard_trips_when_beam_outgrows_window() {
        // fits at the waist, but w(10b) is ten times larger
        let grid = Grid::new(128, 6.0).unwrap();
        let u = eval_lg_mode(ModeIndex::from_parts(0, 0), &params(), &grid, 0.0).unwrap();
        assert!(propagate(&u, 10.0, &PropagationPlan::new(2).unwrap()).is_err());
        assert!(propagate(&u, 10.0, &PropagationPlan::default()).is_err());
    }

    #[test]
    fn rejects_bad_plan_and_step() {
        assert!(PropagationPlan::new(0).is_err());
        let grid = Grid::new(16, 8.0).unwrap();
        let u = eval_lg_mode(ModeIndex::from_parts(0, 0), &params(), &grid, 0.0).unwrap();
        assert!(propagate(&u, f64::NAN, &PropagationPlan::default()).is_err());
    }

    #[test]
    fn padded_and_unpadded_agree_when_beam_stays_inside() {
        let grid = Grid::new(128, 12.0).unwrap();
        let u = eval_lg_mode(ModeIndex::from_parts(2, 0), &params(), &grid, 0.0).unwrap();
        let a = propagate(&u, 1.0, &PropagationPlan::default()).unwrap();
        let b = propagate(&u, 1.0, &PropagationPlan::new(3).unwrap()).unwrap();
        assert!(a.sub(&b).unwrap().norm() < 1e-10);
        let odd = Grid::new(127, 12.0).unwrap();
        let u = eval_lg_mode(ModeIndex::from_parts(2, 0), &params(), &odd, 0.0).unwrap();
        let a = propagate(&u, 1.0, &PropagationPlan::default()).unwrap();
        let b = propagate(&u, 1.0, &PropagationPlan::new(2).unwrap()).unwrap();
        assert!(a.sub(&b).unwrap().norm() < 1e-10);
    }

    #[test]
    fn fundamental_reaches_closed_form_at_rayleigh_range() {
        let grid = Grid::new(256, 8.0).unwrap();
        let u = eval_lg_mode(ModeIndex::from_parts(0, 0), &params(), &grid, 0.0).unwrap();
        let v = propagate(&u, 1.0, &PropagationPlan::default()).unwrap();
        let target = eval_lg_mode(ModeIndex::from_parts(0, 0), &params(), &grid, 1.0).unwrap();
        assert!(fidelity(&v, &target).unwrap() > 0.9999);
        assert!((v.norm() - u.norm()).abs() < 1e-12);
    }

    #[test]
    fn inverse_step_round_trips() {
        let grid = Grid::new(128, 8.0).unwrap();
        let u = eval_lg_mode(ModeIndex::from_parts(-1, 2), &params(), &grid, 0.3).unwrap();
        let plan = PropagationPlan::default();
        assert!(composition_check(&u, 0.7, -0.7, &plan).unwrap() < 1e-12);
        assert!(composition_check(&u, 0.5, 0.5, &plan).unwrap() < 1e-10);
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(5.0 * PI / 4.0) + 3.0 * PI / 4.0).abs() < 1e-15);
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert_eq!(wrap_angle(0.0), 0.0);
    }

    #[test]
    fn residual_rejects_bad_step() {
        let grid = Grid::new(16, 8.0).unwrap();
        let idx = ModeIndex::from_parts(0, 0);
        assert!(paraxial_residual(idx, &params(), &grid, 0.0, 0.0).is_err());
        assert!(paraxial_residual(idx, &params(), &grid, 0.0, -1e-3).is_err());
    }
}
