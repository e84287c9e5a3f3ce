//! Closed-form Laguerre-Gauss modes.
//!
//! ```text
//! u_lp(r, φ, z) = c_lp · (r√2/w)^|l| · exp(-r²/w²) · L_p^|l|(2r²/w²)
//!                 · exp(i(k r²/(2R) + lφ - (2p+|l|+1)·atan(z/b)))
//! ```
//!
//! with `w² = 2(z²+b²)/(kb)` and `1/R = z/(z²+b²)`. This phase convention
//! makes `u_lp` an exact solution of `∇²u + 2ik ∂u/∂z = 0` and gives the
//! mode an orbital angular momentum of `+l` under `-i∂φ`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{LgError, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::params::{BeamParams, ModeIndex};

/// Beam radius, inverse wavefront curvature and Gouy base angle at a plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    pub w: f64,
    /// `1/R(z)`; zero at the waist.
    pub r_inv: f64,
    /// `atan(z/b)`, in `(-π/2, π/2)`.
    pub psi: f64,
}

pub fn beam_geometry(params: &BeamParams, z: f64) -> Result<BeamGeometry> {
    if !z.is_finite() {
        return Err(LgError::InvalidParameter(format!("plane z must be finite, got {z}")));
    }
    let b = params.b();
    let s = z * z + b * b;
    Ok(BeamGeometry {
        w: (2.0 * s / (params.k() * b)).sqrt(),
        r_inv: z / s,
        psi: (z / b).atan(),
    })
}

/// Generalized Laguerre polynomial `L_p^alpha(x)`.
pub fn laguerre_poly(p: i64, alpha: i64, x: f64) -> Result<f64> {
    let p = u32::try_from(p).map_err(|_| LgError::InvalidParameter(format!("degree p must be >= 0, got {p}")))?;
    let alpha =
        u32::try_from(alpha).map_err(|_| LgError::InvalidParameter(format!("order alpha must be >= 0, got {alpha}")))?;
    if !x.is_finite() {
        return Err(LgError::InvalidParameter(format!("argument must be finite, got {x}")));
    }
    Ok(laguerre(p, alpha, x))
}

/// Three-term recurrence
/// `j·L_j = (2j-1+α-x)·L_{j-1} - (j-1+α)·L_{j-2}`.
pub fn laguerre(p: u32, alpha: u32, x: f64) -> f64 {
    let a = alpha as f64;
    let mut prev = 1.0;
    if p == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for j in 2..=p {
        let jf = j as f64;
        let next = ((2.0 * jf - 1.0 + a - x) * cur - (jf - 1.0 + a) * prev) / jf;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln(n!)`.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `c_lp = sqrt(2·p! / (π·w²·(p+|l|)!))`.
pub fn normalization_const(idx: ModeIndex, w: f64) -> f64 {
    let ln_c2 = std::f64::consts::LN_2 + ln_factorial(idx.p())
        - PI.ln()
        - 2.0 * w.ln()
        - ln_factorial(idx.p() + idx.abs_l());
    (0.5 * ln_c2).exp()
}

/// Pointwise evaluator for one mode at one plane.
#[derive(Debug, Clone, Copy)]
pub struct ModeEvaluator {
    idx: ModeIndex,
    k: f64,
    geometry: BeamGeometry,
    c: f64,
    /// Phase offset applied uniformly: `-(2p+|l|+1)·psi`, or zero for the
    /// Gouy-free envelope.
    gouy: f64,
}

impl ModeEvaluator {
    pub fn new(idx: ModeIndex, params: &BeamParams, z: f64) -> Result<Self> {
        let geometry = beam_geometry(params, z)?;
        Ok(Self {
            idx,
            k: params.k(),
            geometry,
            c: normalization_const(idx, geometry.w),
            gouy: -((idx.order() + 1) as f64) * geometry.psi,
        })
    }

    /// Same mode with the Gouy phase term dropped.
    pub fn without_gouy(mut self) -> Self {
        self.gouy = 0.0;
        self
    }

    pub fn geometry(&self) -> &BeamGeometry {
        &self.geometry
    }

    pub fn at(&self, x: f64, y: f64) -> Complex64 {
        let w = self.geometry.w;
        let r2 = x * x + y * y;
        let s = 2.0 * r2 / (w * w);
        // (r√2/w)^|l| e^{ilφ} = ((x ± iy)·√2/w)^|l|, smooth through r = 0.
        let helix = Complex64::new(x, y * self.idx.l().signum() as f64) * (2.0_f64.sqrt() / w);
        let helix = if self.idx.l() == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            helix.powu(self.idx.abs_l())
        };
        let radial = self.c * (-r2 / (w * w)).exp() * laguerre(self.idx.p(), self.idx.abs_l(), s);
        let phase = 0.5 * self.k * r2 * self.geometry.r_inv + self.gouy;
        helix * Complex64::from_polar(radial, phase)
    }
}

/// Samples of the unit-normalized mode `u_{l,p}` at plane `z`.
pub fn eval_lg_mode(idx: ModeIndex, params: &BeamParams, grid: &Grid, z: f64) -> Result<ComplexField> {
    eval_with(ModeEvaluator::new(idx, params, z)?, params, grid, z)
}

/// Mode samples without the Gouy phase factor; used to measure the Gouy phase
/// of a numerically propagated field.
pub fn eval_lg_envelope(idx: ModeIndex, params: &BeamParams, grid: &Grid, z: f64) -> Result<ComplexField> {
    eval_with(ModeEvaluator::new(idx, params, z)?.without_gouy(), params, grid, z)
}

fn eval_with(eval: ModeEvaluator, params: &BeamParams, grid: &Grid, z: f64) -> Result<ComplexField> {
    let n = grid.n();
    let xs = grid.coords();
    let mut samples = vec![Complex64::new(0.0, 0.0); grid.len()];
    samples.par_chunks_mut(n).enumerate().for_each(|(iy, row)| {
        let y = xs[iy];
        for (v, &x) in row.iter_mut().zip(&xs) {
            *v = eval.at(x, y);
        }
    });
    ComplexField::new(*grid, z, *params, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn laguerre_low_orders() {
        for x in [-1.0, 0.0, 0.3, 7.5] {
            for alpha in 0..4 {
                assert_eq!(laguerre_poly(0, alpha, x).unwrap(), 1.0);
            }
            assert_relative_eq!(laguerre_poly(1, 0, x).unwrap(), 1.0 - x);
        }
        // Frozen from the finite-sum form: 3 - 9 + 9/2.
        assert_relative_eq!(laguerre_poly(2, 1, 3.0).unwrap(), -1.5, epsilon = 1e-15);
    }

    #[test]
    fn laguerre_rejects_negative_indices() {
        assert!(laguerre_poly(-1, 0, 1.0).is_err());
        assert!(laguerre_poly(1, -2, 1.0).is_err());
        assert!(laguerre_poly(1, 2, f64::NAN).is_err());
    }

    #[test]
    fn geometry_at_waist_and_rayleigh_range() {
        let params = BeamParams::new(1.0, 1.0).unwrap();
        let g0 = beam_geometry(&params, 0.0).unwrap();
        assert_relative_eq!(g0.w, 2.0_f64.sqrt());
        assert_eq!(g0.r_inv, 0.0);
        assert_eq!(g0.psi, 0.0);
        let g1 = beam_geometry(&params, 1.0).unwrap();
        assert_relative_eq!(g1.w, 2.0);
        assert_relative_eq!(g1.r_inv, 0.5);
        assert_relative_eq!(g1.psi, PI / 4.0);
        let tiny = beam_geometry(&params, 1e-300).unwrap();
        assert!(tiny.r_inv.is_finite() && tiny.r_inv.abs() < 1e-299);
        assert!(beam_geometry(&params, f64::INFINITY).is_err());
    }

    #[test]
    fn normalization_constants() {
        assert_relative_eq!(
            normalization_const(ModeIndex::from_parts(0, 0), 1.0),
            (2.0 / PI).sqrt(),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            normalization_const(ModeIndex::from_parts(2, 1), 1.0),
            (1.0 / (3.0 * PI)).sqrt(),
            epsilon = 1e-15
        );
        for idx in [ModeIndex::from_parts(-3, 2), ModeIndex::from_parts(1, 0)] {
            assert_relative_eq!(
                normalization_const(idx, 2.0),
                normalization_const(idx, 1.0) / 2.0,
                epsilon = 1e-15
            );
        }
        // (p+|l|)! = 170! overflows a u128; the log form does not.
        assert!(normalization_const(ModeIndex::from_parts(100, 70), 1.0).is_finite());
    }

    #[test]
    fn fundamental_on_axis_at_waist() {
        let params = BeamParams::new(2.0, 1.0).unwrap();
        let u00 = ModeEvaluator::new(ModeIndex::from_parts(0, 0), &params, 0.0).unwrap();
        let v = u00.at(0.0, 0.0);
        assert_relative_eq!(v.re, (2.0 / PI).sqrt(), epsilon = 1e-15);
        assert_eq!(v.im, 0.0);
        for l in [1, -1, 2] {
            let m = ModeEvaluator::new(ModeIndex::from_parts(l, 1), &params, 0.7).unwrap();
            assert_eq!(m.at(0.0, 0.0), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn fundamental_matches_closed_form() {
        let params = BeamParams::new(2.0, 1.0).unwrap();
        let z = 0.8;
        let eval = ModeEvaluator::new(ModeIndex::from_parts(0, 0), &params, z).unwrap();
        let w2 = 2.0 * (z * z + 1.0) / 2.0;
        for (x, y) in [(0.1, 0.2), (-1.0, 0.5), (0.0, -2.0)] {
            let r2: f64 = x * x + y * y;
            let expected = Complex64::from_polar(
                (2.0 / (PI * w2)).sqrt() * (-r2 / w2).exp(),
                2.0 * r2 * z / (2.0 * (z * z + 1.0)) - (z / 1.0_f64).atan(),
            );
            assert!((eval.at(x, y) - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn helical_phase_winds_with_l() {
        let params = BeamParams::default();
        for l in [-3, -1, 1, 2] {
            let m = ModeEvaluator::new(ModeIndex::from_parts(l, 0), &params, 0.0).unwrap();
            let a = m.at(0.5, 0.0);
            let b = m.at(0.0, 0.5);
            // quarter turn multiplies by e^{ilπ/2}
            let ratio = b / a;
            let expected = Complex64::from_polar(1.0, l as f64 * PI / 2.0);
            assert!((ratio - expected).norm() < 1e-14, "l={l}");
        }
    }
}
