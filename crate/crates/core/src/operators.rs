//! Ladder operators of the Laguerre-Gauss family.
//!
//! At the waist plane the lowering operators are, in Cartesian form,
//!
//! ```text
//! A±(0)  = (k(x ∓ iy) + b(∂x ∓ i∂y)) / (2√(bk))
//! A±†(0) = (k(x ± iy) - b(∂x ± i∂y)) / (2√(bk))
//! ```
//!
//! and at any other plane they are conjugated by the free-space propagator,
//! `A(z) = U(z)·A(0)·U(-z)`. With the phase convention of
//! [`crate::analytic`], `A+†` raises `l` by one and `A-†` lowers it by one;
//! `[A±, A±†] = 1` and `[A±, A∓†] = 0`.
//!
//! The polar closed form `(k e^{∓iφ} r + (b e^{∓iφ} + 2z e^{±iφ})(∂r + r∂φ))
//! / (2√(bk))` is available through [`Form::Polar`] for comparison only; it
//! does not agree with the conjugated operator away from fields it
//! annihilates.

use num_complex::Complex64;

use crate::analytic::{eval_lg_mode, ln_factorial};
use crate::error::{LgError, Result};
use crate::field::{fidelity, inner_product, ComplexField};
use crate::grid::Grid;
use crate::params::{BeamParams, ModeIndex};
use crate::propagation::{propagate, propagate_against, PropagationPlan};
use crate::spectral::{d_dx, d_dy};

/// Highest mode order `2p + |l|` that [`synthesize_mode`] accepts.
pub const MAX_SYNTHESIS_ORDER: u32 = 12;

/// Largest tolerated imaginary part of an OAM expectation.
pub const HERMITICITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Lower,
    Raise,
}

/// The `±` of `A±`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    /// Cartesian operator at the waist, conjugated by the propagator elsewhere.
    Canonical,
    /// Polar closed form with the `(∂r + r∂φ)` grouping; the raising
    /// direction is its formal adjoint.
    Polar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LadderKind {
    pub direction: Direction,
    pub sign: Sign,
    pub form: Form,
}

impl LadderKind {
    pub fn lower(sign: Sign) -> Self {
        Self {
            direction: Direction::Lower,
            sign,
            form: Form::Canonical,
        }
    }

    pub fn raise(sign: Sign) -> Self {
        Self {
            direction: Direction::Raise,
            sign,
            form: Form::Canonical,
        }
    }

    pub fn polar(self) -> Self {
        Self {
            form: Form::Polar,
            ..self
        }
    }

    pub fn label(&self) -> String {
        let dagger = match self.direction {
            Direction::Lower => "",
            Direction::Raise => "†",
        };
        format!("A{}{}", self.sign.symbol(), dagger)
    }
}

fn prefactor(params: &BeamParams) -> f64 {
    1.0 / (2.0 * (params.b() * params.k()).sqrt())
}

/// Canonical operator at the waist plane.
pub fn apply_ladder_zero(kind: LadderKind, f: &ComplexField) -> Result<ComplexField> {
    if kind.form != Form::Canonical {
        return Err(LgError::InvalidParameter(
            "apply_ladder_zero takes the canonical form; use apply_ladder_polar".into(),
        ));
    }
    if f.z() != 0.0 {
        return Err(LgError::InvalidParameter(format!(
            "waist-plane operator applied to a field at z={}",
            f.z()
        )));
    }
    let params = f.params();
    let (k, b) = (params.k(), params.b());
    let c = prefactor(params);
    let s = kind.sign.value();
    let fx = d_dx(f);
    let fy = d_dy(f);
    let xs = f.grid().coords();
    let n = f.grid().n();
    let i = Complex64::i();
    let out = f
        .samples()
        .iter()
        .enumerate()
        .map(|(idx, &u)| {
            let (x, y) = (xs[idx % n], xs[idx / n]);
            match kind.direction {
                Direction::Lower => c * (k * (x - i * s * y) * u + b * (fx[idx] - i * s * fy[idx])),
                Direction::Raise => c * (k * (x + i * s * y) * u - b * (fx[idx] + i * s * fy[idx])),
            }
        })
        .collect();
    f.with_samples(0.0, out)
}

/// Canonical operator at the field's own plane: `U(z)·A(0)·U(-z)·f`.
pub fn apply_ladder_at_z(kind: LadderKind, f: &ComplexField, plan: &PropagationPlan) -> Result<ComplexField> {
    let z = f.z();
    if z == 0.0 {
        return apply_ladder_zero(kind, f);
    }
    let at_waist = propagate(f, -z, plan)?;
    let at_waist = at_waist.with_samples(0.0, at_waist.samples().to_vec())?;
    let applied = apply_ladder_zero(kind, &at_waist)?;
    let (_, peak) = f.edge_and_peak_intensity();
    propagate_against(&applied, z, plan, peak)
}

/// Polar closed form evaluated pointwise at the field's plane.
///
/// `∂r` and `∂φ` are assembled from spectral `∂x`, `∂y`; at an exact `r = 0`
/// sample the azimuth is taken as zero.
pub fn apply_ladder_polar(kind: LadderKind, f: &ComplexField) -> Result<ComplexField> {
    let params = f.params();
    let (k, b, z) = (params.k(), params.b(), f.z());
    let c = prefactor(params);
    let s = kind.sign.value();
    let xs = f.grid().coords();
    let n = f.grid().n();
    let geom = |idx: usize| {
        let (x, y) = (xs[idx % n], xs[idx / n]);
        let r = x.hypot(y);
        let phi = y.atan2(x);
        (x, y, r, phi)
    };
    // coefficient of (∂r + r∂φ): b e^{∓iφ} + 2z e^{±iφ}
    let g = |phi: f64| b * Complex64::from_polar(1.0, -s * phi) + 2.0 * z * Complex64::from_polar(1.0, s * phi);

    let out: Vec<Complex64> = match kind.direction {
        Direction::Lower => {
            let fx = d_dx(f);
            let fy = d_dy(f);
            f.samples()
                .iter()
                .enumerate()
                .map(|(idx, &u)| {
                    let (x, y, r, phi) = geom(idx);
                    let (cos, sin) = (phi.cos(), phi.sin());
                    let d_r = cos * fx[idx] + sin * fy[idx];
                    let d_phi = x * fy[idx] - y * fx[idx];
                    c * (k * r * Complex64::from_polar(1.0, -s * phi) * u + g(phi) * (d_r + r * d_phi))
                })
                .collect()
        }
        Direction::Raise => {
            // For L = a + g·(v·∇) with v = (cosφ - r y, sinφ + r x):
            // L†h = conj(a)·h - ∇·(conj(g)·v·h).
            let mut px = Vec::with_capacity(f.samples().len());
            let mut py = Vec::with_capacity(f.samples().len());
            for (idx, &u) in f.samples().iter().enumerate() {
                let (x, y, r, phi) = geom(idx);
                let gc = g(phi).conj() * u;
                px.push(gc * (phi.cos() - r * y));
                py.push(gc * (phi.sin() + r * x));
            }
            let dpx = d_dx(&f.with_samples(z, px)?);
            let dpy = d_dy(&f.with_samples(z, py)?);
            f.samples()
                .iter()
                .enumerate()
                .map(|(idx, &u)| {
                    let (_, _, r, phi) = geom(idx);
                    c * (k * r * Complex64::from_polar(1.0, s * phi) * u - (dpx[idx] + dpy[idx]))
                })
                .collect()
        }
    };
    f.with_samples(z, out)
}

/// Dispatches on [`LadderKind::form`].
pub fn apply_ladder(kind: LadderKind, f: &ComplexField, plan: &PropagationPlan) -> Result<ComplexField> {
    match kind.form {
        Form::Canonical => apply_ladder_at_z(kind, f, plan),
        Form::Polar => apply_ladder_polar(kind, f),
    }
}

/// `⟨f, (A_a·A_b† - A_b†·A_a) f⟩` with canonical operators at the field's plane.
///
/// Adjacent `U(-z)·U(z)` factors of the two conjugated operators cancel, so
/// this evaluates `⟨g, [A_a(0), A_b†(0)] g⟩` with `g = U(-z)·f`.
pub fn commutator_residual(a: Sign, b: Sign, f: &ComplexField, plan: &PropagationPlan) -> Result<Complex64> {
    let lower = LadderKind::lower(a);
    let raise = LadderKind::raise(b);
    let g = if f.z() == 0.0 {
        f.clone()
    } else {
        let g = propagate(f, -f.z(), plan)?;
        g.with_samples(0.0, g.samples().to_vec())?
    };
    let ab = apply_ladder_zero(lower, &apply_ladder_zero(raise, &g)?)?;
    let ba = apply_ladder_zero(raise, &apply_ladder_zero(lower, &g)?)?;
    inner_product(&g, &ab.sub(&ba)?)
}

/// Numbers of `A+†` and `A-†` applications to the fundamental mode that
/// produce `u_{l,p}`: `m = p + max(l, 0)`, `n = p + max(-l, 0)`.
pub fn map_indices(idx: ModeIndex) -> (u32, u32) {
    let l = idx.l();
    (idx.p() + l.max(0) as u32, idx.p() + (-l).max(0) as u32)
}

/// The index relation `m = (l + p)/2`, `n = (l - p)/2` taken literally; it is
/// not integral for most indices and is kept only for reporting.
pub fn literal_index_relation(idx: ModeIndex) -> (f64, f64) {
    let (l, p) = (idx.l() as f64, idx.p() as f64);
    ((l + p) / 2.0, (l - p) / 2.0)
}

/// Which raising operator goes first in [`raise_fundamental`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaiseOrder {
    PlusFirst,
    MinusFirst,
}

/// `(A-†)^n (A+†)^m u00` at the waist, unnormalized.
pub fn raise_fundamental(
    m: u32,
    n: u32,
    order: RaiseOrder,
    params: &BeamParams,
    grid: &Grid,
) -> Result<ComplexField> {
    let mut f = eval_lg_mode(ModeIndex::from_parts(0, 0), params, grid, 0.0)?;
    let steps = match order {
        RaiseOrder::PlusFirst => [(Sign::Plus, m), (Sign::Minus, n)],
        RaiseOrder::MinusFirst => [(Sign::Minus, n), (Sign::Plus, m)],
    };
    for (sign, count) in steps {
        for _ in 0..count {
            f = apply_ladder_zero(LadderKind::raise(sign), &f)?;
        }
    }
    Ok(f)
}

/// `u_{l,p} = (A-†)^n (A+†)^m u00 / sqrt(m!·n!)` at the waist plane.
pub fn synthesize_mode(idx: ModeIndex, params: &BeamParams, grid: &Grid) -> Result<ComplexField> {
    synthesize_mode_ordered(idx, params, grid, RaiseOrder::PlusFirst)
}

pub fn synthesize_mode_ordered(
    idx: ModeIndex,
    params: &BeamParams,
    grid: &Grid,
    order: RaiseOrder,
) -> Result<ComplexField> {
    if idx.order() > MAX_SYNTHESIS_ORDER {
        return Err(LgError::OrderGuard {
            order: idx.order(),
            max: MAX_SYNTHESIS_ORDER,
        });
    }
    let (m, n) = map_indices(idx);
    let raised = raise_fundamental(m, n, order, params, grid)?;
    let scale = (-0.5 * (ln_factorial(m) + ln_factorial(n))).exp();
    Ok(raised.scale(Complex64::new(scale, 0.0)))
}

/// Result of scanning raising counts `(m, n)` against one target mode.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexScanRow {
    pub target: ModeIndex,
    /// Counts whose raised state overlaps the target best.
    pub best: (u32, u32),
    pub best_fidelity: f64,
    /// Best fidelity among all other scanned counts.
    pub runner_up_fidelity: f64,
}

/// For each target, finds the counts `(m, n)` with `m + n <= max_total` whose
/// state `(A-†)^n (A+†)^m u00` has the highest fidelity with the analytic
/// target. Independent of [`map_indices`].
pub fn index_scan(
    targets: &[ModeIndex],
    max_total: u32,
    params: &BeamParams,
    grid: &Grid,
) -> Result<Vec<IndexScanRow>> {
    let analytic: Vec<ComplexField> = targets
        .iter()
        .map(|&t| eval_lg_mode(t, params, grid, 0.0))
        .collect::<Result<_>>()?;
    let mut best: Vec<((u32, u32), f64, f64)> = vec![((0, 0), -1.0, -1.0); targets.len()];
    let mut record = |counts: (u32, u32), state: &ComplexField| -> Result<()> {
        for (slot, target) in best.iter_mut().zip(&analytic) {
            let fid = fidelity(target, state)?;
            if fid > slot.1 {
                slot.2 = slot.1;
                *slot = (counts, fid, slot.2);
            } else if fid > slot.2 {
                slot.2 = fid;
            }
        }
        Ok(())
    };

    // level[j] holds the state with n = j at the current total m + n.
    let mut level = vec![eval_lg_mode(ModeIndex::from_parts(0, 0), params, grid, 0.0)?];
    record((0, 0), &level[0])?;
    for total in 1..=max_total {
        let mut next = Vec::with_capacity(level.len() + 1);
        for (nn, state) in level.iter().enumerate() {
            next.push(apply_ladder_zero(LadderKind::raise(Sign::Plus), state)?);
            if nn + 1 == level.len() {
                next.push(apply_ladder_zero(LadderKind::raise(Sign::Minus), state)?);
            }
        }
        for (nn, state) in next.iter().enumerate() {
            record((total - nn as u32, nn as u32), state)?;
        }
        level = next;
    }

    Ok(targets
        .iter()
        .zip(best)
        .map(|(&target, (counts, fid, runner))| IndexScanRow {
            target,
            best: counts,
            best_fidelity: fid,
            runner_up_fidelity: runner.max(0.0),
        })
        .collect())
}

/// `⟨f, -i∂φ f⟩ / ⟨f, f⟩` with `∂φ = x∂y - y∂x`, in units of ħ per photon.
pub fn oam_expectation(f: &ComplexField) -> Result<f64> {
    let value = oam_expectation_complex(f)?;
    if value.im.abs() > HERMITICITY_TOLERANCE {
        return Err(LgError::NonHermitian(value.im));
    }
    Ok(value.re)
}

/// Unchecked complex expectation; the imaginary part measures how far the
/// discrete operator is from Hermitian on `f`.
pub fn oam_expectation_complex(f: &ComplexField) -> Result<Complex64> {
    let norm = f.norm_sqr();
    if norm == 0.0 {
        return Err(LgError::ZeroNorm);
    }
    let fx = d_dx(f);
    let fy = d_dy(f);
    let xs = f.grid().coords();
    let n = f.grid().n();
    let ds = f.grid().spacing();
    let sum: Complex64 = f
        .samples()
        .iter()
        .enumerate()
        .map(|(idx, u)| {
            let (x, y) = (xs[idx % n], xs[idx / n]);
            u.conj() * Complex64::new(0.0, -1.0) * (x * fy[idx] - y * fx[idx])
        })
        .sum();
    Ok(sum * ds * ds / norm)
}
