#![allow(dead_code)]

use lgbeam::{BeamParams, ComplexField, Complex64, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Finite-sum form `Σ_m (-1)^m C(p+α, p-m) x^m / m!`, plus the sum of the
/// absolute values of its terms.
pub fn laguerre_sum(p: u32, alpha: u32, x: f64) -> (f64, f64) {
    let mut value = 0.0;
    let mut scale = 0.0;
    for m in 0..=p {
        let term = binomial(p + alpha, p - m) * x.powi(m as i32) / factorial(m);
        let signed = if m % 2 == 0 { term } else { -term };
        value += signed;
        scale += term.abs();
    }
    (value, scale)
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

pub fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `|u_lp|²` from the closed form, written out independently of the library.
pub fn intensity(l: i32, p: u32, w: f64, r: f64) -> f64 {
    let al = l.unsigned_abs();
    let c2 = 2.0 * factorial(p) / (std::f64::consts::PI * w * w * factorial(p + al));
    let s = 2.0 * r * r / (w * w);
    let lag = laguerre_sum(p, al, s).0;
    c2 * s.powi(al as i32) * (-s).exp() * lag * lag
}

/// `∫ 2πr |u|² dr` by composite Simpson on `[0, 14w]`.
pub fn radial_norm(l: i32, p: u32, w: f64) -> f64 {
    let steps = 20_000;
    let top = 14.0 * w;
    let h = top / steps as f64;
    let f = |r: f64| 2.0 * std::f64::consts::PI * r * intensity(l, p, w, r);
    let mut acc = f(0.0) + f(top);
    for i in 1..steps {
        let r = i as f64 * h;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(r);
    }
    acc * h / 3.0
}

/// Random field: low-pass filtered complex noise under a Gaussian envelope.
pub fn random_smooth_field(grid: Grid, seed: u64, width: f64) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(f64, f64, f64, f64)> = (0..12)
        .map(|_| {
            (
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect();
    ComplexField::from_fn(grid, 0.0, BeamParams::default(), |x, y| {
        let env = (-(x * x + y * y) / (width * width)).exp();
        let wave: Complex64 = modes
            .iter()
            .map(|&(kx, ky, re, im)| Complex64::new(re, im) * Complex64::from_polar(1.0, kx * x + ky * y))
            .sum();
        wave * env
    })
    .unwrap()
}
