//! Oracles shared by the integration tests. Nothing here calls the crate's
//! quadrature: integrals use a fixed composite Simpson rule and samples come
//! from an independent generator.

#![allow(dead_code)]

use std::f64::consts::{LN_2, LOG2_E, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `ln cosh x` written independently of the crate's helper.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `J(m) = E[ln cosh Z]` for `Z ~ N(m, m)`.
pub fn j(m: f64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    let s = m.sqrt();
    simpson(|z| phi(z) * ln_cosh(m + s * z), -14.0, 14.0, 8000)
}

/// Exact DD key rate (bits, unfloored) through the one-dimensional reduction
/// `log₂e [δ_B² − J(δ_B² + δ_E²) + J(δ_E²)]`.
pub fn dd_gain_oracle(delta_b: f64, delta_e: f64) -> f64 {
    let (b2, e2) = (delta_b * delta_b, delta_e * delta_e);
    LOG2_E * (b2 - j(b2 + e2) + j(e2))
}

/// `I(A;B)` in bits from a one-dimensional Simpson rule.
pub fn mutual_info_oracle(delta: f64) -> f64 {
    // Conditioned on a = +: log₂ 2p(y|+)/(p(y|+)+p(y|−)) = 1 − log₂(1 + e^{−2δy}).
    simpson(
        |y| phi(y - delta) * (1.0 - LOG2_E * (-2.0 * delta * y).exp().ln_1p()),
        delta - 14.0,
        delta + 14.0,
        8000,
    )
}

pub const HALF_LOG2_2PI_E: f64 = 2.047_095_585_180_641_102_7;

/// Sample mean and its standard error of `draw` over `n` samples, computed in
/// parallel with one ChaCha20 stream per chunk.
pub fn mc_mean<F>(n: u64, seed: u64, draw: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha20Rng) -> f64 + Sync,
{
    const CHUNK: u64 = 1 << 20;
    let chunks = n.div_ceil(CHUNK);
    let (s, s2, count) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = (n - c * CHUNK).min(CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let x = draw(&mut rng);
                s += x;
                s2 += x * x;
            }
            (s, s2, len as f64)
        })
        .reduce(|| (0.0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let mean = s / count;
    let var = (s2 / count - mean * mean) * count / (count - 1.0);
    (mean, (var / count).sqrt())
}

/// Standard normal by Box–Muller, independent of the crate's sampler.
pub fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

pub fn sign(rng: &mut impl Rng) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// `|a − b| ≤ tol`, with a readable message.
#[track_caller]
pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a:.15e} vs {b:.15e} (|diff| {:.3e} > {tol:.3e})", (a - b).abs());
}
