//! Physical parameterization of the link and closed-form elementary
//! quantities: modulation depths, the eavesdropper's advantage, the
//! minimum-error discrimination probability and the entropy of a mixture of
//! two coherent states.

use std::f64::consts::LOG2_E;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

/// Largest relative modulation `Δn/n̄` for which the macroscopic Gaussian
/// description is considered sound.
pub const MAX_RELATIVE_MODULATION: f64 = 0.2;
/// Smallest detected photon number per pulse for the Gaussian description.
pub const MIN_DETECTED_PHOTONS: f64 = 100.0;

const RADICAND_GUARD: f64 = 1e-12;

/// Transmissions and detection noise of Bob's link and Eve's tap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub tau_b: f64,
    pub tau_e: f64,
    pub sigma_b: f64,
    pub sigma_e: f64,
    pub sigma_b_excess_sq: f64,
    pub n_bar: f64,
}

impl ChannelParams {
    /// Channel with explicitly given detection standard deviations.
    pub fn new(
        tau_b: f64,
        tau_e: f64,
        sigma_b: f64,
        sigma_e: f64,
        sigma_b_excess_sq: f64,
        n_bar: f64,
    ) -> Result<Self> {
        let ch = Self {
            tau_b,
            tau_e,
            sigma_b,
            sigma_e,
            sigma_b_excess_sq,
            n_bar,
        };
        ch.validate()?;
        Ok(ch)
    }

    /// Shot-noise-limited detection on both sides, with optional excess noise
    /// for Bob: `σ_E² = τ_E n̄` and `σ_B² = τ_B n̄ + σ²_ex`.
    pub fn shot_noise_limited(
        tau_b: f64,
        tau_e: f64,
        n_bar: f64,
        sigma_b_excess_sq: f64,
    ) -> Result<Self> {
        check_range("n_bar", n_bar, n_bar > 0.0 && n_bar.is_finite(), "must be positive")?;
        check_range(
            "sigma_b_excess_sq",
            sigma_b_excess_sq,
            sigma_b_excess_sq >= 0.0 && sigma_b_excess_sq.is_finite(),
            "must be non-negative",
        )?;
        check_transmission("tau_b", tau_b)?;
        check_transmission("tau_e", tau_e)?;
        Self::new(
            tau_b,
            tau_e,
            (tau_b * n_bar + sigma_b_excess_sq).sqrt(),
            (tau_e * n_bar).sqrt(),
            sigma_b_excess_sq,
            n_bar,
        )
    }

    pub fn validate(&self) -> Result<()> {
        check_transmission("tau_b", self.tau_b)?;
        check_transmission("tau_e", self.tau_e)?;
        check_positive("sigma_b", self.sigma_b)?;
        check_positive("sigma_e", self.sigma_e)?;
        check_positive("n_bar", self.n_bar)?;
        check_range(
            "sigma_b_excess_sq",
            self.sigma_b_excess_sq,
            self.sigma_b_excess_sq >= 0.0 && self.sigma_b_excess_sq.is_finite(),
            "must be non-negative",
        )
    }
}

fn check_transmission(name: &'static str, tau: f64) -> Result<()> {
    check_range(name, tau, tau > 0.0 && tau <= 1.0, "transmission must lie in (0, 1]")
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    check_range(name, x, x > 0.0 && x.is_finite(), "must be positive and finite")
}

fn check_depth(name: &'static str, x: f64) -> Result<()> {
    check_range(name, x, x >= 0.0 && x.is_finite(), "depth must be non-negative and finite")
}

/// The two pulse energies Alice chooses between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationScheme {
    pub n0: f64,
    pub n1: f64,
}

impl ModulationScheme {
    pub fn new(n0: f64, n1: f64) -> Result<Self> {
        check_positive("n0", n0)?;
        check_range("n1", n1, n1 > n0 && n1.is_finite(), "must exceed n0")?;
        Ok(Self { n0, n1 })
    }

    /// Symmetric pair around `n_bar` with relative modulation `Δn/n̄`.
    pub fn from_relative(n_bar: f64, relative: f64) -> Result<Self> {
        check_positive("n_bar", n_bar)?;
        check_range(
            "relative_modulation",
            relative,
            relative > 0.0 && relative < 2.0,
            "must lie in (0, 2)",
        )?;
        Self::new(n_bar * (1.0 - relative / 2.0), n_bar * (1.0 + relative / 2.0))
    }

    pub fn n_bar(&self) -> f64 {
        0.5 * (self.n0 + self.n1)
    }

    pub fn delta_n(&self) -> f64 {
        self.n1 - self.n0
    }

    pub fn alpha_bar(&self) -> f64 {
        0.5 * (self.n0.sqrt() + self.n1.sqrt())
    }

    pub fn relative_modulation(&self) -> f64 {
        self.delta_n() / self.n_bar()
    }

    /// `δ_E^coh / δ_E` for a shot-noise-limited eavesdropper, which depends
    /// only on `Δn/n̄`.
    pub fn coherent_depth_ratio(&self) -> f64 {
        (2.0 * (self.n0 + self.n1)).sqrt() / (self.n0.sqrt() + self.n1.sqrt())
    }

    /// Advisory check of the macroscopic-pulse regime. Never enforced.
    pub fn macroscopic_regime_ok(&self, ch: &ChannelParams) -> bool {
        let weakest = self.n0.min(self.n1);
        self.relative_modulation() <= MAX_RELATIVE_MODULATION
            && ch.tau_b * weakest >= MIN_DETECTED_PHOTONS
            && ch.tau_e * weakest >= MIN_DETECTED_PHOTONS
    }
}

/// Standardized modulation depths seen by Bob and Eve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Depths {
    pub delta_b: f64,
    pub delta_e: f64,
    pub delta_e_coh: f64,
    pub advantage: f64,
}

impl Depths {
    /// Depths implied by Bob's depth and the eavesdropper's advantage, with
    /// `δ_E^coh` taken equal to `δ_E`.
    pub fn from_advantage(delta_b: f64, advantage: f64) -> Result<Self> {
        check_depth("delta_b", delta_b)?;
        check_positive("advantage", advantage)?;
        let delta_e = advantage.sqrt() * delta_b;
        Ok(Self {
            delta_b,
            delta_e,
            delta_e_coh: delta_e,
            advantage,
        })
    }
}

/// The four eavesdropping strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    #[serde(rename = "dd")]
    DirectDetection,
    Coherent,
    Helstrom,
    Holevo,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::DirectDetection,
        Scenario::Coherent,
        Scenario::Helstrom,
        Scenario::Holevo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::DirectDetection => "dd",
            Scenario::Coherent => "coherent",
            Scenario::Helstrom => "helstrom",
            Scenario::Holevo => "holevo",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dd" | "direct" | "direct-detection" => Ok(Scenario::DirectDetection),
            "coherent" | "coh" | "homodyne" => Ok(Scenario::Coherent),
            "helstrom" => Ok(Scenario::Helstrom),
            "holevo" => Ok(Scenario::Holevo),
            other => Err(Error::Config(format!("unknown scenario `{other}`"))),
        }
    }
}

/// `ℰ = ((τ_E/σ_E)/(τ_B/σ_B))²`.
pub fn eavesdropper_advantage(ch: &ChannelParams) -> Result<f64> {
    ch.validate()?;
    let ratio = (ch.tau_e / ch.sigma_e) / (ch.tau_b / ch.sigma_b);
    Ok(ratio * ratio)
}

/// Advantage against a shot-noise-limited eavesdropper when Bob carries excess
/// noise: `(τ_E/τ_B)(1 + σ²_ex/(τ_B n̄))`.
pub fn shot_noise_advantage(tau_b: f64, tau_e: f64, n_bar: f64, sigma_b_excess_sq: f64) -> Result<f64> {
    let ch = ChannelParams::shot_noise_limited(tau_b, tau_e, n_bar, sigma_b_excess_sq)?;
    Ok((tau_e / tau_b) * (1.0 + ch.sigma_b_excess_sq / (tau_b * n_bar)))
}

pub fn modulation_depths(ch: &ChannelParams, modulation: &ModulationScheme) -> Result<Depths> {
    ch.validate()?;
    let modulation = ModulationScheme::new(modulation.n0, modulation.n1)?;
    let dn = modulation.delta_n();
    Ok(Depths {
        delta_b: ch.tau_b * dn / (2.0 * ch.sigma_b),
        delta_e: ch.tau_e * dn / (2.0 * ch.sigma_e),
        delta_e_coh: ch.tau_e.sqrt() * (modulation.n1.sqrt() - modulation.n0.sqrt()),
        advantage: eavesdropper_advantage(ch)?,
    })
}

/// Minimum error probability for discriminating two coherent states at
/// depth `δ_E^coh`: `½(1 − √(1 − e^{−δ²}))`.
pub fn helstrom_error_probability(delta_e_coh: f64) -> Result<f64> {
    check_range(
        "delta_e_coh",
        delta_e_coh,
        delta_e_coh >= 0.0,
        "depth must be non-negative",
    )?;
    // 1 - sqrt(1 - q) = q / (1 + sqrt(1 - q)) avoids cancellation for small q.
    let q = (-delta_e_coh * delta_e_coh).exp();
    Ok(0.5 * q / (1.0 + (-(-delta_e_coh * delta_e_coh).exp_m1()).sqrt()))
}

/// Shannon entropy of a Bernoulli variable, in bits.
pub fn binary_entropy(x: f64) -> Result<f64> {
    check_range("x", x, (0.0..=1.0).contains(&x), "probability must lie in [0, 1]")?;
    Ok(binary_entropy_unchecked(x))
}

pub(crate) fn binary_entropy_unchecked(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let y = 1.0 - x;
    -(x * x.ln() + y * y.ln()) * LOG2_E
}

/// Von Neumann entropy (bits) of `p|α⟩⟨α| + (1−p)|β⟩⟨β|` where
/// `q = |⟨α|β⟩|²`.
pub fn coherent_mixture_entropy(p: f64, q: f64) -> Result<f64> {
    check_range("p", p, (0.0..=1.0).contains(&p), "probability must lie in [0, 1]")?;
    check_range("q", q, (0.0..=1.0).contains(&q), "overlap must lie in [0, 1]")?;
    // `1 − (1 − p)` rounds p onto the grid where `1 − p` is exact, so p and
    // `1 − p` map to the same smaller weight and the result is symmetric
    // bit for bit.
    let small = if p <= 0.5 { 1.0 - (1.0 - p) } else { 1.0 - p };
    mixture_entropy_from_weights(small * (1.0 - small), q)
}

/// Same as [`coherent_mixture_entropy`] but takes the product `p(1−p)`, which
/// callers holding logistic weights can form without cancellation.
pub(crate) fn mixture_entropy_from_weights(p_one_minus_p: f64, q: f64) -> Result<f64> {
    // Smaller eigenvalue ½(1 − √r) with r = 1 − 4p(1−p)(1−q), written as
    // (1 − r) / (2(1 + √r)) to keep precision when r is close to 1.
    let one_minus_r = 4.0 * p_one_minus_p * (1.0 - q);
    let mut r = 1.0 - one_minus_r;
    if r < 0.0 {
        if r < -RADICAND_GUARD {
            return Err(Error::Numeric(format!("mixture radicand {r:e} is negative")));
        }
        r = 0.0;
    } else if r > 1.0 {
        if r > 1.0 + RADICAND_GUARD {
            return Err(Error::Numeric(format!("mixture radicand {r:e} exceeds one")));
        }
        r = 1.0;
    }
    let lambda = (one_minus_r.max(0.0) / (2.0 * (1.0 + r.sqrt()))).min(0.5);
    Ok(binary_entropy_unchecked(lambda))
}
