//! Information quantities and secret-key rates for the four eavesdropping
//! strategies.
//!
//! All entropies and informations are in bits. Rates are in bits per
//! protocol round. The one-way (Csiszár–Körner) rate for individual attacks
//! is `max(H(B|E) − H(B|A), 0)`; against a collective attack the leak
//! `I(B;E)` is replaced by the Holevo quantity `χ(B;E)`.

mod asymptotic;
mod direct;
mod helstrom;
mod holevo;

use std::f64::consts::{E, LOG2_E, PI};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Depths, ModulationScheme, Scenario};
use crate::quadrature::{integrate_1d, log_add_exp, log_cosh, QuadratureConfig};

pub use asymptotic::{
    chi_bracket, chi_constant, gamma_bracket, gamma_constant, helstrom_bracket,
    key_rate_dd_asymptotic, key_rate_helstrom_asymptotic, key_rate_helstrom_asymptotic_optimal,
    key_rate_holevo_asymptotic, optimal_asymptotic_rate, Constant, HELSTROM_CONSTANT,
};
pub use direct::{h_b_given_e_dd, joint_density_dd, key_rate_coherent, key_rate_dd};
pub use helstrom::{h_b_given_e_helstrom, key_rate_helstrom};
pub use holevo::{holevo_chi, key_rate_holevo};

/// Key rate at one modulation depth together with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub scenario: Scenario,
    pub advantage: f64,
    pub delta_b: f64,
    pub delta_e: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_e_coh: Option<f64>,
    /// `I(A;B)` in bits.
    pub i_ab: f64,
    /// `I(B;E)`, or `χ(B;E)` for the collective attack, in bits.
    pub leak: f64,
    pub key_rate: f64,
    /// Optimized strong-eavesdropping approximation at this advantage.
    pub asymptotic_estimate: f64,
    /// Summed error estimates of the integrals behind `key_rate`.
    pub quadrature_residual: f64,
}

/// `H(B|A) = ½ log₂(2πe)`.
pub fn h_b_given_a() -> f64 {
    0.5 * (2.0 * PI * E).log2()
}

/// `I(A;B) = δ² log₂e − ∫ φ(t − δ) log₂ cosh(δt) dt`.
pub fn mutual_info_ab(delta_b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(mutual_info_ab_estimate(delta_b, cfg)?.0)
}

pub(crate) fn mutual_info_ab_estimate(delta_b: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let d = check_depth("delta_b", delta_b)?;
    if d == 0.0 {
        return Ok((0.0, 0.0));
    }
    let est = integrate_1d(
        |t| crate::quadrature::normal_pdf(t - d) * log_cosh(d * t),
        &[d],
        cfg,
    )?;
    let bits = ((d * d - est.value) * LOG2_E).clamp(0.0, 1.0);
    Ok((bits, est.error * LOG2_E))
}

/// Differential entropy (bits) of `w·N(δ, 1) + (1 − w)·N(−δ, 1)`.
pub fn mixture_entropy(delta: f64, weight: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(mixture_entropy_estimate(delta, weight, cfg)?.0)
}

pub(crate) fn mixture_entropy_estimate(
    delta: f64,
    weight: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let d = check_depth("delta", delta)?;
    crate::error::check_range("weight", weight, (0.0..=1.0).contains(&weight), "must lie in [0, 1]")?;
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let (ln_w, ln_v) = (weight.ln(), (1.0 - weight).ln());
    let est = integrate_1d(
        |y| {
            let ln_p = log_add_exp(ln_w - 0.5 * (y - d) * (y - d), ln_v - 0.5 * (y + d) * (y + d))
                - half_ln_2pi;
            let p = ln_p.exp();
            if p == 0.0 {
                0.0
            } else {
                -p * ln_p
            }
        },
        &[-d, d],
        cfg,
    )?;
    Ok((est.value * LOG2_E, est.error * LOG2_E))
}

/// Bob's exact key rate for a scenario at depth `δ_B`, without the floor at
/// zero. This is the optimizer's objective.
pub fn raw_key_rate(
    scenario: Scenario,
    delta_b: f64,
    advantage: f64,
    modulation: Option<&ModulationScheme>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let depths = scenario_depths(scenario, delta_b, advantage, modulation)?;
    Ok(match scenario {
        Scenario::DirectDetection | Scenario::Coherent => {
            direct::conditional_gain(depths.delta_b, depths.delta_e_coh, cfg)?.0
        }
        Scenario::Helstrom => helstrom::conditional_gain(depths.delta_b, depths.delta_e_coh, cfg)?.0,
        Scenario::Holevo => {
            let (i_ab, _) = mutual_info_ab_estimate(depths.delta_b, cfg)?;
            let (chi, _) = holevo::chi_estimate(depths.delta_b, depths.delta_e, cfg)?;
            i_ab - chi
        }
    })
}

/// Full [`RateResult`] for a scenario at depth `δ_B`.
pub fn key_rate(
    scenario: Scenario,
    delta_b: f64,
    advantage: f64,
    modulation: Option<&ModulationScheme>,
    cfg: &QuadratureConfig,
) -> Result<RateResult> {
    match scenario {
        Scenario::DirectDetection => key_rate_dd(delta_b, advantage, cfg),
        Scenario::Coherent => match modulation {
            Some(m) => key_rate_coherent(delta_b, advantage, m, cfg),
            None => {
                let mut r = key_rate_dd(delta_b, advantage, cfg)?;
                r.scenario = Scenario::Coherent;
                r.delta_e_coh = Some(r.delta_e);
                Ok(r)
            }
        },
        Scenario::Helstrom => {
            let depths = scenario_depths(scenario, check_depth("delta_b", delta_b)?, advantage, modulation)?;
            helstrom::rate_from_depths(&depths, cfg)
        }
        Scenario::Holevo => key_rate_holevo(delta_b, advantage, cfg),
    }
}

/// Depths used by a scenario: Eve's coherent depth follows the modulation's
/// exact relation when one is given and equals `δ_E` otherwise.
pub fn scenario_depths(
    scenario: Scenario,
    delta_b: f64,
    advantage: f64,
    modulation: Option<&ModulationScheme>,
) -> Result<Depths> {
    let mut depths = Depths::from_advantage(delta_b, advantage)?;
    if let (Scenario::Coherent | Scenario::Helstrom, Some(m)) = (scenario, modulation) {
        depths.delta_e_coh = depths.delta_e * m.coherent_depth_ratio();
    }
    Ok(depths)
}

fn check_depth(name: &'static str, delta: f64) -> Result<f64> {
    crate::error::check_range(name, delta, delta.is_finite(), "depth must be finite")?;
    // Every entropy is invariant under a global sign flip of the depths.
    Ok(delta.abs())
}
