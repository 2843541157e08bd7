//! Minimum-error (Helstrom) eavesdropping: Eve's outcome is a bit that
//! equals Alice's with probability `1 − P_err`.

use std::f64::consts::LOG2_E;

use super::{
    check_depth, h_b_given_a, key_rate_helstrom_asymptotic_optimal, mixture_entropy_estimate,
    mutual_info_ab_estimate, RateResult,
};
use crate::error::{check_range, Result};
use crate::model::{helstrom_error_probability, Depths, Scenario};
use crate::quadrature::{integrate_1d, log_add_exp, normal_pdf, QuadratureConfig};

/// `H(B|M_E) − H(B|A)` in bits, with its quadrature error.
///
/// Given Eve's bit, Bob's outcome is the mixture `w·N(δ,1) + (1−w)·N(−δ,1)`
/// with `w = 1 − P_err`, whose entropy is
/// `½ln(2πe) + δ² − E[ln(w e^{δy} + (1−w) e^{−δy})]`. Both values of Eve's bit
/// give the same entropy.
pub(crate) fn conditional_gain(
    delta_b: f64,
    delta_e_coh: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let d = check_depth("delta_b", delta_b)?;
    let p_err = helstrom_error_probability(check_depth("delta_e_coh", delta_e_coh)?)?;
    if d == 0.0 {
        return Ok((0.0, 0.0));
    }
    let w = 1.0 - p_err;
    let (ln_w, ln_v) = (w.ln(), p_err.ln());
    let est = integrate_1d(
        |y| {
            let density = w * normal_pdf(y - d) + p_err * normal_pdf(y + d);
            density * log_add_exp(ln_w + d * y, ln_v - d * y)
        },
        &[-d, d],
        cfg,
    )?;
    Ok(((d * d - est.value) * LOG2_E, est.error * LOG2_E))
}

/// Bob's entropy conditioned on Eve's Helstrom outcome, in bits.
pub fn h_b_given_e_helstrom(delta_b: f64, delta_e_coh: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(h_b_given_a() + conditional_gain(delta_b, delta_e_coh, cfg)?.0)
}

/// Exact key rate against a Helstrom eavesdropper, parameterized by Eve's
/// coherent depth; Bob's depth is `δ_E^coh / √ℰ`.
pub fn key_rate_helstrom(delta_e_coh: f64, advantage: f64, cfg: &QuadratureConfig) -> Result<RateResult> {
    check_range(
        "advantage",
        advantage,
        advantage > 0.0 && advantage.is_finite(),
        "must be positive and finite",
    )?;
    let delta_e_coh = check_depth("delta_e_coh", delta_e_coh)?;
    let delta_b = delta_e_coh / advantage.sqrt();
    rate_from_depths(
        &Depths {
            delta_b,
            delta_e: delta_e_coh,
            delta_e_coh,
            advantage,
        },
        cfg,
    )
}

/// Helstrom key rate at explicit depths; `δ_E^coh` may differ from `δ_E`
/// when it follows a modulation's exact relation.
pub(crate) fn rate_from_depths(depths: &Depths, cfg: &QuadratureConfig) -> Result<RateResult> {
    let delta_b = depths.delta_b;
    let (gain, gain_err) = conditional_gain(delta_b, depths.delta_e_coh, cfg)?;
    let (i_ab, i_err) = mutual_info_ab_estimate(delta_b, cfg)?;
    let (h_b, h_err) = mixture_entropy_estimate(delta_b, 0.5, cfg)?;
    Ok(RateResult {
        scenario: Scenario::Helstrom,
        advantage: depths.advantage,
        delta_b,
        delta_e: depths.delta_e,
        delta_e_coh: Some(depths.delta_e_coh),
        i_ab,
        leak: (h_b - h_b_given_a() - gain).max(0.0),
        key_rate: gain.max(0.0),
        asymptotic_estimate: key_rate_helstrom_asymptotic_optimal(depths.advantage)?,
        quadrature_residual: gain_err + i_err + h_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{h_b_given_e_dd, mixture_entropy};

    // 40-digit mpmath value of the discrete-conditional entropy.
    const HBE_03_10: f64 = 2.070_564_154_770_788_620_1;

    #[test]
    fn uninformative_eve_matches_bob_marginal() {
        let cfg = QuadratureConfig::default();
        let h = h_b_given_e_helstrom(0.7, 0.0, &cfg).unwrap();
        assert!((h - h_b_given_e_dd(0.7, 0.0, &cfg).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn perfect_eve_knows_alice() {
        let cfg = QuadratureConfig::default();
        let h = h_b_given_e_helstrom(0.7, 30.0, &cfg).unwrap();
        assert!((h - h_b_given_a()).abs() < 1e-10);
    }

    #[test]
    fn matches_direct_mixture_entropy() {
        let cfg = QuadratureConfig::default();
        let h = h_b_given_e_helstrom(0.3, 1.0, &cfg).unwrap();
        assert!((h - HBE_03_10).abs() < 1e-9);
        let w = 1.0 - helstrom_error_probability(1.0).unwrap();
        assert!((h - mixture_entropy(0.3, w, &cfg).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn rate_values() {
        let cfg = QuadratureConfig::default();
        assert_eq!(key_rate_helstrom(0.0, 10.0, &cfg).unwrap().key_rate, 0.0);
        let r = key_rate_helstrom(1.0, 100.0, &cfg).unwrap();
        assert!((r.delta_b - 0.1).abs() < 1e-15);
        assert!((r.key_rate - (r.i_ab - r.leak)).abs() < 1e-8);
        assert_eq!(key_rate_helstrom(-1.0, 100.0, &cfg).unwrap().key_rate, r.key_rate);
        assert!(key_rate_helstrom(1.0, -100.0, &cfg).is_err());
    }
}
