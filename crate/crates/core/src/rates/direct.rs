//! Direct-detection and homodyne eavesdropping: Bob and Eve both hold
//! continuous Gaussian outcomes.

use std::f64::consts::{LOG2_E, PI};

use super::{
    check_depth, h_b_given_a, key_rate_dd_asymptotic, mixture_entropy_estimate,
    mutual_info_ab_estimate, RateResult,
};
use crate::error::Result;
use crate::model::{Depths, ModulationScheme, Scenario};
use crate::quadrature::{integrate_2d, log_cosh, normal_pdf, QuadratureConfig};

/// Joint density of Bob's and Eve's standardized outcomes,
/// `½[φ(y_B + δ_B)φ(y_E + δ_E) + φ(y_B − δ_B)φ(y_E − δ_E)]`.
pub fn joint_density_dd(y_b: f64, y_e: f64, delta_b: f64, delta_e: f64) -> f64 {
    let minus = (y_b + delta_b).powi(2) + (y_e + delta_e).powi(2);
    let plus = (y_b - delta_b).powi(2) + (y_e - delta_e).powi(2);
    ((-0.5 * minus).exp() + (-0.5 * plus).exp()) / (4.0 * PI)
}

/// `H(B|E) − H(B|A)` in bits, with its quadrature error.
///
/// The integrand `log[cosh(δ_E y_E + δ_B y_B)/cosh(δ_E y_E)]` is invariant
/// under `(y_B, y_E) → (−y_B, −y_E)`, which maps one mixture component of the
/// joint density onto the other, so only the `a = 1` component is integrated.
pub(crate) fn conditional_gain(delta_b: f64, delta_e: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let db = check_depth("delta_b", delta_b)?;
    let de = check_depth("delta_e", delta_e)?;
    if db == 0.0 {
        return Ok((0.0, 0.0));
    }
    let est = integrate_2d(
        |y_e, y_b| {
            let x = de * y_e;
            normal_pdf(y_b - db) * normal_pdf(y_e - de) * (log_cosh(x + db * y_b) - log_cosh(x))
        },
        &[de],
        &[db],
        cfg,
    )?;
    Ok(((db * db - est.value) * LOG2_E, est.error * LOG2_E))
}

/// Bob's entropy conditioned on Eve's direct-detection outcome, in bits.
pub fn h_b_given_e_dd(delta_b: f64, delta_e: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(h_b_given_a() + conditional_gain(delta_b, delta_e, cfg)?.0)
}

/// Exact key rate against a direct-detection eavesdropper with
/// `δ_E = √ℰ δ_B`.
pub fn key_rate_dd(delta_b: f64, advantage: f64, cfg: &QuadratureConfig) -> Result<RateResult> {
    let depths = Depths::from_advantage(delta_b.abs(), advantage)?;
    continuous_eve_rate(Scenario::DirectDetection, depths, None, cfg)
}

/// Exact key rate against a homodyne eavesdropper whose depth follows the
/// exact coherent-state relation for the given pulse energies.
pub fn key_rate_coherent(
    delta_b: f64,
    advantage: f64,
    modulation: &ModulationScheme,
    cfg: &QuadratureConfig,
) -> Result<RateResult> {
    let modulation = ModulationScheme::new(modulation.n0, modulation.n1)?;
    let mut depths = Depths::from_advantage(delta_b.abs(), advantage)?;
    depths.delta_e_coh = depths.delta_e * modulation.coherent_depth_ratio();
    continuous_eve_rate(Scenario::Coherent, depths, Some(depths.delta_e_coh), cfg)
}

fn continuous_eve_rate(
    scenario: Scenario,
    depths: Depths,
    delta_e_coh: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<RateResult> {
    let eve_depth = delta_e_coh.unwrap_or(depths.delta_e);
    let (gain, gain_err) = conditional_gain(depths.delta_b, eve_depth, cfg)?;
    let (i_ab, i_err) = mutual_info_ab_estimate(depths.delta_b, cfg)?;
    let (h_b, h_err) = mixture_entropy_estimate(depths.delta_b, 0.5, cfg)?;
    let h_b_given_e = h_b_given_a() + gain;
    Ok(RateResult {
        scenario,
        advantage: depths.advantage,
        delta_b: depths.delta_b,
        delta_e: depths.delta_e,
        delta_e_coh,
        i_ab,
        leak: (h_b - h_b_given_e).max(0.0),
        key_rate: gain.max(0.0),
        asymptotic_estimate: key_rate_dd_asymptotic(depths.advantage)?,
        quadrature_residual: gain_err + i_err + h_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_2d;
    use crate::rates::{mixture_entropy, mutual_info_ab};

    // 40-digit mpmath values of H(B|E) through the one-dimensional reduction
    // E[ln cosh Z], Z ~ N(m, m), which is independent of the 2-D route.
    const HBE_03_095: f64 = 2.077_394_018_202_287_228_6;
    const HBE_02_20: f64 = 2.049_051_896_864_892_927_3;

    #[test]
    fn joint_density_is_normalized() {
        let cfg = QuadratureConfig::default();
        let est = integrate_2d(
            |y_b, y_e| joint_density_dd(y_b, y_e, 0.5, 1.5),
            &[-0.5, 0.5],
            &[-1.5, 1.5],
            &cfg,
        )
        .unwrap();
        assert!((est.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn no_modulation_gives_bob_alice_entropy() {
        let cfg = QuadratureConfig::default();
        for de in [0.0, 0.7, 3.0] {
            assert_eq!(h_b_given_e_dd(0.0, de, &cfg).unwrap(), h_b_given_a());
        }
    }

    #[test]
    fn blind_eve_leaves_bob_marginal() {
        let cfg = QuadratureConfig::default();
        let h = h_b_given_e_dd(1.0, 0.0, &cfg).unwrap();
        assert!((h - mixture_entropy(1.0, 0.5, &cfg).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn matches_reference_values() {
        let cfg = QuadratureConfig::default();
        assert!((h_b_given_e_dd(0.3, 0.95, &cfg).unwrap() - HBE_03_095).abs() < 1e-9);
        assert!((h_b_given_e_dd(0.2, 2.0, &cfg).unwrap() - HBE_02_20).abs() < 1e-9);
        assert!((h_b_given_e_dd(-0.3, -0.95, &cfg).unwrap() - HBE_03_095).abs() < 1e-9);
    }

    #[test]
    fn rate_result_is_consistent() {
        let cfg = QuadratureConfig::default();
        let r = key_rate_dd(0.3, 10.0, &cfg).unwrap();
        assert!((r.delta_e - 0.3 * 10f64.sqrt()).abs() < 1e-12);
        let via_mi = (r.i_ab - r.leak).max(0.0);
        assert!((r.key_rate - via_mi).abs() < 1e-8, "{} vs {}", r.key_rate, via_mi);
        assert!((r.i_ab - mutual_info_ab(0.3, &cfg).unwrap()).abs() < 1e-15);
        assert_eq!(key_rate_dd(0.0, 10.0, &cfg).unwrap().key_rate, 0.0);
        assert!(key_rate_dd(0.3, 0.0, &cfg).is_err());
    }

    #[test]
    fn coherent_rate_tracks_direct_detection() {
        let cfg = QuadratureConfig::default();
        let small = ModulationScheme::from_relative(1e6, 1e-3).unwrap();
        let large = ModulationScheme::from_relative(1e6, 0.2).unwrap();
        let dd = key_rate_dd(0.2, 10.0, &cfg).unwrap();
        let close = key_rate_coherent(0.2, 10.0, &small, &cfg).unwrap();
        let far = key_rate_coherent(0.2, 10.0, &large, &cfg).unwrap();
        assert!((close.key_rate - dd.key_rate).abs() <= 1e-6 * dd.key_rate);
        assert!(far.key_rate < dd.key_rate);
        assert_eq!(key_rate_coherent(0.0, 10.0, &small, &cfg).unwrap().key_rate, 0.0);
    }
}
