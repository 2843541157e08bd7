//! Collective eavesdropping bounded by the Holevo quantity of the artificial
//! Bob-to-Eve channel.

use super::{check_depth, key_rate_holevo_asymptotic, mutual_info_ab_estimate, RateResult};
use crate::error::Result;
use crate::model::{coherent_mixture_entropy, mixture_entropy_from_weights, Depths, Scenario};
use crate::quadrature::{integrate_1d, logistic, normal_pdf, QuadratureConfig};

/// `χ(B;E) = S[ρ_E] − ∫ p(y_B) S[ρ_{E|B=y_B}] dy_B`, in bits.
pub fn holevo_chi(delta_b: f64, delta_e: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(chi_estimate(delta_b, delta_e, cfg)?.0)
}

pub(crate) fn chi_estimate(delta_b: f64, delta_e: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let db = check_depth("delta_b", delta_b)?;
    let de = check_depth("delta_e", delta_e)?;
    let q = (-de * de).exp();
    let marginal = coherent_mixture_entropy(0.5, q)?;
    if db == 0.0 || marginal == 0.0 {
        return Ok((0.0, 0.0));
    }

    // The conditional state depends on y_B only through p(1 − p), which is
    // even in y_B, so the symmetric marginal of y_B reduces to one component.
    // Integrating S[ρ_E] − S[ρ_E|y] keeps the integrand on the scale of χ.
    let est = integrate_1d(
        |y| {
            let weights = logistic(-2.0 * db * y) * logistic(2.0 * db * y);
            // Out-of-range radicands surface as a non-finite integrand error.
            let s = mixture_entropy_from_weights(weights, q).unwrap_or(f64::NAN);
            normal_pdf(y - db) * (marginal - s)
        },
        &[db],
        cfg,
    )?;
    Ok((est.value.clamp(0.0, 1.0), est.error))
}

/// Key rate `max(I(A;B) − χ(B;E), 0)` with `δ_E = √ℰ δ_B`.
pub fn key_rate_holevo(delta_b: f64, advantage: f64, cfg: &QuadratureConfig) -> Result<RateResult> {
    let depths = Depths::from_advantage(delta_b.abs(), advantage)?;
    let (i_ab, i_err) = mutual_info_ab_estimate(depths.delta_b, cfg)?;
    let (chi, chi_err) = chi_estimate(depths.delta_b, depths.delta_e, cfg)?;
    Ok(RateResult {
        scenario: Scenario::Holevo,
        advantage,
        delta_b: depths.delta_b,
        delta_e: depths.delta_e,
        delta_e_coh: None,
        i_ab,
        leak: chi,
        key_rate: (i_ab - chi).max(0.0),
        asymptotic_estimate: key_rate_holevo_asymptotic(advantage)?,
        quadrature_residual: i_err + chi_err,
    })
}
