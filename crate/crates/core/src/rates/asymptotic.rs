//! Strong-eavesdropping (`ℰ ≫ 1`) approximations. In that limit every
//! optimized rate scales as `C · log₂e / (2ℰ)` with a scenario constant `C`.

use std::f64::consts::LOG2_E;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};
use crate::model::Scenario;
use crate::optimize::{maximize_scalar_with, SearchOptions, DEFAULT_BRACKET};
use crate::quadrature::{integrate_1d, normal_pdf, QuadratureConfig};

/// Optimized constant for the Helstrom scenario, `max δ² e^{−δ²} = 1/e`.
pub const HELSTROM_CONSTANT: f64 = 0.367_879_441_171_442_321_6;

/// A maximized asymptotic bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub value: f64,
    /// Eve's depth at which the bracket peaks.
    pub argmax: f64,
    /// Width of the final optimizer bracket.
    pub optimizer_residual: f64,
    /// Quadrature error of the bracket at the optimum (zero for closed forms).
    pub quadrature_residual: f64,
}

/// `δ²(2 − ∫ φ(t − δ) (sinh 2δt + 1)/cosh² δt dt)`, the direct-detection
/// bracket.
pub fn gamma_bracket(delta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(gamma_bracket_estimate(delta, cfg)?.0)
}

fn gamma_bracket_estimate(delta: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    check_range("delta", delta, delta >= 0.0 && delta.is_finite(), "must be non-negative")?;
    let d = delta;
    // (sinh 2x + 1)/cosh² x = 2 tanh x + sech² x, which cannot overflow.
    let est = integrate_1d(
        |t| {
            let x = d * t;
            let sech = 1.0 / x.cosh();
            normal_pdf(t - d) * (2.0 * x.tanh() + sech * sech)
        },
        &[d],
        cfg,
    )?;
    Ok((d * d * (2.0 - est.value), d * d * est.error))
}

/// `δ²[1 − 2 arcoth(e^{δ²/2}) sinh(δ²/2)]`, the collective-attack bracket.
pub fn chi_bracket(delta: f64) -> f64 {
    let d2 = delta * delta;
    let s = 0.5 * d2;
    if s == 0.0 {
        return 0.0;
    }
    let inner = if d2 < 1e-4 {
        chi_inner_series(s)
    } else {
        chi_inner_direct(s)
    };
    d2 * inner
}

// Removable limit at δ → 0: arcoth(e^s) = ½ ln coth(s/2) ≈ ½[ln(2/s) + s²/12].
fn chi_inner_series(s: f64) -> f64 {
    let l = (2.0 / s).ln();
    1.0 - s * l - s * s * s * (1.0 / 12.0 + l / 6.0)
}

// 2 arcoth(e^s) = ln((e^s + 1)/(e^s − 1)) = ln(1 + 2/expm1(s)).
fn chi_inner_direct(s: f64) -> f64 {
    1.0 - s.sinh() * (2.0 / s.exp_m1()).ln_1p()
}

/// `δ² e^{−δ²}`, the Helstrom bracket.
pub fn helstrom_bracket(delta: f64) -> f64 {
    let d2 = delta * delta;
    d2 * (-d2).exp()
}

fn search_options(cfg: &QuadratureConfig) -> SearchOptions {
    SearchOptions {
        tol: 1e-9,
        flat_threshold: 10.0 * cfg.abs_tol,
    }
}

/// `γ`, the maximum of [`gamma_bracket`] over `δ ≥ 0`.
pub fn gamma_constant(cfg: &QuadratureConfig) -> Result<Constant> {
    let opts = search_options(cfg);
    let best = maximize_scalar_with(
        |d| gamma_bracket(d, cfg),
        DEFAULT_BRACKET.0,
        DEFAULT_BRACKET.1,
        &opts,
    )?;
    let (_, quad_err) = gamma_bracket_estimate(best.argmax, cfg)?;
    Ok(Constant {
        value: best.value,
        argmax: best.argmax,
        optimizer_residual: opts.tol,
        quadrature_residual: quad_err,
    })
}

/// `χ`, the maximum of [`chi_bracket`] over `δ ≥ 0`.
pub fn chi_constant(cfg: &QuadratureConfig) -> Result<Constant> {
    let opts = search_options(cfg);
    let best = maximize_scalar_with(
        |d| Ok(chi_bracket(d)),
        DEFAULT_BRACKET.0,
        DEFAULT_BRACKET.1,
        &opts,
    )?;
    Ok(Constant {
        value: best.value,
        argmax: best.argmax,
        optimizer_residual: opts.tol,
        quadrature_residual: 0.0,
    })
}

fn default_gamma() -> Result<f64> {
    static GAMMA: OnceLock<std::result::Result<f64, crate::error::Error>> = OnceLock::new();
    GAMMA
        .get_or_init(|| gamma_constant(&QuadratureConfig::default()).map(|c| c.value))
        .clone()
}

fn default_chi() -> Result<f64> {
    static CHI: OnceLock<std::result::Result<f64, crate::error::Error>> = OnceLock::new();
    CHI.get_or_init(|| chi_constant(&QuadratureConfig::default()).map(|c| c.value))
        .clone()
}

fn scale(advantage: f64) -> Result<f64> {
    check_range(
        "advantage",
        advantage,
        advantage > 0.0 && advantage.is_finite(),
        "must be positive and finite",
    )?;
    Ok(LOG2_E / (2.0 * advantage))
}

/// `γ · log₂e / (2ℰ)`.
pub fn key_rate_dd_asymptotic(advantage: f64) -> Result<f64> {
    Ok(default_gamma()? * scale(advantage)?)
}

/// `χ · log₂e / (2ℰ)`.
pub fn key_rate_holevo_asymptotic(advantage: f64) -> Result<f64> {
    Ok(default_chi()? * scale(advantage)?)
}

/// `(log₂e / 2ℰ) · δ² e^{−δ²}` at Eve's coherent depth `δ`.
pub fn key_rate_helstrom_asymptotic(delta_e_coh: f64, advantage: f64) -> Result<f64> {
    check_range(
        "delta_e_coh",
        delta_e_coh,
        delta_e_coh >= 0.0 && delta_e_coh.is_finite(),
        "must be non-negative",
    )?;
    Ok(helstrom_bracket(delta_e_coh) * scale(advantage)?)
}

/// `(1/e) · log₂e / (2ℰ)`.
pub fn key_rate_helstrom_asymptotic_optimal(advantage: f64) -> Result<f64> {
    Ok(HELSTROM_CONSTANT * scale(advantage)?)
}

/// Optimized asymptotic rate for any scenario; homodyne shares the
/// direct-detection constant.
pub fn optimal_asymptotic_rate(scenario: Scenario, advantage: f64) -> Result<f64> {
    match scenario {
        Scenario::DirectDetection | Scenario::Coherent => key_rate_dd_asymptotic(advantage),
        Scenario::Helstrom => key_rate_helstrom_asymptotic_optimal(advantage),
        Scenario::Holevo => key_rate_holevo_asymptotic(advantage),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // 40-digit mpmath maxima of the two brackets.
    const GAMMA: f64 = 0.479_515_970_635_133_484_4;
    const GAMMA_ARGMAX: f64 = 1.228_141_127_389_837_465_6;
    const CHI: f64 = 0.268_298_701_346_850_592_2;
    const CHI_ARGMAX: f64 = 0.947_712_398_672_060_238_1;

    #[test]
    fn gamma_matches_reference() {
        let c = gamma_constant(&QuadratureConfig::default()).unwrap();
        assert!((c.value - 0.4795).abs() < 5e-4);
        assert!((c.value - GAMMA).abs() < 1e-9, "{}", c.value);
        assert!((c.argmax - GAMMA_ARGMAX).abs() < 1e-4);
    }

    #[test]
    fn chi_matches_reference() {
        let c = chi_constant(&QuadratureConfig::default()).unwrap();
        assert!((c.value - 0.2683).abs() < 5e-4);
        assert!((c.value - CHI).abs() < 1e-12, "{}", c.value);
        assert!((c.argmax - CHI_ARGMAX).abs() < 1e-5);
    }

    #[test]
    fn gamma_bracket_matches_tanh_identity() {
        // E[tanh(δt)] = E[tanh²(δt)] under N(δ, 1) turns the bracket into
        // δ²(1 − E[tanh δt]).
        let cfg = QuadratureConfig::default();
        for d in [0.2, 0.9, 1.7, 3.5] {
            let e_tanh = integrate_1d(|t| normal_pdf(t - d) * (d * t).tanh(), &[d], &cfg).unwrap().value;
            let expected = d * d * (1.0 - e_tanh);
            assert!((gamma_bracket(d, &cfg).unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn chi_bracket_series_branch_is_continuous() {
        for s in [1e-6, 1e-5, 5e-5] {
            assert!((chi_inner_series(s) - chi_inner_direct(s)).abs() < 1e-13);
        }
        assert_eq!(chi_bracket(0.0), 0.0);
        assert!(chi_bracket(12.0).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_rates() {
        let g = gamma_constant(&QuadratureConfig::default()).unwrap().value;
        assert!((key_rate_dd_asymptotic(1.0).unwrap() - g * LOG2_E / 2.0).abs() < 1e-15);
        let x = key_rate_helstrom_asymptotic(1.0, 7.0).unwrap();
        assert!((x - LOG2_E / 14.0 * (-1f64).exp()).abs() < 1e-15);
        assert_eq!(key_rate_helstrom_asymptotic(0.0, 7.0).unwrap(), 0.0);
        let y = key_rate_helstrom_asymptotic(2.0, 10.0).unwrap();
        assert!((y - LOG2_E / 20.0 * 4.0 * (-4f64).exp()).abs() < 1e-16);
        assert!((HELSTROM_CONSTANT - (-1f64).exp()).abs() < 1e-17);
        assert!(key_rate_holevo_asymptotic(-1.0).is_err());
    }
}
