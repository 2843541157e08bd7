//! Gaussian-weighted numerical integration.
//!
//! Integrands in this crate are smooth functions multiplied by one or more
//! unit-variance Gaussians. The domain is truncated to `±T` standard
//! deviations around every supplied center, overlapping windows are merged,
//! and each window is integrated with globally adaptive 15-point
//! Gauss–Kronrod subdivision.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and node budgets for the Gaussian-weighted integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Half-width of each integration window, in standard deviations.
    pub truncation_sigmas: f64,
    /// Integrand evaluation budget for a single one-dimensional integral.
    pub max_nodes_1d: usize,
    /// Initial node count along each axis of a two-dimensional integral.
    pub nodes_2d_per_axis: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            truncation_sigmas: 10.0,
            max_nodes_1d: 2048,
            nodes_2d_per_axis: 201,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.abs_tol) || !positive(self.rel_tol) {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if !(self.truncation_sigmas >= 6.0 && self.truncation_sigmas.is_finite()) {
            return Err(Error::Config(format!(
                "truncation_sigmas must be at least 6, got {}",
                self.truncation_sigmas
            )));
        }
        if self.max_nodes_1d < KRONROD_NODES || self.nodes_2d_per_axis == 0 {
            return Err(Error::Config("node budgets are too small".into()));
        }
        Ok(())
    }
}

/// Value of an integral together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const KRONROD_NODES: usize = 15;

// 15-point Kronrod abscissae (non-negative half, descending) and weights,
// with the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    // Largest error first; ties broken by position so the order is total and
    // the subdivision sequence is deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod_panel<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { at: x, value: v })
        }
    };

    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    let mut values = [0.0; 14];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        values[2 * j] = f1;
        values[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((values[2 * j] - mean).abs() + (values[2 * j + 1] - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let error = rescale_error((kronrod - gauss) * half, res_abs, res_asc);
    Ok(Panel { a, b, value, error })
}

// Error scaling from QUADPACK's qk15.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

/// Merged `[c − T, c + T]` windows around each center, sorted ascending.
pub fn truncated_windows(centers: &[f64], half_width: f64) -> Vec<(f64, f64)> {
    let mut windows: Vec<(f64, f64)> = centers
        .iter()
        .map(|&c| (c - half_width, c + half_width))
        .collect();
    windows.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(windows.len());
    for (a, b) in windows {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    merged
}

/// Globally adaptive integration over a set of disjoint windows, each first
/// cut into panels no wider than `panel_width`.
pub(crate) fn adaptive<F>(
    mut f: F,
    windows: &[(f64, f64)],
    panel_width: f64,
    abs_tol: f64,
    rel_tol: f64,
    budget: usize,
) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let pieces_per_window: Vec<usize> = windows
        .iter()
        .map(|&(a, b)| (((b - a) / panel_width).ceil() as usize).max(1))
        .collect();
    let initial = pieces_per_window.iter().sum::<usize>() * KRONROD_NODES;
    if initial > budget {
        return Err(Error::NonConvergence {
            evaluations: 0,
            estimate: f64::NAN,
            error: f64::INFINITY,
        });
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    for (&(a, b), &pieces) in windows.iter().zip(&pieces_per_window) {
        let step = (b - a) / pieces as f64;
        for k in 0..pieces {
            let lo = a + step * k as f64;
            let hi = if k + 1 == pieces { b } else { a + step * (k + 1) as f64 };
            heap.push(kronrod_panel(&mut f, lo, hi)?);
            evaluations += KRONROD_NODES;
        }
    }

    loop {
        let (value, error) = totals(&heap);
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Estimate {
                value,
                error,
                evaluations,
            });
        }
        if evaluations + 2 * KRONROD_NODES > budget {
            return Err(Error::NonConvergence {
                evaluations,
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel cannot be split further in floating point.
            return Err(Error::NonConvergence {
                evaluations,
                estimate: value,
                error,
            });
        }
        heap.push(kronrod_panel(&mut f, worst.a, mid)?);
        heap.push(kronrod_panel(&mut f, mid, worst.b)?);
        evaluations += 2 * KRONROD_NODES;
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    // Sum in position order so the result does not depend on heap layout.
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

const PANEL_WIDTH_1D: f64 = 2.0;

/// Integrates `f` over the union of `±T` windows around `centers`.
pub fn integrate_1d<F>(f: F, centers: &[f64], cfg: &QuadratureConfig) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let windows = checked_windows(centers, cfg)?;
    adaptive(
        |x| Ok(f(x)),
        &windows,
        PANEL_WIDTH_1D,
        cfg.abs_tol,
        cfg.rel_tol,
        cfg.max_nodes_1d,
    )
}

/// Iterated integral `∫dx ∫dy f(x, y)` over the product of the truncated
/// windows along each axis.
///
/// The outer integrand is itself an adaptive integral along `y`; the inner
/// tolerance is scaled by the outer domain length so the accumulated inner
/// error stays within `abs_tol`.
pub fn integrate_2d<F>(
    f: F,
    centers_x: &[f64],
    centers_y: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64,
{
    cfg.validate()?;
    let windows_x = checked_windows(centers_x, cfg)?;
    let windows_y = checked_windows(centers_y, cfg)?;
    let length_x: f64 = windows_x.iter().map(|(a, b)| b - a).sum();
    let panel_width = |windows: &[(f64, f64)]| {
        let length: f64 = windows.iter().map(|(a, b)| b - a).sum();
        let panels = (cfg.nodes_2d_per_axis / KRONROD_NODES).max(1);
        length / panels as f64
    };
    let inner_width = panel_width(&windows_y);
    let inner_abs = cfg.abs_tol / length_x;

    let mut inner_error = 0.0f64;
    let mut inner_evaluations = 0usize;
    let outer = adaptive(
        |x| {
            let inner = adaptive(
                |y| Ok(f(x, y)),
                &windows_y,
                inner_width,
                inner_abs,
                cfg.rel_tol,
                cfg.max_nodes_1d,
            )?;
            inner_error = inner_error.max(inner.error);
            inner_evaluations += inner.evaluations;
            Ok(inner.value)
        },
        &windows_x,
        panel_width(&windows_x),
        cfg.abs_tol,
        cfg.rel_tol,
        cfg.max_nodes_1d,
    )?;
    Ok(Estimate {
        value: outer.value,
        error: outer.error + inner_error * length_x,
        evaluations: inner_evaluations,
    })
}

fn checked_windows(centers: &[f64], cfg: &QuadratureConfig) -> Result<Vec<(f64, f64)>> {
    if centers.is_empty() {
        return Err(Error::Config("at least one integration center is required".into()));
    }
    if let Some(&c) = centers.iter().find(|c| !c.is_finite()) {
        return Err(Error::Domain {
            name: "center",
            value: c,
            reason: "integration centers must be finite",
        });
    }
    Ok(truncated_windows(centers, cfg.truncation_sigmas))
}

/// `ln cosh x` without overflow: `|x| + ln(1 + e^{−2|x|}) − ln 2`.
#[inline]
pub fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `ln(e^a + e^b)`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `1 / (1 + e^{−x})`, accurate in both tails.
#[inline]
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_677_939_946_059_934_381_9;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    // 40-digit mpmath value of ln cosh 2.5.
    const LOG_COSH_2_5: f64 = 1.813_568_167_929_172_759_199_184_566;

    #[test]
    fn normal_pdf_is_normalized() {
        let cfg = QuadratureConfig::default();
        let est = integrate_1d(normal_pdf, &[0.0], &cfg).unwrap();
        assert!((est.value - 1.0).abs() < cfg.abs_tol);
        let var = integrate_1d(|y| y * y * normal_pdf(y), &[0.0], &cfg).unwrap();
        assert!((var.value - 1.0).abs() < cfg.abs_tol);
    }

    #[test]
    fn split_centers_are_merged_or_kept_apart() {
        assert_eq!(truncated_windows(&[0.0, 1.0], 10.0), vec![(-10.0, 11.0)]);
        assert_eq!(
            truncated_windows(&[30.0, -30.0], 10.0),
            vec![(-40.0, -20.0), (20.0, 40.0)]
        );
        let cfg = QuadratureConfig::default();
        let est = integrate_1d(
            |y| 0.5 * (normal_pdf(y - 30.0) + normal_pdf(y + 30.0)),
            &[-30.0, 30.0],
            &cfg,
        )
        .unwrap();
        assert!((est.value - 1.0).abs() < cfg.abs_tol);
    }

    #[test]
    fn product_of_normals_is_normalized() {
        let cfg = QuadratureConfig::default();
        let est = integrate_2d(|x, y| normal_pdf(x) * normal_pdf(y), &[0.0], &[0.0], &cfg).unwrap();
        assert!((est.value - 1.0).abs() < cfg.abs_tol, "{}", est.value - 1.0);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let cfg = QuadratureConfig::default();
        let err = integrate_1d(|y| if y > 1.0 { f64::NAN } else { 1.0 }, &[0.0], &cfg).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadratureConfig {
            max_nodes_1d: 200,
            ..QuadratureConfig::default()
        };
        // Discontinuous integrand cannot reach 1e-10 within 200 nodes.
        let err = integrate_1d(|y| if y > 0.123 { 1.0 } else { 0.0 }, &[0.0], &cfg).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = QuadratureConfig {
            truncation_sigmas: 4.0,
            ..QuadratureConfig::default()
        };
        assert!(integrate_1d(normal_pdf, &[0.0], &cfg).is_err());
        assert!(integrate_1d(normal_pdf, &[], &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn log_cosh_values() {
        assert_eq!(log_cosh(0.0), 0.0);
        assert!((log_cosh(1000.0) - (1000.0 - LN_2)).abs() < 1e-12);
        assert!((log_cosh(-1000.0) - (1000.0 - LN_2)).abs() < 1e-12);
        assert!((log_cosh(2.5) - LOG_COSH_2_5).abs() < 1e-15);
        assert!(log_cosh(f64::MAX / 2.0).is_finite());
    }

    #[test]
    fn logistic_and_log_add_exp() {
        assert_eq!(logistic(0.0), 0.5);
        assert!(logistic(-800.0) > 0.0 || logistic(-800.0) == 0.0);
        assert!((logistic(-40.0) - (-40f64).exp()).abs() < 1e-30);
        assert!((log_add_exp(0.0, 0.0) - LN_2).abs() < 1e-16);
        assert!((log_add_exp(-1000.0, -1000.0) - (-1000.0 + LN_2)).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn even_integrands_are_mirror_invariant(c1 in -4.0f64..4.0, c2 in -4.0f64..4.0, s in 0.2f64..3.0) {
            let cfg = QuadratureConfig::default();
            let f = |y: f64| normal_pdf(y / s) * (1.0 + (s * y).cos().powi(2)) * log_cosh(y).exp().recip();
            let a = integrate_1d(f, &[c1, c2], &cfg).unwrap().value;
            let b = integrate_1d(f, &[-c1, -c2], &cfg).unwrap().value;
            proptest::prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        }
    }
}
