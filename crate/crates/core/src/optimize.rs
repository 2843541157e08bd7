//! Maximization of key rates over the modulation depth and sweeps over the
//! eavesdropper's advantage.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModulationScheme, Scenario};
use crate::quadrature::QuadratureConfig;
use crate::rates::{self, RateResult};

/// Number of log-spaced points in the coarse stage of [`maximize_scalar`].
pub const COARSE_POINTS: usize = 64;
/// Default search bracket for Bob's depth.
pub const DEFAULT_BRACKET: (f64, f64) = (1e-3, 12.0);

const INV_PHI: f64 = 0.618_033_988_749_894_848_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Target accuracy of the argmax.
    pub tol: f64,
    /// Coarse-grid spread below which the function is declared flat.
    pub flat_threshold: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            flat_threshold: 10.0 * QuadratureConfig::default().abs_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
    /// Set when the coarse grid saw no variation; `argmax` is then `lo` and
    /// `value` is zero.
    pub flat: bool,
    pub evaluations: usize,
}

/// Two-stage maximization: a 64-point coarse grid (log-spaced when `lo > 0`)
/// locates the best cell, then golden-section search refines within the
/// neighbouring cells until the bracket is narrower than `tol`.
pub fn maximize_scalar<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    maximize_scalar_with(
        f,
        lo,
        hi,
        &SearchOptions {
            tol,
            ..SearchOptions::default()
        },
    )
}

pub fn maximize_scalar_with<F>(mut f: F, lo: f64, hi: f64, opts: &SearchOptions) -> Result<Maximum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::Config(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Config("optimizer tolerance must be positive".into()));
    }

    let grid = coarse_grid(lo, hi);
    let mut values = Vec::with_capacity(grid.len());
    for &x in &grid {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { at: x, value: v });
        }
        values.push(v);
    }
    let mut evaluations = grid.len();

    let (best, &best_value) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("non-empty grid");
    let worst_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    if best_value - worst_value < opts.flat_threshold {
        return Ok(Maximum {
            argmax: lo,
            value: 0.0,
            flat: true,
            evaluations,
        });
    }

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(grid.len() - 1)];
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    evaluations += 2;
    while b - a > opts.tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        evaluations += 1;
    }

    let (mut argmax, mut value) = if fc >= fd { (c, fc) } else { (d, fd) };
    if !value.is_finite() || value < best_value {
        argmax = grid[best];
        value = best_value;
    }
    Ok(Maximum {
        argmax,
        value,
        flat: false,
        evaluations,
    })
}

fn coarse_grid(lo: f64, hi: f64) -> Vec<f64> {
    let last = (COARSE_POINTS - 1) as f64;
    (0..COARSE_POINTS)
        .map(|k| {
            let t = k as f64 / last;
            if k == COARSE_POINTS - 1 {
                hi
            } else if lo > 0.0 {
                lo * (hi / lo).powf(t)
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect()
}

/// Settings for rate optimization and sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub quadrature: QuadratureConfig,
    /// Search bracket for Bob's depth `δ_B`.
    pub bracket: (f64, f64),
    /// Accuracy of the optimal depth.
    pub tol: f64,
    /// Pulse energies used for the exact homodyne/Helstrom depth relation.
    /// When absent, Eve's coherent depth equals `δ_E`.
    pub modulation: Option<ModulationScheme>,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            bracket: DEFAULT_BRACKET,
            tol: 1e-6,
            modulation: None,
        }
    }
}

impl OptimizeConfig {
    fn search_options(&self) -> SearchOptions {
        SearchOptions {
            tol: self.tol,
            flat_threshold: 10.0 * self.quadrature.abs_tol,
        }
    }
}

/// Maximizes a scenario's exact key rate over `δ_B` and returns the full
/// result at the optimum.
pub fn optimal_rate(scenario: Scenario, advantage: f64, cfg: &OptimizeConfig) -> Result<RateResult> {
    crate::error::check_range(
        "advantage",
        advantage,
        advantage > 0.0 && advantage.is_finite(),
        "must be positive and finite",
    )?;
    let modulation = cfg.modulation.as_ref();
    let best = maximize_scalar_with(
        |delta_b| rates::raw_key_rate(scenario, delta_b, advantage, modulation, &cfg.quadrature),
        cfg.bracket.0,
        cfg.bracket.1,
        &cfg.search_options(),
    )?;
    let mut result = rates::key_rate(scenario, best.argmax, advantage, modulation, &cfg.quadrature)?;
    if best.flat {
        result.key_rate = 0.0;
    }
    Ok(result)
}

/// Grid of advantages for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            min: 1.0,
            max: 1e3,
            points: 25,
            log: true,
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::Config("sweep needs at least one point".into()));
        }
        if !(self.min > 0.0 && self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::Config("sweep bounds must be positive and finite".into()));
        }
        if self.points > 1 && !(self.max > self.min) {
            return Err(Error::Config("sweep max must exceed min".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.max
                } else if self.log {
                    self.min * (self.max / self.min).powf(k as f64 / last)
                } else {
                    self.min + (self.max - self.min) * k as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub advantage: f64,
    pub scenario: Scenario,
    #[serde(deserialize_with = "nan_from_null")]
    pub optimal_delta_b: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub optimal_delta_e: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal_delta_e_coh: Option<f64>,
    #[serde(deserialize_with = "nan_from_null")]
    pub key_rate_exact: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub key_rate_asymptotic: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Failed rows hold NaN, which JSON writes as `null`.
fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl SweepRow {
    fn from_result(advantage: f64, scenario: Scenario, result: Result<RateResult>) -> Self {
        match result {
            Ok(r) => Self {
                advantage,
                scenario,
                optimal_delta_b: r.delta_b,
                optimal_delta_e: r.delta_e,
                optimal_delta_e_coh: r.delta_e_coh,
                key_rate_exact: r.key_rate,
                key_rate_asymptotic: r.asymptotic_estimate,
                error: None,
            },
            Err(e) => Self {
                advantage,
                scenario,
                optimal_delta_b: f64::NAN,
                optimal_delta_e: f64::NAN,
                optimal_delta_e_coh: None,
                key_rate_exact: f64::NAN,
                key_rate_asymptotic: rates::optimal_asymptotic_rate(scenario, advantage)
                    .unwrap_or(f64::NAN),
                error: Some(e.to_string()),
            },
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub grid: SweepGrid,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn rows_for(&self, scenario: Scenario) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.scenario == scenario)
    }
}

/// Optimal rate at every grid point for each requested scenario. Rows are in
/// grid order with the scenarios interleaved per point; a failing row carries
/// its error message instead of aborting the sweep.
pub fn sweep(scenarios: &[Scenario], grid: &SweepGrid, cfg: &OptimizeConfig) -> Result<SweepTable> {
    grid.validate()?;
    if scenarios.is_empty() {
        return Err(Error::Config("sweep needs at least one scenario".into()));
    }
    let jobs: Vec<(f64, Scenario)> = grid
        .values()
        .into_iter()
        .flat_map(|adv| scenarios.iter().map(move |&s| (adv, s)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(adv, scenario)| SweepRow::from_result(adv, scenario, optimal_rate(scenario, adv, cfg)))
        .collect();
    Ok(SweepTable { grid: *grid, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_peak_of_helstrom_bracket() {
        let m = maximize_scalar(|d| Ok(d * d * (-d * d).exp()), 1e-3, 10.0, 1e-6).unwrap();
        assert!(!m.flat);
        assert!((m.argmax - 1.0).abs() <= 1e-6);
        assert!((m.value - (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn constant_function_is_flat() {
        let m = maximize_scalar(|_| Ok(3.0), 1e-3, 10.0, 1e-6).unwrap();
        assert!(m.flat);
        assert_eq!(m.argmax, 1e-3);
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn refinement_never_loses_to_coarse_grid() {
        // Narrow spike between grid points.
        let f = |x: f64| Ok(-(x - 0.5).abs().sqrt());
        let m = maximize_scalar(f, 1e-3, 10.0, 1e-8).unwrap();
        let best_coarse = coarse_grid(1e-3, 10.0)
            .into_iter()
            .map(|x| -(x - 0.5f64).abs().sqrt())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(m.value >= best_coarse);
        assert!((m.argmax - 0.5).abs() < 1e-6);
    }

    #[test]
    fn boundary_maximum() {
        let m = maximize_scalar(|x| Ok(x), 0.1, 2.0, 1e-7).unwrap();
        assert!((m.argmax - 2.0).abs() < 1e-6);
        let m = maximize_scalar(|x| Ok(-x), -1.0, 2.0, 1e-7).unwrap();
        assert!((m.argmax + 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(maximize_scalar(|x| Ok(x), 2.0, 1.0, 1e-6).is_err());
        assert!(maximize_scalar(|x| Ok(x), 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn grid_values() {
        let g = SweepGrid::default();
        let v = g.values();
        assert_eq!(v.len(), 25);
        assert_eq!(v[0], 1.0);
        assert_eq!(v[24], 1e3);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert!((v[12] - 1e3f64.sqrt()).abs() < 1e-9);
        let single = SweepGrid { min: 7.0, max: 7.0, points: 1, log: true };
        assert_eq!(single.values(), vec![7.0]);
        assert!(SweepGrid { points: 0, ..g }.validate().is_err());
    }

    #[test]
    fn sweep_rows_carry_errors() {
        let cfg = OptimizeConfig {
            quadrature: QuadratureConfig { max_nodes_1d: 15, ..QuadratureConfig::default() },
            ..OptimizeConfig::default()
        };
        let table = sweep(&[Scenario::Holevo], &SweepGrid { min: 2.0, max: 2.0, points: 1, log: true }, &cfg)
            .unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!(table.rows[0].error.is_some());

        let json = serde_json::to_string(&table).unwrap();
        let back: SweepTable = serde_json::from_str(&json).unwrap();
        assert!(back.rows[0].key_rate_exact.is_nan());
        assert_eq!(back.rows[0].error, table.rows[0].error);
    }
}
