//! C ABI for `okd-core`.
//!
//! Every function returns an [`OkdStatus`] and writes results through out
//! pointers. On failure the out pointers are left untouched and
//! [`okd_last_error`] describes the failure on the calling thread. Handles
//! ([`OkdConfig`], [`OkdSweep`]) are opaque and must be released with their
//! `_free` function. A null `OkdConfig` pointer selects the library
//! defaults. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use okd_core::model::{self, ChannelParams, ModulationScheme, Scenario};
use okd_core::montecarlo::{self, SimConfig};
use okd_core::optimize::{self, OptimizeConfig, SweepGrid, SweepRow, SweepTable};
use okd_core::rates::{self, Constant, RateResult};
use okd_core::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OkdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonConvergence = 3,
    Numeric = 4,
    InsufficientSamples = 5,
    IndexOutOfRange = 6,
    Panic = 7,
}

/// Eavesdropping strategy. Functions accept it as `int32_t` so that
/// out-of-range values are reported rather than undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OkdScenario {
    DirectDetection = 0,
    Coherent = 1,
    Helstrom = 2,
    Holevo = 3,
}

impl From<Scenario> for OkdScenario {
    fn from(s: Scenario) -> Self {
        match s {
            Scenario::DirectDetection => OkdScenario::DirectDetection,
            Scenario::Coherent => OkdScenario::Coherent,
            Scenario::Helstrom => OkdScenario::Helstrom,
            Scenario::Holevo => OkdScenario::Holevo,
        }
    }
}

fn scenario_from(raw: i32) -> Result<Scenario, Failure> {
    match raw {
        0 => Ok(Scenario::DirectDetection),
        1 => Ok(Scenario::Coherent),
        2 => Ok(Scenario::Helstrom),
        3 => Ok(Scenario::Holevo),
        _ => Err(Failure::new(OkdStatus::InvalidArgument, format!("unknown scenario {raw}"))),
    }
}

/// Rate-computation settings. Opaque.
#[derive(Debug, Clone, Default)]
pub struct OkdConfig {
    inner: OptimizeConfig,
}

/// Results of a sweep. Opaque.
#[derive(Debug)]
pub struct OkdSweep {
    table: SweepTable,
}

/// Key rate and its ingredients, in bits per round. `delta_e_coh` is NaN
/// when the scenario has no coherent depth.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OkdRate {
    pub scenario: OkdScenario,
    pub advantage: f64,
    pub delta_b: f64,
    pub delta_e: f64,
    pub delta_e_coh: f64,
    pub i_ab: f64,
    pub leak: f64,
    pub key_rate: f64,
    pub asymptotic_estimate: f64,
    pub quadrature_residual: f64,
}

impl From<&RateResult> for OkdRate {
    fn from(r: &RateResult) -> Self {
        Self {
            scenario: r.scenario.into(),
            advantage: r.advantage,
            delta_b: r.delta_b,
            delta_e: r.delta_e,
            delta_e_coh: r.delta_e_coh.unwrap_or(f64::NAN),
            i_ab: r.i_ab,
            leak: r.leak,
            key_rate: r.key_rate,
            asymptotic_estimate: r.asymptotic_estimate,
            quadrature_residual: r.quadrature_residual,
        }
    }
}

/// One sweep row. Failed rows carry a non-`Ok` status, NaN rates and their
/// message is available from [`okd_sweep_row_error`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OkdSweepRow {
    pub advantage: f64,
    pub scenario: OkdScenario,
    pub optimal_delta_b: f64,
    pub optimal_delta_e: f64,
    pub optimal_delta_e_coh: f64,
    pub key_rate: f64,
    pub key_rate_asymptotic: f64,
    pub status: OkdStatus,
}

impl From<&SweepRow> for OkdSweepRow {
    fn from(r: &SweepRow) -> Self {
        Self {
            advantage: r.advantage,
            scenario: r.scenario.into(),
            optimal_delta_b: r.optimal_delta_b,
            optimal_delta_e: r.optimal_delta_e,
            optimal_delta_e_coh: r.optimal_delta_e_coh.unwrap_or(f64::NAN),
            key_rate: r.key_rate_exact,
            key_rate_asymptotic: r.key_rate_asymptotic,
            status: if r.is_ok() { OkdStatus::Ok } else { OkdStatus::Numeric },
        }
    }
}

/// A strong-eavesdropping constant with its maximizing depth.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OkdConstant {
    pub value: f64,
    pub argmax: f64,
    pub optimizer_residual: f64,
    pub quadrature_residual: f64,
}

impl From<Constant> for OkdConstant {
    fn from(c: Constant) -> Self {
        Self {
            value: c.value,
            argmax: c.argmax,
            optimizer_residual: c.optimizer_residual,
            quadrature_residual: c.quadrature_residual,
        }
    }
}

/// Monte Carlo key-rate estimate. `eve_error_rate` is NaN unless the
/// scenario is Helstrom.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OkdMcEstimate {
    pub key_rate: f64,
    pub std_error: f64,
    pub i_ab: f64,
    pub i_ab_std_error: f64,
    pub i_be: f64,
    pub i_be_std_error: f64,
    pub eve_error_rate: f64,
    pub rounds: u64,
}

struct Failure {
    status: OkdStatus,
    message: String,
}

impl Failure {
    fn new(status: OkdStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn null(name: &str) -> Self {
        Self::new(OkdStatus::NullPointer, format!("{name} is null"))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain { .. } | Error::Config(_) => OkdStatus::InvalidArgument,
            Error::NonConvergence { .. } => OkdStatus::NonConvergence,
            Error::NonFinite { .. } | Error::Numeric(_) => OkdStatus::Numeric,
            Error::InsufficientSamples { .. } => OkdStatus::InsufficientSamples,
        };
        Self::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("interior nuls removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Runs `f`, converting errors and panics into a status and recording the
/// message for [`okd_last_error`].
fn guard<F>(f: F) -> OkdStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let what = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(Failure::new(OkdStatus::Panic, format!("internal panic: {what}")))
    });
    match outcome {
        Ok(()) => {
            set_last_error(None);
            OkdStatus::Ok
        }
        Err(failure) => {
            set_last_error(Some(failure.message));
            failure.status
        }
    }
}

/// Writes through a caller-provided out pointer.
///
/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(name));
    }
    out.write(value);
    Ok(())
}

/// # Safety
/// `cfg` must be null or a live handle from [`okd_config_new`].
unsafe fn config_or_default(cfg: *const OkdConfig) -> OptimizeConfig {
    cfg.as_ref().map(|c| c.inner).unwrap_or_default()
}

/// # Safety
/// `cfg` must be null or a live handle from [`okd_config_new`].
unsafe fn config_mut<'a>(cfg: *mut OkdConfig) -> Result<&'a mut OkdConfig, Failure> {
    cfg.as_mut().ok_or_else(|| Failure::null("config"))
}

/// Message for the most recent failure on this thread, or null after a
/// success. The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn okd_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code; unknown codes are described as such.
#[no_mangle]
pub extern "C" fn okd_status_message(status: i32) -> *const c_char {
    let msg: &'static CStr = match status {
        0 => c"ok",
        1 => c"null pointer argument",
        2 => c"invalid argument",
        3 => c"numerical non-convergence",
        4 => c"numerical failure",
        5 => c"insufficient samples",
        6 => c"index out of range",
        7 => c"internal panic",
        _ => c"unknown status",
    };
    msg.as_ptr()
}

/// New configuration with library defaults, or null on allocation failure.
#[no_mangle]
pub extern "C" fn okd_config_new() -> *mut OkdConfig {
    catch_unwind(|| Box::into_raw(Box::<OkdConfig>::default())).unwrap_or(ptr::null_mut())
}

/// # Safety
/// `cfg` must be null or a handle from [`okd_config_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn okd_config_free(cfg: *mut OkdConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Sets a quadrature setting and validates the result; the configuration is
/// unchanged on failure.
unsafe fn update_quadrature<F>(cfg: *mut OkdConfig, edit: F) -> OkdStatus
where
    F: FnOnce(&mut okd_core::QuadratureConfig),
{
    guard(|| {
        let cfg = config_mut(cfg)?;
        let mut q = cfg.inner.quadrature;
        edit(&mut q);
        q.validate()?;
        cfg.inner.quadrature = q;
        Ok(())
    })
}

/// Absolute and relative quadrature tolerances.
///
/// # Safety
/// `cfg` must be a live handle from [`okd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn okd_config_set_tolerances(cfg: *mut OkdConfig, abs_tol: f64, rel_tol: f64) -> OkdStatus {
    update_quadrature(cfg, |q| {
        q.abs_tol = abs_tol;
        q.rel_tol = rel_tol;
    })
}

/// Integration window half-width in standard deviations.
///
/// # Safety
/// `cfg` must be a live handle from [`okd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn okd_config_set_truncation(cfg: *mut OkdConfig, sigmas: f64) -> OkdStatus {
    update_quadrature(cfg, |q| q.truncation_sigmas = sigmas)
}

/// Integrand evaluations allowed per one-dimensional integral.
///
/// # Safety
/// `cfg` must be a live handle from [`okd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn okd_config_set_max_evaluations(cfg: *mut OkdConfig, evaluations: usize) -> OkdStatus {
    update_quadrature(cfg, |q| q.max_nodes_1d = evaluations)
}

/// Search bracket and accuracy for the optimal depth `δ_B`.
///
/// # Safety
/// `cfg` must be a live handle from [`okd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn okd_config_set_search(cfg: *mut OkdConfig, lo: f64, hi: f64, tol: f64) -> OkdStatus {
    guard(|| {
        let cfg = config_mut(cfg)?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi && tol > 0.0) {
            return Err(Failure::new(
                OkdStatus::InvalidArgument,
                "bracket must be finite and increasing, tolerance positive",
            ));
        }
        cfg.inner.bracket = (lo, hi);
        cfg.inner.tol = tol;
        Ok(())
    })
}

/// Pulse energies fixing Eve's coherent depth for the homodyne and Helstrom
/// scenarios.
///
/// # Safety
/// `cfg` must be a live handle from [`okd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn okd_config_set_modulation(cfg: *mut OkdConfig, n0: f64, n1: f64) -> OkdStatus {
    guard(|| {
        let cfg = config_mut(cfg)?;
        cfg.inner.modulation = Some(ModulationScheme::new(n0, n1)?);
        Ok(())
    })
}

/// Drops the modulation so that Eve's coherent depth equals `δ_E`.
///
/// # Safety
/// `cfg` must be a live handle from [`okd_config_new`].
#[no_mangle]
pub unsafe extern "C" fn okd_config_clear_modulation(cfg: *mut OkdConfig) -> OkdStatus {
    guard(|| {
        config_mut(cfg)?.inner.modulation = None;
        Ok(())
    })
}

/// Key rate at a fixed depth `δ_B`.
///
/// # Safety
/// `cfg` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn okd_key_rate(
    cfg: *const OkdConfig,
    scenario: i32,
    delta_b: f64,
    advantage: f64,
    out: *mut OkdRate,
) -> OkdStatus {
    guard(|| {
        let c = config_or_default(cfg);
        let r = rates::key_rate(scenario_from(scenario)?, delta_b, advantage, c.modulation.as_ref(), &c.quadrature)?;
        write_out(out, OkdRate::from(&r), "out")
    })
}

/// Key rate maximized over `δ_B`.
///
/// # Safety
/// `cfg` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn okd_optimal_rate(
    cfg: *const OkdConfig,
    scenario: i32,
    advantage: f64,
    out: *mut OkdRate,
) -> OkdStatus {
    guard(|| {
        let c = config_or_default(cfg);
        let r = optimize::optimal_rate(scenario_from(scenario)?, advantage, &c)?;
        write_out(out, OkdRate::from(&r), "out")
    })
}

/// `ℰ = ((τ_E/σ_E)/(τ_B/σ_B))²`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn okd_eavesdropper_advantage(
    tau_b: f64,
    tau_e: f64,
    sigma_b: f64,
    sigma_e: f64,
    out: *mut f64,
) -> OkdStatus {
    guard(|| {
        // Excess noise and pulse energy do not enter this form.
        let ch = ChannelParams::new(tau_b, tau_e, sigma_b, sigma_e, 0.0, 1.0)?;
        write_out(out, model::eavesdropper_advantage(&ch)?, "out")
    })
}

/// Advantage against a shot-noise-limited eavesdropper when Bob has excess
/// noise variance `excess`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn okd_shot_noise_advantage(
    tau_b: f64,
    tau_e: f64,
    n_bar: f64,
    excess: f64,
    out: *mut f64,
) -> OkdStatus {
    guard(|| write_out(out, model::shot_noise_advantage(tau_b, tau_e, n_bar, excess)?, "out"))
}

/// Minimum error probability for discriminating the two coherent states.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn okd_helstrom_error_probability(delta_e_coh: f64, out: *mut f64) -> OkdStatus {
    guard(|| write_out(out, model::helstrom_error_probability(delta_e_coh)?, "out"))
}

/// Von Neumann entropy (bits) of a mixture of two pure states with weights
/// `p`, `1 − p` and squared overlap `q`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn okd_coherent_mixture_entropy(p: f64, q: f64, out: *mut f64) -> OkdStatus {
    guard(|| write_out(out, model::coherent_mixture_entropy(p, q)?, "out"))
}

/// Direct-detection constant γ ≈ 0.4795.
///
/// # Safety
/// `cfg` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn okd_gamma_constant(cfg: *const OkdConfig, out: *mut OkdConstant) -> OkdStatus {
    guard(|| {
        let c = config_or_default(cfg);
        write_out(out, rates::gamma_constant(&c.quadrature)?.into(), "out")
    })
}

/// Collective-attack constant χ ≈ 0.2683.
///
/// # Safety
/// `cfg` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn okd_chi_constant(cfg: *const OkdConfig, out: *mut OkdConstant) -> OkdStatus {
    guard(|| {
        let c = config_or_default(cfg);
        write_out(out, rates::chi_constant(&c.quadrature)?.into(), "out")
    })
}

/// Optimal rates over `points` advantages in `[min, max]` (log-spaced when
/// `log` is true) for each of `n_scenarios` scenarios. On success `*out`
/// receives a handle to free with [`okd_sweep_free`].
///
/// # Safety
/// `cfg` must be null or a live handle; `scenarios` must point to
/// `n_scenarios` values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn okd_sweep_run(
    cfg: *const OkdConfig,
    scenarios: *const i32,
    n_scenarios: usize,
    min: f64,
    max: f64,
    points: usize,
    log: bool,
    out: *mut *mut OkdSweep,
) -> OkdStatus {
    guard(|| {
        if scenarios.is_null() {
            return Err(Failure::null("scenarios"));
        }
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let list = std::slice::from_raw_parts(scenarios, n_scenarios)
            .iter()
            .map(|&s| scenario_from(s))
            .collect::<Result<Vec<_>, _>>()?;
        let grid = SweepGrid { min, max, points, log };
        let table = optimize::sweep(&list, &grid, &config_or_default(cfg))?;
        write_out(out, Box::into_raw(Box::new(OkdSweep { table })), "out")
    })
}

/// Number of rows in a sweep, or 0 for a null handle.
///
/// # Safety
/// `sweep` must be null or a live handle from [`okd_sweep_run`].
#[no_mangle]
pub unsafe extern "C" fn okd_sweep_len(sweep: *const OkdSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.table.rows.len())
}

/// Copies row `index` into `out`.
///
/// # Safety
/// `sweep` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn okd_sweep_row(sweep: *const OkdSweep, index: usize, out: *mut OkdSweepRow) -> OkdStatus {
    guard(|| {
        let s = sweep.as_ref().ok_or_else(|| Failure::null("sweep"))?;
        let row = s.table.rows.get(index).ok_or_else(|| {
            Failure::new(
                OkdStatus::IndexOutOfRange,
                format!("row {index} of {}", s.table.rows.len()),
            )
        })?;
        write_out(out, OkdSweepRow::from(row), "out")
    })
}

/// Error message of a failed row, or null for a successful row or bad
/// arguments. Valid until the sweep is freed.
///
/// # Safety
/// `sweep` must be null or a live handle from [`okd_sweep_run`].
#[no_mangle]
pub unsafe extern "C" fn okd_sweep_row_error(sweep: *const OkdSweep, index: usize) -> *const c_char {
    thread_local! {
        static ROW_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
    }
    let message = sweep
        .as_ref()
        .and_then(|s| s.table.rows.get(index))
        .and_then(|r| r.error.as_deref())
        .map(|m| CString::new(m.replace('\0', " ")).expect("interior nuls removed"));
    ROW_ERROR.with(|slot| {
        *slot.borrow_mut() = message;
        slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr())
    })
}

/// # Safety
/// `sweep` must be null or a handle from [`okd_sweep_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn okd_sweep_free(sweep: *mut OkdSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// Monte Carlo estimate of the key rate at depth `δ_B` from `rounds`
/// simulated rounds. Eve's coherent depth follows the configuration's
/// modulation. The Holevo scenario is rejected.
///
/// # Safety
/// `cfg` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn okd_simulate_key_rate(
    cfg: *const OkdConfig,
    scenario: i32,
    delta_b: f64,
    advantage: f64,
    rounds: u64,
    seed: u64,
    bins: usize,
    bootstrap_resamples: usize,
    out: *mut OkdMcEstimate,
) -> OkdStatus {
    guard(|| {
        let c = config_or_default(cfg);
        let scenario = scenario_from(scenario)?;
        let depths = rates::scenario_depths(scenario, delta_b, advantage, c.modulation.as_ref())?;
        let sim = SimConfig {
            rounds,
            seed,
            bins,
            bootstrap_resamples,
            ..SimConfig::new(scenario, depths)
        };
        let est = montecarlo::estimate_key_rate_mc(&sim)?;
        write_out(
            out,
            OkdMcEstimate {
                key_rate: est.key_rate,
                std_error: est.std_error,
                i_ab: est.i_ab.bits,
                i_ab_std_error: est.i_ab.std_error,
                i_be: est.i_be.bits,
                i_be_std_error: est.i_be.std_error,
                eve_error_rate: est.eve_error_rate.unwrap_or(f64::NAN),
                rounds: est.rounds,
            },
            "out",
        )
    })
}
