#ifndef OKD_H
#define OKD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Eavesdropping strategy. Functions accept it as `int32_t` so that
 * out-of-range values are reported rather than undefined.
 */
typedef enum OkdScenario {
  OKD_SCENARIO_DIRECT_DETECTION = 0,
  OKD_SCENARIO_COHERENT = 1,
  OKD_SCENARIO_HELSTROM = 2,
  OKD_SCENARIO_HOLEVO = 3,
} OkdScenario;

/**
 * Result of every call.
 */
typedef enum OkdStatus {
  OKD_STATUS_OK = 0,
  OKD_STATUS_NULL_POINTER = 1,
  OKD_STATUS_INVALID_ARGUMENT = 2,
  OKD_STATUS_NON_CONVERGENCE = 3,
  OKD_STATUS_NUMERIC = 4,
  OKD_STATUS_INSUFFICIENT_SAMPLES = 5,
  OKD_STATUS_INDEX_OUT_OF_RANGE = 6,
  OKD_STATUS_PANIC = 7,
} OkdStatus;

/**
 * Rate-computation settings. Opaque.
 */
typedef struct OkdConfig OkdConfig;

/**
 * Results of a sweep. Opaque.
 */
typedef struct OkdSweep OkdSweep;

/**
 * Key rate and its ingredients, in bits per round. `delta_e_coh` is NaN
 * when the scenario has no coherent depth.
 */
typedef struct OkdRate {
  enum OkdScenario scenario;
  double advantage;
  double delta_b;
  double delta_e;
  double delta_e_coh;
  double i_ab;
  double leak;
  double key_rate;
  double asymptotic_estimate;
  double quadrature_residual;
} OkdRate;

/**
 * A strong-eavesdropping constant with its maximizing depth.
 */
typedef struct OkdConstant {
  double value;
  double argmax;
  double optimizer_residual;
  double quadrature_residual;
} OkdConstant;

/**
 * One sweep row. Failed rows carry a non-`Ok` status, NaN rates and their
 * message is available from [`okd_sweep_row_error`].
 */
typedef struct OkdSweepRow {
  double advantage;
  enum OkdScenario scenario;
  double optimal_delta_b;
  double optimal_delta_e;
  double optimal_delta_e_coh;
  double key_rate;
  double key_rate_asymptotic;
  enum OkdStatus status;
} OkdSweepRow;

/**
 * Monte Carlo key-rate estimate. `eve_error_rate` is NaN unless the
 * scenario is Helstrom.
 */
typedef struct OkdMcEstimate {
  double key_rate;
  double std_error;
  double i_ab;
  double i_ab_std_error;
  double i_be;
  double i_be_std_error;
  double eve_error_rate;
  uint64_t rounds;
} OkdMcEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null after a
 * success. The pointer stays valid until the next call on the same thread.
 */
const char *okd_last_error(void);

/**
 * Static description of a status code; unknown codes are described as such.
 */
const char *okd_status_message(int32_t status);

/**
 * New configuration with library defaults, or null on allocation failure.
 */
struct OkdConfig *okd_config_new(void);

/**
 * # Safety
 * `cfg` must be null or a handle from [`okd_config_new`] not yet freed.
 */
void okd_config_free(struct OkdConfig *cfg);

/**
 * Absolute and relative quadrature tolerances.
 *
 * # Safety
 * `cfg` must be a live handle from [`okd_config_new`].
 */
enum OkdStatus okd_config_set_tolerances(struct OkdConfig *cfg, double abs_tol, double rel_tol);

/**
 * Integration window half-width in standard deviations.
 *
 * # Safety
 * `cfg` must be a live handle from [`okd_config_new`].
 */
enum OkdStatus okd_config_set_truncation(struct OkdConfig *cfg, double sigmas);

/**
 * Integrand evaluations allowed per one-dimensional integral.
 *
 * # Safety
 * `cfg` must be a live handle from [`okd_config_new`].
 */
enum OkdStatus okd_config_set_max_evaluations(struct OkdConfig *cfg, size_t evaluations);

/**
 * Search bracket and accuracy for the optimal depth `δ_B`.
 *
 * # Safety
 * `cfg` must be a live handle from [`okd_config_new`].
 */
enum OkdStatus okd_config_set_search(struct OkdConfig *cfg, double lo, double hi, double tol);

/**
 * Pulse energies fixing Eve's coherent depth for the homodyne and Helstrom
 * scenarios.
 *
 * # Safety
 * `cfg` must be a live handle from [`okd_config_new`].
 */
enum OkdStatus okd_config_set_modulation(struct OkdConfig *cfg, double n0, double n1);

/**
 * Drops the modulation so that Eve's coherent depth equals `δ_E`.
 *
 * # Safety
 * `cfg` must be a live handle from [`okd_config_new`].
 */
enum OkdStatus okd_config_clear_modulation(struct OkdConfig *cfg);

/**
 * Key rate at a fixed depth `δ_B`.
 *
 * # Safety
 * `cfg` must be null or a live handle; `out` must be valid for writes.
 */
enum OkdStatus okd_key_rate(const struct OkdConfig *cfg,
                            int32_t scenario,
                            double delta_b,
                            double advantage,
                            struct OkdRate *out);

/**
 * Key rate maximized over `δ_B`.
 *
 * # Safety
 * `cfg` must be null or a live handle; `out` must be valid for writes.
 */
enum OkdStatus okd_optimal_rate(const struct OkdConfig *cfg,
                                int32_t scenario,
                                double advantage,
                                struct OkdRate *out);

/**
 * `ℰ = ((τ_E/σ_E)/(τ_B/σ_B))²`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum OkdStatus okd_eavesdropper_advantage(double tau_b,
                                          double tau_e,
                                          double sigma_b,
                                          double sigma_e,
                                          double *out);

/**
 * Advantage against a shot-noise-limited eavesdropper when Bob has excess
 * noise variance `excess`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum OkdStatus okd_shot_noise_advantage(double tau_b,
                                        double tau_e,
                                        double n_bar,
                                        double excess,
                                        double *out);

/**
 * Minimum error probability for discriminating the two coherent states.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum OkdStatus okd_helstrom_error_probability(double delta_e_coh, double *out);

/**
 * Von Neumann entropy (bits) of a mixture of two pure states with weights
 * `p`, `1 − p` and squared overlap `q`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum OkdStatus okd_coherent_mixture_entropy(double p, double q, double *out);

/**
 * Direct-detection constant γ ≈ 0.4795.
 *
 * # Safety
 * `cfg` must be null or a live handle; `out` must be valid for writes.
 */
enum OkdStatus okd_gamma_constant(const struct OkdConfig *cfg, struct OkdConstant *out);

/**
 * Collective-attack constant χ ≈ 0.2683.
 *
 * # Safety
 * `cfg` must be null or a live handle; `out` must be valid for writes.
 */
enum OkdStatus okd_chi_constant(const struct OkdConfig *cfg, struct OkdConstant *out);

/**
 * Optimal rates over `points` advantages in `[min, max]` (log-spaced when
 * `log` is true) for each of `n_scenarios` scenarios. On success `*out`
 * receives a handle to free with [`okd_sweep_free`].
 *
 * # Safety
 * `cfg` must be null or a live handle; `scenarios` must point to
 * `n_scenarios` values; `out` must be valid for writes.
 */
enum OkdStatus okd_sweep_run(const struct OkdConfig *cfg,
                             const int32_t *scenarios,
                             size_t n_scenarios,
                             double min,
                             double max,
                             size_t points,
                             bool log,
                             struct OkdSweep **out);

/**
 * Number of rows in a sweep, or 0 for a null handle.
 *
 * # Safety
 * `sweep` must be null or a live handle from [`okd_sweep_run`].
 */
size_t okd_sweep_len(const struct OkdSweep *sweep);

/**
 * Copies row `index` into `out`.
 *
 * # Safety
 * `sweep` must be a live handle; `out` must be valid for writes.
 */
enum OkdStatus okd_sweep_row(const struct OkdSweep *sweep, size_t index, struct OkdSweepRow *out);

/**
 * Error message of a failed row, or null for a successful row or bad
 * arguments. Valid until the sweep is freed.
 *
 * # Safety
 * `sweep` must be null or a live handle from [`okd_sweep_run`].
 */
const char *okd_sweep_row_error(const struct OkdSweep *sweep, size_t index);

/**
 * # Safety
 * `sweep` must be null or a handle from [`okd_sweep_run`] not yet freed.
 */
void okd_sweep_free(struct OkdSweep *sweep);

/**
 * Monte Carlo estimate of the key rate at depth `δ_B` from `rounds`
 * simulated rounds. Eve's coherent depth follows the configuration's
 * modulation. The Holevo scenario is rejected.
 *
 * # Safety
 * `cfg` must be null or a live handle; `out` must be valid for writes.
 */
enum OkdStatus okd_simulate_key_rate(const struct OkdConfig *cfg,
                                     int32_t scenario,
                                     double delta_b,
                                     double advantage,
                                     uint64_t rounds,
                                     uint64_t seed,
                                     size_t bins,
                                     size_t bootstrap_resamples,
                                     struct OkdMcEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OKD_H */
