/* C interface to the chatter-tda pipeline. Generated by cbindgen; do not edit. */

#ifndef CHATTER_TDA_H
#define CHATTER_TDA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Pre-cut history selector for [`CtSimConfig`].
typedef enum CtHistoryMode {
  // Tool at the unloaded position y = 0 before the cut.
  CT_HISTORY_MODE_ZERO = 0,
  // Tool at equilibrium plus `history_offset` before the cut.
  CT_HISTORY_MODE_EQUILIBRIUM_OFFSET = 1,
} CtHistoryMode;

// Status code returned by every fallible entry point.
typedef enum CtStatus {
  CT_STATUS_OK = 0,
  // Input outside a function's mathematical domain.
  CT_STATUS_DOMAIN = 1,
  // |y| exceeded the blow-up bound during integration.
  CT_STATUS_SIMULATION_DIVERGED = 2,
  CT_STATUS_INSUFFICIENT_SAMPLES = 3,
  // Constant series; the embedding delay is undefined.
  CT_STATUS_ZERO_VARIANCE = 4,
  // Point cloud exceeds the H1 capacity limit.
  CT_STATUS_CAPACITY_EXCEEDED = 5,
  CT_STATUS_INVALID_DIAGRAM = 6,
  CT_STATUS_SINGLE_CLASS = 7,
  CT_STATUS_CONFIG = 8,
  CT_STATUS_PARSE = 9,
  CT_STATUS_IO = 10,
  CT_STATUS_JSON = 11,
  // A required pointer argument was null.
  CT_STATUS_NULL_ARGUMENT = 12,
  // A string argument was not valid UTF-8.
  CT_STATUS_INVALID_UTF8 = 13,
  // A panic was caught at the FFI boundary.
  CT_STATUS_PANIC = 14,
} CtStatus;

// Opaque classifier: a logistic model plus the normalizer it was fitted with.
typedef struct CtClassifier CtClassifier;

// Opaque simulated time series.
typedef struct CtSeries CtSeries;

// Integration settings. `ct_sim_config_default` fills the standard values.
typedef struct CtSimConfig {
  // Integration steps per delay interval.
  uint32_t steps_per_delay;
  // Horizon in delay intervals.
  uint32_t horizon_delays;
  // RNG seed (stochastic runs only).
  uint64_t seed;
  // Divergence bound on |y|.
  double blowup;
  // Pre-cut history selector.
  enum CtHistoryMode history_mode;
  // Offset above equilibrium; read only in EQUILIBRIUM_OFFSET mode.
  double history_offset;
} CtSimConfig;

// Turning model parameters. Field-for-field mirror of the core struct.
typedef struct CtTurningParams {
  // Damping ratio ζ.
  double zeta;
  // Nondimensional depth of cut b ≥ 0.
  double b;
  // Nondimensional feed ρ.
  double rho;
  // Force-law exponent α ∈ (0, 1].
  double alpha;
  // Speed ratio Ω/ωₙ.
  double speed_ratio;
} CtTurningParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string. Never fails.
const char *ct_version(void);

// Length of the feature vector produced by `ct_series_features` and
// consumed by `ct_classifier_predict`.
size_t ct_feature_dim(void);

// Copies the message of the most recent failure on this thread into `buf`
// (NUL-terminated, truncated to `cap` bytes) and returns the buffer size the
// full message needs, including the NUL. Returns 0 if no failure has been
// recorded. `buf` may be null to query the size.
size_t ct_last_error_message(char *buf, size_t cap);

// Default integration settings.
struct CtSimConfig ct_sim_config_default(void);

// Integrates the deterministic model and writes a new series handle to
// `out`. The caller owns the handle and must release it with
// `ct_series_free`.
enum CtStatus ct_simulate_deterministic(struct CtTurningParams params,
                                        struct CtSimConfig config,
                                        struct CtSeries **out);

// Integrates the stochastic model with diffusion coefficient `delta` and
// writes a new series handle to `out`. The caller owns the handle.
enum CtStatus ct_simulate_stochastic(struct CtTurningParams params,
                                     double delta,
                                     struct CtSimConfig config,
                                     struct CtSeries **out);

// Number of samples in the series; 0 for a null handle.
size_t ct_series_len(const struct CtSeries *series);

// Sample spacing; NaN for a null handle.
double ct_series_dt(const struct CtSeries *series);

// Time of the first sample; NaN for a null handle.
double ct_series_t0(const struct CtSeries *series);

// Copies up to `cap` samples into `buf` and returns the series length, so a
// short return value ≤ cap means the copy was complete. `buf` may be null to
// query the length.
size_t ct_series_values(const struct CtSeries *series, double *buf, size_t cap);

// Releases a series handle. Null is a no-op.
void ct_series_free(struct CtSeries *series);

// Runs the full feature map on a series — truncate to the second half,
// subsample, delay-embed, persistence, diagram features — and writes
// `ct_feature_dim()` values to `out`. Pass 0 for `subsample_count` or
// `embed_dim` to use the standard values (264 and 3).
enum CtStatus ct_series_features(const struct CtSeries *series,
                                 size_t subsample_count,
                                 size_t embed_dim,
                                 double *out);

// Builds a classifier from the JSON forms of a trained model and its
// normalizer (the `model.json` / `normalizer.json` files written by the
// CLI). The caller owns the handle and must release it with
// `ct_classifier_free`.
enum CtStatus ct_classifier_from_json(const char *model_json,
                                      const char *normalizer_json,
                                      struct CtClassifier **out);

// Classifies one raw (un-normalized) feature row of `ct_feature_dim()`
// values. Writes the chatter probability to `probability` and the hard
// label (probability ≥ 0.5) to `label`; either out-pointer may be null if
// that output is not needed.
enum CtStatus ct_classifier_predict(const struct CtClassifier *classifier,
                                    const double *features,
                                    double *probability,
                                    bool *label);

// Releases a classifier handle. Null is a no-op.
void ct_classifier_free(struct CtClassifier *classifier);

// Closed-form global minimum of the stability boundary,
// b_min = 2ζ(1+ζ)/(α ρ^(α−1)). Returns NaN (and records an error) for
// parameters outside the model's domain.
double ct_stability_min_b(double zeta, double rho, double alpha);

// Critical depth of cut b_lim at one spindle speed ratio: the lower
// envelope of the stability lobes evaluated exactly at `speed_ratio`.
enum CtStatus ct_stability_b_lim(double zeta,
                                 double rho,
                                 double alpha,
                                 double speed_ratio,
                                 double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CHATTER_TDA_H */
