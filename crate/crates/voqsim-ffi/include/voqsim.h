#ifndef VOQSIM_H
#define VOQSIM_H

/* Generated by cbindgen from voqsim-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Coincidence pair selector, same order as the pair-indexed arrays.
 */
typedef enum VoqPair {
  VOQ_PAIR_D1D1S = 0,
  VOQ_PAIR_D1D2S = 1,
  VOQ_PAIR_D2D1S = 2,
  VOQ_PAIR_D2D2S = 3,
} VoqPair;

/**
 * Result of every fallible call.
 */
typedef enum VoqStatus {
  VOQ_STATUS_OK = 0,
  VOQ_STATUS_NULL_ARGUMENT = 1,
  VOQ_STATUS_INVALID_CONFIG = 2,
  VOQ_STATUS_RUNTIME = 3,
  VOQ_STATUS_INVALID_UTF8 = 4,
} VoqStatus;

/**
 * Protocol variant selector.
 */
typedef enum VoqVariant {
  VOQ_VARIANT_PASSIVE = 0,
  VOQ_VARIANT_ACTIVE = 1,
} VoqVariant;

/**
 * Opaque experiment configuration handle.
 */
typedef struct VoqConfig VoqConfig;

/**
 * One sweep point of a fringe scan or counting run.
 */
typedef struct VoqFringePoint {
  double phi_rad;
  double mirror_um;
  double p_joint[4];
  double p_conditional[4];
  uint64_t counts[4];
} VoqFringePoint;

/**
 * Bell-outcome probabilities of Alice's measurement.
 */
typedef struct VoqBellStats {
  double psi1;
  double psi2;
  double psi3;
  double psi4;
} VoqBellStats;

/**
 * One visibility point; `degenerate` marks a fringe with no amplitude.
 */
typedef struct VoqVisibilityPoint {
  double alpha_sq;
  double visibility;
  bool degenerate;
} VoqVisibilityPoint;

/**
 * Least-squares fringe fit A(1 + V cos(phi + phi0)) with standard errors.
 */
typedef struct VoqFitResult {
  double v;
  double phi0;
  double a;
  double residual_norm;
  double v_stderr;
  double phi0_stderr;
  double a_stderr;
} VoqFitResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *voq_version(void);

/**
 * Message of the most recent failure on this thread; empty string if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *voq_last_error_message(void);

/**
 * New configuration with default settings (matched verification splitter,
 * eta = 1, passive variant, 65-point phase sweep over one full period).
 */
struct VoqConfig *voq_config_new(void);

/**
 * Parses a configuration from its JSON form. Returns null and sets the
 * error message on failure.
 */
struct VoqConfig *voq_config_from_json(const char *json);

struct VoqConfig *voq_config_clone(const struct VoqConfig *config);

void voq_config_free(struct VoqConfig *config);

/**
 * Serializes the configuration to JSON; free the string with
 * [`voq_string_free`].
 */
enum VoqStatus voq_config_to_json(const struct VoqConfig *config, char **out_json);

void voq_string_free(char *s);

enum VoqStatus voq_config_set_alpha_sq(struct VoqConfig *config, double alpha_sq);

enum VoqStatus voq_config_set_bsb_r_sq(struct VoqConfig *config, double r_sq);

/**
 * Removes the explicit verification reflectivity so it matches alpha_sq.
 */
enum VoqStatus voq_config_match_bsb(struct VoqConfig *config);

enum VoqStatus voq_config_set_eta(struct VoqConfig *config, double eta);

enum VoqStatus voq_config_set_variant(struct VoqConfig *config, enum VoqVariant variant);

enum VoqStatus voq_config_set_shots(struct VoqConfig *config, uint64_t shots);

enum VoqStatus voq_config_set_seed(struct VoqConfig *config, uint64_t seed);

/**
 * Sets a phase sweep in radians, replacing any mirror sweep.
 */
enum VoqStatus voq_config_set_phase_sweep(struct VoqConfig *config,
                                          double start_rad,
                                          double stop_rad,
                                          size_t steps);

/**
 * Sets a mirror-position sweep in micrometers, replacing any phase sweep.
 */
enum VoqStatus voq_config_set_mirror_sweep(struct VoqConfig *config,
                                           double start_um,
                                           double stop_um,
                                           size_t steps);

enum VoqStatus voq_config_set_lambda_um(struct VoqConfig *config, double lambda_um);

/**
 * Analytic fringe scan over the configured sweep. On success writes a
 * heap-allocated array; release it with [`voq_fringe_points_free`].
 */
enum VoqStatus voq_fringe_scan(const struct VoqConfig *config,
                               struct VoqFringePoint **out_points,
                               size_t *out_len);

/**
 * Monte Carlo counting run; the returned points carry sampled coincidence
 * counts alongside the analytic probabilities.
 */
enum VoqStatus voq_simulate_counts(const struct VoqConfig *config,
                                   struct VoqFringePoint **out_points,
                                   size_t *out_len);

/**
 * Full counting-run report (config echo, per-point tallies and fits) as a
 * JSON string; free it with [`voq_string_free`].
 */
enum VoqStatus voq_simulate_counts_json(const struct VoqConfig *config, char **out_json);

void voq_fringe_points_free(struct VoqFringePoint *points, size_t len);

/**
 * Bell-outcome probabilities for the configured input qubit.
 */
enum VoqStatus voq_bell_stats(const struct VoqConfig *config, struct VoqBellStats *out_stats);

/**
 * Visibility of one pair's conditional fringe for each alpha_sq in the
 * given grid. Release the array with [`voq_visibility_points_free`].
 */
enum VoqStatus voq_visibility_sweep(const struct VoqConfig *config,
                                    enum VoqPair pair,
                                    const double *alpha_sq,
                                    size_t alpha_len,
                                    struct VoqVisibilityPoint **out_points,
                                    size_t *out_len);

void voq_visibility_points_free(struct VoqVisibilityPoint *points, size_t len);

/**
 * Least-squares fringe fit on (phi, value) samples of equal length.
 */
enum VoqStatus voq_fit(const double *phi_rad,
                       const double *values,
                       size_t len,
                       struct VoqFitResult *out_fit);

enum VoqStatus voq_mirror_to_phase(double x_um, double lambda_um, double *out_phi_rad);

enum VoqStatus voq_phase_to_mirror(double phi_rad, double lambda_um, double *out_x_um);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* VOQSIM_H */
