/*
 * C interface to the fwdest forward estimator.
 *
 * All objects are opaque handles created and released through this API.
 * Every fallible call returns an fwd_status; on failure a description is
 * available from fwd_last_error() (thread-local, valid until the next API
 * call on the same thread).
 */
#ifndef FWDEST_H
#define FWDEST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define FWD_API __declspec(dllexport)
#else
#  define FWD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fwd_status {
  FWD_OK = 0,
  FWD_ERR_INVALID_ARGUMENT = 1, /* null handle or pointer, undersized buffer */
  FWD_ERR_DOMAIN = 2,           /* value outside an operation's domain, e.g. unknown symbol */
  FWD_ERR_CAPACITY = 3,         /* pushed past the estimator horizon */
  FWD_ERR_CONFIG = 4,           /* configuration failed to parse or validate */
  FWD_ERR_RUNTIME = 5,          /* I/O or other unexpected failure */
  FWD_ERR_CHECK_FAILED = 6      /* a verification run completed and found a failure */
} fwd_status;

typedef struct fwd_estimator fwd_estimator;
typedef struct fwd_report fwd_report;

typedef struct fwd_estimate {
  double value;
  uint64_t kappa;
  uint64_t lambda;
  int abstained;
} fwd_estimate;

typedef struct fwd_simulate_options {
  int override_seed; /* nonzero: use `seed` instead of the config's experiment.seed */
  uint64_t seed;
  uint32_t workers;  /* 0: keep the config value */
  int wide;          /* nonzero: add per-symbol estimate and oracle columns */
} fwd_simulate_options;

FWD_API const char* fwd_version(void);
FWD_API const char* fwd_rng_algorithm(void);
FWD_API const char* fwd_last_error(void);
/* Config field named by the last FWD_ERR_CONFIG, or "" */
FWD_API const char* fwd_last_error_field(void);
FWD_API const char* fwd_status_name(fwd_status status);

FWD_API fwd_status fwd_schedule_k(uint64_t n, uint32_t alphabet_size, uint64_t* out);
FWD_API fwd_status fwd_schedule_j(uint64_t n, uint64_t* out);

/* Streaming estimator with the default schedules. Accepts symbols X_0 .. X_horizon. */
FWD_API fwd_status fwd_estimator_create(uint32_t alphabet_size, uint64_t horizon, fwd_estimator** out);
FWD_API void fwd_estimator_destroy(fwd_estimator* est);
FWD_API fwd_status fwd_estimator_push(fwd_estimator* est, uint32_t symbol, uint64_t* new_length);
FWD_API uint64_t fwd_estimator_length(const fwd_estimator* est);
FWD_API uint32_t fwd_estimator_alphabet_size(const fwd_estimator* est);
FWD_API uint64_t fwd_estimator_k_max(const fwd_estimator* est);

/* payoff has one value per symbol */
FWD_API fwd_status fwd_estimator_estimate(const fwd_estimator* est, const double* payoff, size_t payoff_len,
                                          fwd_estimate* out);
/* probs receives alphabet_size entries; info may be NULL */
FWD_API fwd_status fwd_estimator_distribution(const fwd_estimator* est, double* probs, size_t probs_len,
                                              fwd_estimate* info);

/* Runs the experiment in config_json and writes metrics.csv, tails.csv and
 * manifest.json into out_dir. options may be NULL. */
FWD_API fwd_status fwd_simulate(const char* config_json, const char* out_dir, const fwd_simulate_options* options,
                                fwd_report** report);

/* Streaming vs from-scratch equivalence run. Returns FWD_ERR_CHECK_FAILED with
 * the smallest counterexample in the report when they disagree. */
FWD_API fwd_status fwd_verify(uint64_t max_n, uint64_t cases, uint64_t seed, int inject_off_by_one,
                              fwd_report** report);

/* Lemma checks. config_json may be NULL for the built-in fair-coin setup. */
FWD_API fwd_status fwd_lemmas(const char* config_json, fwd_report** report);

FWD_API const char* fwd_report_text(const fwd_report* report);
FWD_API const char* fwd_report_json(const fwd_report* report);
FWD_API size_t fwd_report_warning_count(const fwd_report* report);
FWD_API void fwd_report_destroy(fwd_report* report);

#ifdef __cplusplus
}
#endif

#endif /* FWDEST_H */
