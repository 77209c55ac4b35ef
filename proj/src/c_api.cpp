#include "fwdest/fwdest.h"

#include <new>
#include <string>

#include "fwdest/config.hpp"
#include "fwdest/errors.hpp"
#include "fwdest/output.hpp"
#include "fwdest/rng.hpp"
#include "fwdest/streaming.hpp"
#include "fwdest/verify.hpp"

struct fwd_estimator {
  fwdest::StreamingEstimator impl;
};

struct fwd_report {
  std::string text;
  std::string json;
  std::size_t warnings = 0;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_field;

fwd_status fail(fwd_status s, std::string message, std::string field = {}) {
  last_error = std::move(message);
  last_field = std::move(field);
  return s;
}

// Maps exceptions escaping the C++ core onto status codes.
template <typename F>
fwd_status guarded(F&& f) {
  last_error.clear();
  last_field.clear();
  try {
    return f();
  } catch (const fwdest::ConfigError& e) {
    return fail(FWD_ERR_CONFIG, e.what(), e.field());
  } catch (const fwdest::DomainError& e) {
    return fail(FWD_ERR_DOMAIN, e.what());
  } catch (const fwdest::CapacityError& e) {
    return fail(FWD_ERR_CAPACITY, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FWD_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(FWD_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(FWD_ERR_RUNTIME, "unknown error");
  }
}

void fill(fwd_estimate* out, double value, std::uint64_t kappa, std::uint64_t lambda, bool abstained) {
  out->value = value;
  out->kappa = kappa;
  out->lambda = lambda;
  out->abstained = abstained ? 1 : 0;
}

}  // namespace

extern "C" {

const char* fwd_version(void) { return fwdest::kToolVersion; }
const char* fwd_rng_algorithm(void) { return fwdest::kRngAlgorithm; }
const char* fwd_last_error(void) { return last_error.c_str(); }
const char* fwd_last_error_field(void) { return last_field.c_str(); }

const char* fwd_status_name(fwd_status status) {
  switch (status) {
    case FWD_OK: return "ok";
    case FWD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FWD_ERR_DOMAIN: return "domain error";
    case FWD_ERR_CAPACITY: return "capacity exceeded";
    case FWD_ERR_CONFIG: return "config error";
    case FWD_ERR_RUNTIME: return "runtime error";
    case FWD_ERR_CHECK_FAILED: return "check failed";
  }
  return "unknown status";
}

fwd_status fwd_schedule_k(uint64_t n, uint32_t alphabet_size, uint64_t* out) {
  if (!out) return fail(FWD_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    *out = fwdest::schedule_K(n, alphabet_size);
    return FWD_OK;
  });
}

fwd_status fwd_schedule_j(uint64_t n, uint64_t* out) {
  if (!out) return fail(FWD_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    *out = fwdest::schedule_J(n);
    return FWD_OK;
  });
}

fwd_status fwd_estimator_create(uint32_t alphabet_size, uint64_t horizon, fwd_estimator** out) {
  if (!out) return fail(FWD_ERR_INVALID_ARGUMENT, "out is null");
  *out = nullptr;
  return guarded([&] {
    *out = new fwd_estimator{fwdest::StreamingEstimator(fwdest::Alphabet::numbered(alphabet_size), horizon)};
    return FWD_OK;
  });
}

void fwd_estimator_destroy(fwd_estimator* est) { delete est; }

fwd_status fwd_estimator_push(fwd_estimator* est, uint32_t symbol, uint64_t* new_length) {
  if (!est) return fail(FWD_ERR_INVALID_ARGUMENT, "estimator is null");
  return guarded([&] {
    const auto len = est->impl.push(symbol);
    if (new_length) *new_length = len;
    return FWD_OK;
  });
}

uint64_t fwd_estimator_length(const fwd_estimator* est) { return est ? est->impl.size() : 0; }

uint32_t fwd_estimator_alphabet_size(const fwd_estimator* est) {
  return est ? static_cast<uint32_t>(est->impl.sequence().alphabet_size()) : 0;
}

uint64_t fwd_estimator_k_max(const fwd_estimator* est) { return est ? est->impl.k_max() : 0; }

fwd_status fwd_estimator_estimate(const fwd_estimator* est, const double* payoff, size_t payoff_len,
                                  fwd_estimate* out) {
  if (!est || !payoff || !out) return fail(FWD_ERR_INVALID_ARGUMENT, "null argument");
  if (payoff_len != est->impl.sequence().alphabet_size())
    return fail(FWD_ERR_INVALID_ARGUMENT, "payoff length must equal the alphabet size");
  return guarded([&] {
    const auto r = est->impl.current_estimate(fwdest::PayoffFunction({payoff, payoff + payoff_len}));
    fill(out, r.value, r.kappa, r.lambda, r.abstained);
    return FWD_OK;
  });
}

fwd_status fwd_estimator_distribution(const fwd_estimator* est, double* probs, size_t probs_len,
                                      fwd_estimate* info) {
  if (!est || !probs) return fail(FWD_ERR_INVALID_ARGUMENT, "null argument");
  if (probs_len < est->impl.sequence().alphabet_size())
    return fail(FWD_ERR_INVALID_ARGUMENT, "probability buffer smaller than the alphabet");
  return guarded([&] {
    const auto d = est->impl.current_distribution();
    std::copy(d.probs.begin(), d.probs.end(), probs);
    if (info) fill(info, 0.0, d.kappa, d.lambda, d.abstained);
    return FWD_OK;
  });
}

fwd_status fwd_simulate(const char* config_json, const char* out_dir, const fwd_simulate_options* options,
                        fwd_report** report) {
  if (!config_json || !out_dir) return fail(FWD_ERR_INVALID_ARGUMENT, "null argument");
  if (report) *report = nullptr;
  return guarded([&] {
    fwdest::SimulateOverrides ov;
    if (options) {
      if (options->override_seed) ov.seed = options->seed;
      if (options->workers) ov.workers = options->workers;
      ov.wide = options->wide != 0;
    }
    const auto outcome = fwdest::simulate(fwdest::parse_document(config_json), out_dir, ov);
    if (report) *report = new fwd_report{outcome.summary, "{}", 0};
    if (!outcome.checks_passed) return fail(FWD_ERR_CHECK_FAILED, "run invariants violated; see manifest.json");
    return FWD_OK;
  });
}

fwd_status fwd_verify(uint64_t max_n, uint64_t cases, uint64_t seed, int inject_off_by_one, fwd_report** report) {
  if (report) *report = nullptr;
  return guarded([&] {
    fwdest::VerifyOptions opts;
    opts.max_n = max_n;
    opts.cases = cases;
    opts.seed = seed;
    opts.inject_off_by_one = inject_off_by_one != 0;
    const auto r = fwdest::verify_equivalence(opts);
    nlohmann::json j{{"passed", r.passed}, {"cases", r.cases}, {"prefixes", r.prefixes}};
    if (r.counterexample) {
      const auto& c = *r.counterexample;
      j["counterexample"] = {{"case", c.case_index}, {"alphabet_size", c.alphabet_size}, {"n", c.n},
                             {"schedules", c.schedules}, {"prefix", c.prefix}, {"detail", c.detail}};
    }
    if (report) *report = new fwd_report{r.describe(), j.dump(), 0};
    if (!r.passed) return fail(FWD_ERR_CHECK_FAILED, "streaming and from-scratch evaluators disagree");
    return FWD_OK;
  });
}

fwd_status fwd_lemmas(const char* config_json, fwd_report** report) {
  if (report) *report = nullptr;
  return guarded([&] {
    const auto doc = config_json ? fwdest::parse_document(config_json) : fwdest::default_lemma_document();
    const auto outcome = fwdest::run_lemmas(doc);
    if (report) *report = new fwd_report{outcome.summary, outcome.report.dump(), outcome.warnings.size()};
    if (!outcome.passed) return fail(FWD_ERR_CHECK_FAILED, "a lemma check failed");
    return FWD_OK;
  });
}

const char* fwd_report_text(const fwd_report* report) { return report ? report->text.c_str() : ""; }
const char* fwd_report_json(const fwd_report* report) { return report ? report->json.c_str() : "{}"; }
size_t fwd_report_warning_count(const fwd_report* report) { return report ? report->warnings : 0; }
void fwd_report_destroy(fwd_report* report) { delete report; }

}  // extern "C"
