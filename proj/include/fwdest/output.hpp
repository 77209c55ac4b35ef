#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fwdest/harness.hpp"

namespace fwdest {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kMetricsSchema = "metrics/v1";
inline constexpr const char* kTailsSchema = "tails/v1";

/// All numeric output uses 12 significant digits.
std::string format_number(double v);

std::vector<std::string> metrics_columns(const Alphabet& alphabet, bool wide);
std::vector<std::string> tails_columns();

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows, const Alphabet& alphabet, bool wide);
void write_tails_csv(std::ostream& out, const std::vector<TailEstimate>& tails);

struct SimulateOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  bool wide = false;
};

struct SimulateOutcome {
  bool checks_passed = true;
  std::string summary;
};

/// Runs the experiment described by `doc` and writes metrics.csv, tails.csv and
/// manifest.json into `out_dir` (created if needed).
SimulateOutcome simulate(nlohmann::json doc, const std::filesystem::path& out_dir, const SimulateOverrides& overrides);

struct LemmaOutcome {
  bool passed = true;  // no check failed; inconclusive and skipped checks only warn
  std::vector<std::string> warnings;
  std::string summary;
  nlohmann::json report;
};

LemmaOutcome run_lemmas(const nlohmann::json& doc);

std::string utc_timestamp();

}  // namespace fwdest
