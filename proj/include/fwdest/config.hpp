#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fwdest/harness.hpp"
#include "fwdest/process.hpp"
#include "fwdest/schedules.hpp"

namespace fwdest {

// Configuration documents are JSON objects with sections `process`,
// `schedules`, `experiment` and (for lemma runs) `lemmas`. Numeric fields must
// be JSON numbers; quoted decimals are rejected. Every ConfigError names the
// offending field path.

/// Parses JSON text; syntax errors become ConfigError.
nlohmann::json parse_document(const std::string& text);
nlohmann::json load_document(const std::string& path);

ProcessSpec parse_process(const nlohmann::json& node);
ScheduleRule parse_schedules(const nlohmann::json& node);  // null node -> defaults

/// Reads `process`, `schedules` and `experiment` from the whole document.
ExperimentConfig parse_experiment(const nlohmann::json& doc);

struct LemmaConfig {
  explicit LemmaConfig(ProcessSpec spec) : process(std::move(spec)) {}

  ProcessSpec process;
  ScheduleRule schedules;
  std::uint64_t seed = 1;

  struct Resampling {
    std::size_t k = 1;
    std::size_t j = 1;
    std::uint64_t n = 100;
    std::uint64_t replicates = 5000;
    std::size_t block_length = 1;
  } resampling;

  struct Kappa {
    std::uint64_t horizon = std::uint64_t{1} << 21;
    std::uint64_t replicates = 10;
    std::vector<std::uint64_t> eval_grid;
  } kappa;

  struct ReturnTime {
    std::uint64_t n = 100;
    std::uint64_t visits = 30;
    std::uint64_t replicates = 20000;
    std::vector<Symbol> block{1};
  } return_time;
};

LemmaConfig parse_lemmas(const nlohmann::json& doc);

/// Built-in lemma configuration: fair coin with the default schedules.
nlohmann::json default_lemma_document();

}  // namespace fwdest
