// fwdest command-line driver. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 runtime failure or failed check, 2 invalid input.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fwdest/fwdest.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct ReportDeleter {
  void operator()(fwd_report* r) const { fwd_report_destroy(r); }
};
using Report = std::unique_ptr<fwd_report, ReportDeleter>;

struct EstimatorDeleter {
  void operator()(fwd_estimator* e) const { fwd_estimator_destroy(e); }
};

int exit_code(fwd_status s) {
  switch (s) {
    case FWD_OK: return kExitOk;
    case FWD_ERR_INVALID_ARGUMENT:
    case FWD_ERR_DOMAIN:
    case FWD_ERR_CONFIG: return kExitValidation;
    default: return kExitRuntime;
  }
}

int report_error(fwd_status s) {
  std::cerr << "error: " << fwd_last_error() << '\n';
  return exit_code(s);
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split_alphabet(const std::string& spec) {
  std::vector<std::string> out;
  if (spec.find(',') != std::string::npos) {
    std::stringstream ss(spec);
    for (std::string tok; std::getline(ss, tok, ',');) out.push_back(tok);
  } else {
    for (char c : spec) out.emplace_back(1, c);
  }
  return out;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
                 std::optional<std::uint32_t> workers, bool wide) {
  const auto text = read_file(config_path);
  if (!text) {
    std::cerr << "error: cannot read config file '" << config_path << "'\n";
    return kExitValidation;
  }
  fwd_simulate_options opts{};
  opts.override_seed = seed.has_value();
  opts.seed = seed.value_or(0);
  opts.workers = workers.value_or(0);
  opts.wide = wide;
  fwd_report* raw = nullptr;
  const auto s = fwd_simulate(text->c_str(), out_dir.c_str(), &opts, &raw);
  Report report(raw);
  if (report) std::cout << fwd_report_text(report.get()) << '\n';
  if (s != FWD_OK) return report_error(s);
  return kExitOk;
}

int cmd_estimate(const std::string& path, const std::string& alphabet_spec, bool lines, bool final_only) {
  const auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read sequence file '" << path << "'\n";
    return kExitValidation;
  }
  const auto names = split_alphabet(alphabet_spec);
  if (names.size() < 2) {
    std::cerr << "error: --alphabet needs at least two symbols\n";
    return kExitValidation;
  }
  auto index_of = [&](const std::string& s) -> std::optional<std::uint32_t> {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == s) return static_cast<std::uint32_t>(i);
    return std::nullopt;
  };

  std::vector<std::uint32_t> symbols;
  std::istringstream in(*text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> tokens;
    if (lines) {
      const auto b = line.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      tokens.push_back(line.substr(b, line.find_last_not_of(" \t") - b + 1));
    } else {
      for (char c : line)
        if (c != ' ' && c != '\t') tokens.emplace_back(1, c);
    }
    for (const auto& t : tokens) {
      const auto idx = index_of(t);
      if (!idx) {
        std::cerr << "error: line " << line_no << ": unknown symbol '" << t << "'\n";
        return kExitValidation;
      }
      symbols.push_back(*idx);
    }
  }
  if (symbols.empty()) {
    std::cerr << "error: sequence file contains no symbols\n";
    return kExitValidation;
  }

  fwd_estimator* raw = nullptr;
  if (auto s = fwd_estimator_create(static_cast<std::uint32_t>(names.size()), symbols.size() - 1, &raw); s != FWD_OK)
    return report_error(s);
  std::unique_ptr<fwd_estimator, EstimatorDeleter> est(raw);

  std::cout << "n,kappa,lambda,abstained";
  for (const auto& n : names) std::cout << ",p_" << n;
  std::cout << '\n';
  std::vector<double> probs(names.size());
  for (std::size_t n = 0; n < symbols.size(); ++n) {
    if (auto s = fwd_estimator_push(est.get(), symbols[n], nullptr); s != FWD_OK) return report_error(s);
    if (final_only && n + 1 != symbols.size()) continue;
    fwd_estimate info{};
    if (auto s = fwd_estimator_distribution(est.get(), probs.data(), probs.size(), &info); s != FWD_OK)
      return report_error(s);
    std::cout << n << ',' << info.kappa << ',' << info.lambda << ',' << info.abstained;
    for (double p : probs) std::cout << ',' << num(p);
    std::cout << '\n';
  }
  return kExitOk;
}

int cmd_verify(std::uint64_t max_n, std::uint64_t cases, std::uint64_t seed, bool inject) {
  fwd_report* raw = nullptr;
  const auto s = fwd_verify(max_n, cases, seed, inject, &raw);
  Report report(raw);
  if (report) std::cout << fwd_report_text(report.get()) << '\n';
  if (s != FWD_OK) return report_error(s);
  return kExitOk;
}

int cmd_lemmas(const std::string& config_path) {
  std::optional<std::string> text;
  if (!config_path.empty()) {
    text = read_file(config_path);
    if (!text) {
      std::cerr << "error: cannot read config file '" << config_path << "'\n";
      return kExitValidation;
    }
  }
  fwd_report* raw = nullptr;
  const auto s = fwd_lemmas(text ? text->c_str() : nullptr, &raw);
  Report report(raw);
  if (report) std::cout << fwd_report_text(report.get());
  if (s != FWD_OK) return report_error(s);
  if (report && fwd_report_warning_count(report.get()) > 0)
    std::cerr << "warning: " << fwd_report_warning_count(report.get()) << " check(s) inconclusive or skipped\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward estimation of next-symbol conditional expectations for finite-alphabet time series"};
  app.set_version_flag("--version", std::string(fwd_version()));
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> workers;
  bool wide = false;
  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a config file");
  sim->add_option("--config", config_path, "Config document (JSON)")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  sim->add_option("--seed", seed, "Override experiment.seed");
  sim->add_option("--workers", workers, "Override experiment.workers")->check(CLI::PositiveNumber);
  sim->add_flag("--wide", wide, "Add per-symbol estimate and oracle columns");

  std::string seq_path, alphabet = "01";
  bool final_only = false, lines = false;
  auto* est = app.add_subcommand("estimate", "Estimate next-symbol distributions along a sequence file");
  est->add_option("sequence", seq_path, "Sequence file")->required();
  est->add_option("--alphabet", alphabet, "Symbols: characters (\"ab\") or comma-separated names");
  est->add_flag("--final-only", final_only, "Only print the estimate after the last symbol");
  est->add_flag("--lines", lines, "One symbol per line instead of a contiguous character string");

  std::uint64_t max_n = 2000, cases = 200, verify_seed = 20050101;
  bool inject = false;
  auto* ver = app.add_subcommand("verify", "Check the streaming estimator against the from-scratch evaluator");
  ver->add_option("--max-n", max_n, "Longest prefix index checked");
  ver->add_option("--cases", cases, "Number of random sequences");
  ver->add_option("--seed", verify_seed, "Random seed");
  ver->add_flag("--inject-fault", inject, "Self-test: perturb the streaming threshold by one");

  std::string lemma_config;
  auto* lem = app.add_subcommand("lemmas", "Run the resampling, kappa divergence and return-time checks");
  lem->add_option("--config", lemma_config, "Config document (JSON); built-in fair-coin setup if omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  if (*sim) return cmd_simulate(config_path, out_dir, seed, workers, wide);
  if (*est) return cmd_estimate(seq_path, alphabet, lines, final_only);
  if (*ver) return cmd_verify(max_n, cases, verify_seed, inject);
  if (*lem) return cmd_lemmas(lemma_config);
  return kExitValidation;
}
