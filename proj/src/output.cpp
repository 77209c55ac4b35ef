#include "fwdest/output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fwdest/config.hpp"
#include "fwdest/rng.hpp"

namespace fwdest {

using nlohmann::json;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> metrics_columns(const Alphabet& alphabet, bool wide) {
  std::vector<std::string> cols{"replicate", "n", "kappa", "lambda", "abstained", "estimate_or_tv",
                                "oracle_summary", "abs_error", "cesaro_avg"};
  if (wide) {
    for (const auto& s : alphabet.names()) cols.push_back("est_" + s);
    for (const auto& s : alphabet.names()) cols.push_back("oracle_" + s);
  }
  return cols;
}

std::vector<std::string> tails_columns() { return {"n", "epsilon", "fraction", "wilson_halfwidth", "replicates"}; }

namespace {

void write_header(std::ostream& out, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows, const Alphabet& alphabet, bool wide) {
  write_header(out, metrics_columns(alphabet, wide));
  for (const auto& r : rows) {
    out << r.replicate << ',' << r.n << ',' << r.kappa << ',' << r.lambda << ',' << (r.abstained ? 1 : 0) << ','
        << format_number(r.estimate_or_tv) << ',' << format_number(r.oracle_summary) << ','
        << format_number(r.abs_error) << ',' << format_number(r.cesaro_avg);
    if (wide) {
      for (std::size_t s = 0; s < alphabet.size(); ++s)
        out << ',' << format_number(s < r.estimate_vector.size() ? r.estimate_vector[s] : 0.0);
      for (std::size_t s = 0; s < alphabet.size(); ++s)
        out << ',' << format_number(s < r.oracle_vector.size() ? r.oracle_vector[s] : 0.0);
    }
    out << '\n';
  }
}

void write_tails_csv(std::ostream& out, const std::vector<TailEstimate>& tails) {
  write_header(out, tails_columns());
  for (const auto& t : tails)
    out << t.n << ',' << format_number(t.epsilon) << ',' << format_number(t.fraction) << ','
        << format_number(t.wilson_halfwidth) << ',' << t.replicates << '\n';
}

SimulateOutcome simulate(json doc, const std::filesystem::path& out_dir, const SimulateOverrides& overrides) {
  if (doc.is_object() && doc.contains("experiment") && doc["experiment"].is_object()) {
    if (overrides.seed) doc["experiment"]["seed"] = *overrides.seed;
    if (overrides.workers) doc["experiment"]["workers"] = *overrides.workers;
    if (overrides.wide) doc["experiment"]["wide"] = true;
  }
  const auto cfg = parse_experiment(doc);
  const auto started = utc_timestamp();
  const auto result = run_experiment(cfg);
  const auto finished = utc_timestamp();

  std::filesystem::create_directories(out_dir);
  std::ostringstream metrics, tails;
  write_metrics_csv(metrics, result.rows, cfg.process.alphabet, cfg.wide);
  write_tails_csv(tails, result.tails);
  write_file(out_dir / "metrics.csv", metrics.str());
  write_file(out_dir / "tails.csv", tails.str());

  const bool ok = result.checks.error_bounds && result.checks.estimate_range && result.checks.threshold;
  json manifest{
      {"tool", "fwdest"},
      {"version", kToolVersion},
      {"rng", kRngAlgorithm},
      {"started_at", started},
      {"finished_at", finished},
      {"config", doc},
      {"schedules", cfg.schedules.build(cfg.process.alphabet.size()).description},
      {"mode", cfg.payoff ? "payoff" : "distribution"},
      {"schemas",
       {{"metrics", {{"version", kMetricsSchema}, {"columns", metrics_columns(cfg.process.alphabet, cfg.wide)}}},
        {"tails", {{"version", kTailsSchema}, {"columns", tails_columns()}}}}},
      {"files", {"metrics.csv", "tails.csv"}},
      {"checks",
       {{"error_bounds", result.checks.error_bounds},
        {"estimate_range", result.checks.estimate_range},
        {"threshold", result.checks.threshold}}},
  };
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  std::ostringstream summary;
  summary << "wrote " << result.rows.size() << " metric rows and " << result.tails.size() << " tail rows to "
          << out_dir.string() << "\nchecks: error_bounds=" << (result.checks.error_bounds ? "pass" : "fail")
          << " estimate_range=" << (result.checks.estimate_range ? "pass" : "fail")
          << " threshold=" << (result.checks.threshold ? "pass" : "fail");
  return SimulateOutcome{ok, summary.str()};
}

LemmaOutcome run_lemmas(const json& doc) {
  const auto cfg = parse_lemmas(doc);
  const Process process(cfg.process);
  const auto sch = cfg.schedules.build(process.alphabet_size());
  LemmaOutcome out;
  std::ostringstream text;

  auto note = [&](const std::string& name, CheckStatus status, const std::string& detail, const std::string& msg) {
    text << name << ": " << to_string(status) << " (" << detail << ")";
    if (!msg.empty()) text << " - " << msg;
    text << '\n';
    if (status == CheckStatus::Fail) out.passed = false;
    if (status == CheckStatus::Inconclusive || status == CheckStatus::Skipped)
      out.warnings.push_back(name + " " + to_string(status) + (msg.empty() ? "" : ": " + msg));
  };

  const auto& rs = cfg.resampling;
  const auto r1 = check_lemma_resampling(process, rs.k, rs.j, rs.n, rs.replicates, cfg.seed, rs.block_length);
  note("resampling", r1.status,
       "chi2=" + format_number(r1.statistic) + " df=" + std::to_string(r1.degrees_of_freedom) +
           " critical=" + format_number(r1.critical_value) + " usable=" + std::to_string(r1.usable) +
           " excluded=" + std::to_string(r1.excluded),
       r1.message);
  out.report["resampling"] = {{"status", to_string(r1.status)},
                              {"k", r1.k},
                              {"j", r1.j},
                              {"n", r1.n},
                              {"block_length", r1.block_length},
                              {"statistic", r1.statistic},
                              {"degrees_of_freedom", r1.degrees_of_freedom},
                              {"critical_value", r1.critical_value},
                              {"usable", r1.usable},
                              {"excluded", r1.excluded},
                              {"excluded_fraction", r1.excluded_fraction},
                              {"observed", r1.observed},
                              {"expected", r1.expected},
                              {"message", r1.message}};

  const auto r2 = check_kappa_divergence(process, sch, cfg.kappa.horizon, cfg.kappa.replicates, cfg.seed,
                                         cfg.kappa.eval_grid);
  note("kappa-divergence", r2.status,
       "n=" + std::to_string(r2.decisive_n) + " fraction_at_cap=" + format_number(r2.decisive_fraction), r2.message);
  json rows = json::array();
  for (const auto& r : r2.rows)
    rows.push_back({{"n", r.n},
                    {"K", r.cap},
                    {"J", r.threshold},
                    {"min_kappa", r.min_kappa},
                    {"median_kappa", r.median_kappa},
                    {"fraction_at_cap", r.fraction_at_cap}});
  out.report["kappa_divergence"] = {{"status", to_string(r2.status)},
                                    {"decisive_n", r2.decisive_n},
                                    {"decisive_fraction", r2.decisive_fraction},
                                    {"rows", rows},
                                    {"message", r2.message}};

  const auto& rt = cfg.return_time;
  const auto r3 = check_return_time_bound(process, rt.n, rt.visits, rt.replicates, rt.block, cfg.seed);
  note("return-time", r3.status,
       "frequency=" + format_number(r3.frequency) + " bound=" + format_number(r3.bound) +
           " margin=" + format_number(r3.margin),
       r3.message);
  out.report["return_time"] = {{"status", to_string(r3.status)}, {"n", r3.n},           {"D", r3.visits},
                               {"replicates", r3.replicates},    {"hits", r3.hits},     {"frequency", r3.frequency},
                               {"bound", r3.bound},              {"margin", r3.margin}};
  out.report["passed"] = out.passed;
  for (const auto& w : out.warnings) text << "warning: " << w << '\n';
  out.summary = text.str();
  return out;
}

}  // namespace fwdest
