#include "fwdest/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fwdest/errors.hpp"

namespace fwdest {

using nlohmann::json;

namespace {

const json& require(const json& node, const char* key, const std::string& path) {
  if (!node.is_object()) throw ConfigError(path, "expected an object");
  auto it = node.find(key);
  if (it == node.end()) throw ConfigError(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

const json* optional(const json& node, const char* key, const std::string& path) {
  if (node.is_null()) return nullptr;
  if (!node.is_object()) throw ConfigError(path, "expected an object");
  auto it = node.find(key);
  return it == node.end() ? nullptr : &*it;
}

double number(const json& v, const std::string& path) {
  if (v.is_string()) throw ConfigError(path, "must be a JSON number, not a string");
  if (!v.is_number()) throw ConfigError(path, "must be a number");
  return v.get<double>();
}

std::uint64_t unsigned_int(const json& v, const std::string& path) {
  if (v.is_string()) throw ConfigError(path, "must be a JSON number, not a string");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ConfigError(path, "must be nonnegative");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  // 1e5 style literals
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d < 0x1p63 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError(path, "must be a nonnegative integer");
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::uint64_t> unsigned_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of integers");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(unsigned_int(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Matrix matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a nonempty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < v.size(); ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    rows.push_back(number_list(v[r], rp));
    if (rows.back().size() != rows.front().size()) throw ConfigError(rp, "row length differs from row 0");
  }
  return Matrix::from_rows(rows);
}

Alphabet alphabet_for(const json& node, std::size_t size, const std::string& path) {
  const json* a = optional(node, "alphabet", path);
  if (!a) {
    if (size < 2) throw ConfigError(path, "model implies an alphabet of fewer than two symbols");
    return Alphabet::numbered(size);
  }
  if (!a->is_array()) throw ConfigError(path + ".alphabet", "expected an array of symbol names");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < a->size(); ++i) {
    const auto& s = (*a)[i];
    if (!s.is_string()) throw ConfigError(path + ".alphabet[" + std::to_string(i) + "]", "symbol names are strings");
    names.push_back(s.get<std::string>());
  }
  if (names.size() != size)
    throw ConfigError(path + ".alphabet", "has " + std::to_string(names.size()) + " symbols but the model uses " +
                                              std::to_string(size));
  try {
    return Alphabet(std::move(names));
  } catch (const DomainError& e) {
    throw ConfigError(path + ".alphabet", e.what());
  }
}

Symbol symbol_named(const Alphabet& alphabet, const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a symbol name");
  auto s = alphabet.find(v.get<std::string>());
  if (!s) throw ConfigError(path, "unknown symbol '" + v.get<std::string>() + "'");
  return *s;
}

ScheduleRule::CapKind cap_kind(const std::string& s, const std::string& path) {
  if (s == "log") return ScheduleRule::CapKind::Logarithmic;
  if (s == "constant") return ScheduleRule::CapKind::Constant;
  throw ConfigError(path, "unknown kind '" + s + "' (expected log or constant)");
}

ScheduleRule::ThresholdKind threshold_kind(const std::string& s, const std::string& path) {
  if (s == "power") return ScheduleRule::ThresholdKind::Power;
  if (s == "linear") return ScheduleRule::ThresholdKind::Linear;
  if (s == "constant") return ScheduleRule::ThresholdKind::Constant;
  throw ConfigError(path, "unknown kind '" + s + "' (expected power, linear or constant)");
}

std::string kind_of(const json& node, const std::string& path) {
  const auto& k = require(node, "kind", path);
  if (!k.is_string()) throw ConfigError(path + ".kind", "expected a string");
  return k.get<std::string>();
}

}  // namespace

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
}

json load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

namespace {

// Stochasticity and ergodicity are checked when parsing so errors point at the config.
ProcessSpec validated(ProcessSpec spec) {
  (void)Process(spec);
  return spec;
}

}  // namespace

ProcessSpec parse_process(const json& node) {
  const std::string path = "process";
  const auto& type = require(node, "type", path);
  if (!type.is_string()) throw ConfigError(path + ".type", "expected a string");
  const auto t = type.get<std::string>();
  if (t == "iid") {
    auto probs = number_list(require(node, "probabilities", path), path + ".probabilities");
    auto alphabet = alphabet_for(node, probs.size(), path);
    return validated(ProcessSpec{std::move(alphabet), IidModel{std::move(probs)}});
  }
  if (t == "markov") {
    const auto order = unsigned_int(require(node, "order", path), path + ".order");
    auto m = matrix(require(node, "transition", path), path + ".transition");
    auto alphabet = alphabet_for(node, m.cols(), path);
    return validated(ProcessSpec{std::move(alphabet), MarkovModel{static_cast<std::size_t>(order), std::move(m)}});
  }
  if (t == "hmm") {
    auto h = matrix(require(node, "hidden_transition", path), path + ".hidden_transition");
    auto e = matrix(require(node, "emission", path), path + ".emission");
    auto alphabet = alphabet_for(node, e.cols(), path);
    return validated(ProcessSpec{std::move(alphabet), HiddenMarkovModel{std::move(h), std::move(e)}});
  }
  throw ConfigError(path + ".type", "unknown process type '" + t + "' (expected iid, markov or hmm)");
}

ScheduleRule parse_schedules(const json& node) {
  ScheduleRule rule;
  const std::string path = "schedules";
  if (const json* k = optional(node, "K", path)) {
    const std::string kp = path + ".K";
    rule.cap = cap_kind(kind_of(*k, kp), kp + ".kind");
    if (const json* c = optional(*k, "coefficient", kp)) rule.cap_coefficient = number(*c, kp + ".coefficient");
    if (rule.cap == ScheduleRule::CapKind::Constant)
      rule.cap_value = unsigned_int(require(*k, "value", kp), kp + ".value");
  }
  if (const json* j = optional(node, "J", path)) {
    const std::string jp = path + ".J";
    rule.threshold = threshold_kind(kind_of(*j, jp), jp + ".kind");
    if (const json* e = optional(*j, "exponent", jp)) rule.threshold_exponent = number(*e, jp + ".exponent");
    if (rule.threshold == ScheduleRule::ThresholdKind::Constant)
      rule.threshold_value = unsigned_int(require(*j, "value", jp), jp + ".value");
  }
  return rule;
}

ExperimentConfig parse_experiment(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  ExperimentConfig cfg{parse_process(require(doc, "process", ""))};
  cfg.schedules = parse_schedules(doc.value("schedules", json()));
  const std::string path = "experiment";
  const auto& ex = require(doc, "experiment", "");
  cfg.horizon = unsigned_int(require(ex, "horizon", path), path + ".horizon");
  if (const json* v = optional(ex, "replicates", path)) cfg.replicates = unsigned_int(*v, path + ".replicates");
  if (const json* v = optional(ex, "eval_grid", path)) cfg.eval_grid = unsigned_list(*v, path + ".eval_grid");
  if (const json* v = optional(ex, "epsilons", path)) cfg.epsilons = number_list(*v, path + ".epsilons");
  if (const json* v = optional(ex, "seed", path)) cfg.base_seed = unsigned_int(*v, path + ".seed");
  if (const json* v = optional(ex, "workers", path)) cfg.workers = static_cast<unsigned>(unsigned_int(*v, path + ".workers"));
  if (const json* v = optional(ex, "wide", path)) {
    if (!v->is_boolean()) throw ConfigError(path + ".wide", "expected true or false");
    cfg.wide = v->get<bool>();
  }
  if (const json* p = optional(ex, "payoff", path)) {
    const std::string pp = path + ".payoff";
    const std::size_t a = cfg.process.alphabet.size();
    if (p->is_string()) {
      if (p->get<std::string>() != "distribution") throw ConfigError(pp, "expected \"distribution\" or an object");
    } else if (const json* ind = optional(*p, "indicator", pp)) {
      cfg.payoff = PayoffFunction::indicator(a, symbol_named(cfg.process.alphabet, *ind, pp + ".indicator"));
    } else if (const json* vals = optional(*p, "values", pp)) {
      auto v = number_list(*vals, pp + ".values");
      if (v.size() != a) throw ConfigError(pp + ".values", "expected one value per alphabet symbol");
      cfg.payoff = PayoffFunction(std::move(v));
    } else {
      throw ConfigError(pp, "expected \"distribution\", {\"indicator\": symbol} or {\"values\": [...]}");
    }
  }
  cfg.validate();
  return cfg;
}

LemmaConfig parse_lemmas(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  LemmaConfig cfg{parse_process(require(doc, "process", ""))};
  cfg.schedules = parse_schedules(doc.value("schedules", json()));
  const json lemmas = doc.value("lemmas", json::object());
  const std::string path = "lemmas";
  if (const json* v = optional(lemmas, "seed", path)) cfg.seed = unsigned_int(*v, path + ".seed");

  if (const json* r = optional(lemmas, "resampling", path)) {
    const std::string rp = path + ".resampling";
    if (const json* v = optional(*r, "k", rp)) cfg.resampling.k = unsigned_int(*v, rp + ".k");
    if (const json* v = optional(*r, "j", rp)) cfg.resampling.j = unsigned_int(*v, rp + ".j");
    if (const json* v = optional(*r, "n", rp)) cfg.resampling.n = unsigned_int(*v, rp + ".n");
    if (const json* v = optional(*r, "replicates", rp)) cfg.resampling.replicates = unsigned_int(*v, rp + ".replicates");
    if (const json* v = optional(*r, "block_length", rp)) cfg.resampling.block_length = unsigned_int(*v, rp + ".block_length");
  }
  if (const json* k = optional(lemmas, "kappa", path)) {
    const std::string kp = path + ".kappa";
    if (const json* v = optional(*k, "horizon", kp)) cfg.kappa.horizon = unsigned_int(*v, kp + ".horizon");
    if (const json* v = optional(*k, "replicates", kp)) cfg.kappa.replicates = unsigned_int(*v, kp + ".replicates");
    if (const json* v = optional(*k, "eval_grid", kp)) cfg.kappa.eval_grid = unsigned_list(*v, kp + ".eval_grid");
  }
  if (const json* t = optional(lemmas, "return_time", path)) {
    const std::string tp = path + ".return_time";
    if (const json* v = optional(*t, "n", tp)) cfg.return_time.n = unsigned_int(*v, tp + ".n");
    if (const json* v = optional(*t, "D", tp)) cfg.return_time.visits = unsigned_int(*v, tp + ".D");
    if (const json* v = optional(*t, "replicates", tp)) cfg.return_time.replicates = unsigned_int(*v, tp + ".replicates");
    if (const json* b = optional(*t, "block", tp)) {
      if (!b->is_array() || b->empty()) throw ConfigError(tp + ".block", "expected a nonempty array of symbol names");
      cfg.return_time.block.clear();
      for (std::size_t i = 0; i < b->size(); ++i)
        cfg.return_time.block.push_back(
            symbol_named(cfg.process.alphabet, (*b)[i], tp + ".block[" + std::to_string(i) + "]"));
    }
  }
  for (Symbol s : cfg.return_time.block)
    if (s >= cfg.process.alphabet.size()) throw ConfigError(path + ".return_time.block", "symbol outside alphabet");
  return cfg;
}

json default_lemma_document() {
  return json{
      {"process", {{"type", "iid"}, {"probabilities", {0.5, 0.5}}}},
      {"lemmas",
       {{"seed", 1},
        {"resampling", {{"k", 1}, {"j", 1}, {"n", 100}, {"replicates", 5000}}},
        {"kappa", {{"horizon", 1 << 21}, {"replicates", 10}}},
        {"return_time", {{"n", 100}, {"D", 30}, {"replicates", 20000}, {"block", {"1"}}}}}},
  };
}

}  // namespace fwdest
