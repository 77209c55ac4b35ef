#include <gtest/gtest.h>

#include "fwdest/config.hpp"
#include "fwdest/errors.hpp"

using namespace fwdest;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_experiment(parse_document(text));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesMarkovExperiment) {
  const auto cfg = parse_experiment(parse_document(R"({
    "process": {"type": "markov", "alphabet": ["a", "b"], "order": 1,
                "transition": [[0.7, 0.3], [0.3, 0.7]]},
    "schedules": {"K": {"kind": "log", "coefficient": 0.2}, "J": {"kind": "power", "exponent": 0.4}},
    "experiment": {"horizon": 500, "replicates": 3, "seed": 9, "payoff": {"indicator": "b"},
                   "eval_grid": [10, 500], "epsilons": [0.1]}
  })"));
  EXPECT_EQ(cfg.process.kind(), "markov");
  EXPECT_EQ(cfg.process.alphabet.name(1), "b");
  EXPECT_EQ(cfg.horizon, 500u);
  EXPECT_EQ(cfg.base_seed, 9u);
  ASSERT_TRUE(cfg.payoff.has_value());
  EXPECT_EQ((*cfg.payoff)(1), 1.0);
  EXPECT_EQ(cfg.schedules.cap_coefficient, 0.2);
  EXPECT_EQ(cfg.schedules.threshold_exponent, 0.4);
  EXPECT_EQ(cfg.eval_grid, (std::vector<std::uint64_t>{10, 500}));
}

TEST(Config, DistributionModeByDefault) {
  const auto cfg = parse_experiment(parse_document(
      R"({"process": {"type": "iid", "probabilities": [0.5, 0.5]}, "experiment": {"horizon": 10}})"));
  EXPECT_FALSE(cfg.payoff.has_value());
  EXPECT_EQ(cfg.replicates, 1u);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(field_of(R"({"process": {"type": "iid", "probabilities": [0.5, "0.5"]}, "experiment": {"horizon": 10}})"),
            "process.probabilities[1]");
  EXPECT_EQ(field_of(R"({"process": {"type": "markov", "order": 1, "transition": [[0.5, 0.5], [0.4, 0.4]]},
                        "experiment": {"horizon": 10}})"),
            "process.transition[1]");
  EXPECT_EQ(field_of(R"({"process": {"type": "iid", "probabilities": [0.5, 0.5]}, "experiment": {"horizon": "10"}})"),
            "experiment.horizon");
  EXPECT_EQ(field_of(R"({"process": {"type": "bogus"}, "experiment": {"horizon": 10}})"), "process.type");
  EXPECT_EQ(field_of(R"({"process": {"type": "iid", "probabilities": [0.5, 0.5]}})"), "experiment");
  EXPECT_EQ(field_of(R"({"process": {"type": "iid", "probabilities": [0.5, 0.5]},
                        "schedules": {"J": {"kind": "cubic"}}, "experiment": {"horizon": 10}})"),
            "schedules.J.kind");
}

TEST(Config, QuotedNumbersRejected) {
  try {
    parse_experiment(parse_document(
        R"({"process": {"type": "iid", "probabilities": [0.5, 0.5]}, "experiment": {"horizon": 10, "replicates": "2"}})"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "experiment.replicates");
    EXPECT_NE(std::string(e.what()).find("not a string"), std::string::npos);
  }
}

TEST(Config, SyntaxErrorIsConfigError) { EXPECT_THROW(parse_document("{\"process\": "), ConfigError); }

TEST(Config, LemmaDefaults) {
  const auto lc = parse_lemmas(default_lemma_document());
  EXPECT_EQ(lc.process.kind(), "iid");
  EXPECT_EQ(lc.resampling.replicates, 5000u);
  EXPECT_EQ(lc.kappa.horizon, std::uint64_t{1} << 21);
  EXPECT_EQ(lc.return_time.visits, 30u);
}

TEST(Config, LemmaBlockUsesSymbolNames) {
  auto doc = default_lemma_document();
  doc["process"]["alphabet"] = {"H", "T"};
  doc["lemmas"]["return_time"]["block"] = {"T", "H"};
  EXPECT_EQ(parse_lemmas(doc).return_time.block, (std::vector<Symbol>{1, 0}));
  doc["lemmas"]["return_time"]["block"] = {"Z"};
  EXPECT_THROW(parse_lemmas(doc), ConfigError);
}
