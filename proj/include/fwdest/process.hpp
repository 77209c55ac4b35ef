#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fwdest/rng.hpp"
#include "fwdest/sequence.hpp"

namespace fwdest {

/// Dense row-major matrix of probabilities.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return std::span<const double>(data_).subspan(r * cols_, cols_); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Throws ConfigError naming `field[r]` unless every row is nonnegative and sums to 1 within 1e-12.
void validate_stochastic(const Matrix& m, const std::string& field);

/// Stationary law pi of an irreducible aperiodic transition matrix: pi P = pi, sum pi = 1,
/// with ||pi P - pi||_inf <= 1e-12. Throws ConfigError for non-stochastic,
/// reducible or periodic input.
std::vector<double> stationary_distribution(const Matrix& transition);

struct IidModel {
  std::vector<double> probabilities;
};

/// Order-k chain. Row r of `transition` is the next-symbol law given the context
/// whose base-|X| digits, oldest first, spell r.
struct MarkovModel {
  std::size_t order = 1;
  Matrix transition;
};

struct HiddenMarkovModel {
  Matrix hidden_transition;
  Matrix emission;  // hidden states x alphabet
};

/// A generative model over a finite alphabet, validated for stochasticity and ergodicity.
struct ProcessSpec {
  Alphabet alphabet;
  std::variant<IidModel, MarkovModel, HiddenMarkovModel> model;

  std::string kind() const;
};

class OracleFilter;

/// A validated stationary ergodic source with exact conditional laws.
///
/// The Markov k-block chain (resp. the hidden chain) must be irreducible and
/// aperiodic; trajectories start from its stationary law, so every generated
/// segment is a stationary sample. Immutable after construction.
class Process {
 public:
  explicit Process(ProcessSpec spec);

  const ProcessSpec& spec() const noexcept { return *state_->spec; }
  const Alphabet& alphabet() const noexcept { return state_->spec->alphabet; }
  std::size_t alphabet_size() const noexcept { return state_->alphabet_size; }

  /// Stationary law of the state chain: k-blocks for Markov, hidden states for HMM, symbols for IID.
  std::span<const double> state_law() const noexcept { return state_->state_law; }

  /// P(X_0 = x).
  std::vector<double> marginal() const;

  /// P(X_0^{L-1} = block) under the stationary law.
  double block_probability(std::span<const Symbol> block) const;

  /// X_0 .. X_N drawn from the stationary law.
  SymbolSequence generate(std::uint64_t seed, std::uint64_t horizon) const;

  /// Exact P(X_{n+1} = . | X_0^n = history). History must be nonempty.
  std::vector<double> conditional(std::span<const Symbol> history) const;

  /// E(g(X_{n+1}) | X_0^n = history).
  double payoff_expectation(std::span<const Symbol> history, std::span<const double> payoff) const;

  /// Streaming form of `conditional` for a growing history.
  OracleFilter filter() const;

 private:
  friend class OracleFilter;

  struct State {
    std::shared_ptr<const ProcessSpec> spec;
    std::size_t alphabet_size = 0;
    std::vector<double> state_law;
    std::vector<Categorical> rows;      // per context / hidden state
    std::vector<Categorical> emissions; // HMM only
    std::unique_ptr<Categorical> initial;
    std::size_t block_count = 1;        // |X|^order for Markov
  };

  std::vector<double> markov_short_history(std::span<const Symbol> history) const;

  std::shared_ptr<const State> state_;
};

/// Incremental oracle: observe X_0, X_1, ... and read P(X_{n+1} = . | X_0^n).
/// HMM filtering renormalizes each step.
class OracleFilter {
 public:
  explicit OracleFilter(const Process& process);

  void observe(Symbol x);
  std::span<const double> predictive() const noexcept { return predictive_; }
  std::size_t observed() const noexcept { return observed_; }

 private:
  void refresh();

  Process process_;
  std::size_t observed_ = 0;
  std::uint64_t context_ = 0;            // Markov: code of the last `order` symbols
  std::vector<Symbol> prefix_;           // Markov: history while shorter than the order
  std::vector<double> alpha_;            // HMM: normalized filter
  std::vector<double> scratch_;
  std::vector<double> predictive_;
};

/// A generated sample path with oracle conditionals at selected positions.
struct Trajectory {
  SymbolSequence seq;
  std::vector<std::uint64_t> eval_points;
  std::vector<std::vector<double>> oracle_conditionals;  // aligned with eval_points
  std::uint64_t rng_seed = 0;
};

Trajectory generate(const Process& process, std::uint64_t seed, std::uint64_t horizon,
                    std::span<const std::uint64_t> eval_points = {});

}  // namespace fwdest
