#include "fwdest/process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <utility>

#include "fwdest/errors.hpp"

namespace fwdest {

namespace {

constexpr double kRowTolerance = 1e-12;
constexpr double kStationaryResidual = 1e-12;
constexpr std::size_t kMaxChainStates = std::size_t{1} << 20;

// Transition structure with only positive-probability edges.
struct SparseChain {
  std::size_t states = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> out;
};

SparseChain dense_chain(const Matrix& p) {
  SparseChain c;
  c.states = p.rows();
  c.out.resize(c.states);
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j)
      if (p(i, j) > 0.0) c.out[i].emplace_back(j, p(i, j));
  return c;
}

SparseChain block_chain(const Matrix& transition, std::size_t alphabet_size, std::size_t blocks) {
  SparseChain c;
  c.states = blocks;
  c.out.resize(blocks);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t y = 0; y < alphabet_size; ++y)
      if (transition(b, y) > 0.0) c.out[b].emplace_back((b * alphabet_size + y) % blocks, transition(b, y));
  return c;
}

std::vector<std::size_t> bfs_levels(const std::vector<std::vector<std::size_t>>& adj) {
  std::vector<std::size_t> level(adj.size(), SIZE_MAX);
  std::queue<std::size_t> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (auto v : adj[u])
      if (level[v] == SIZE_MAX) {
        level[v] = level[u] + 1;
        q.push(v);
      }
  }
  return level;
}

void require_ergodic(const SparseChain& c, const std::string& field) {
  std::vector<std::vector<std::size_t>> fwd(c.states), rev(c.states);
  for (std::size_t u = 0; u < c.states; ++u)
    for (const auto& [v, p] : c.out[u]) {
      fwd[u].push_back(v);
      rev[v].push_back(u);
    }
  const auto lf = bfs_levels(fwd);
  const auto lr = bfs_levels(rev);
  for (std::size_t s = 0; s < c.states; ++s)
    if (lf[s] == SIZE_MAX || lr[s] == SIZE_MAX)
      throw ConfigError(field, "chain is reducible (state " + std::to_string(s) + " is not mutually reachable with state 0)");
  // The period is the gcd of level[u] + 1 - level[v] over all edges.
  std::size_t period = 0;
  for (std::size_t u = 0; u < c.states; ++u)
    for (auto v : fwd[u]) {
      const auto a = static_cast<long long>(lf[u]) + 1 - static_cast<long long>(lf[v]);
      period = std::gcd(period, static_cast<std::size_t>(a < 0 ? -a : a));
    }
  if (period != 1) throw ConfigError(field, "chain is periodic with period " + std::to_string(period));
}

double residual(const SparseChain& c, const std::vector<double>& pi) {
  std::vector<double> next(c.states, 0.0);
  for (std::size_t u = 0; u < c.states; ++u)
    for (const auto& [v, p] : c.out[u]) next[v] += pi[u] * p;
  double r = 0.0;
  for (std::size_t s = 0; s < c.states; ++s) r = std::max(r, std::abs(next[s] - pi[s]));
  return r;
}

void normalize(std::vector<double>& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (auto& x : v) x /= total;
}

// Solves pi (P - I) = 0 with sum(pi) = 1 by Gaussian elimination on the transposed system.
std::vector<double> solve_stationary(const SparseChain& c) {
  const std::size_t n = c.states;
  std::vector<double> a(n * (n + 1), 0.0);
  auto at = [&](std::size_t r, std::size_t col) -> double& { return a[r * (n + 1) + col]; };
  for (std::size_t u = 0; u < n; ++u) {
    at(u, u) -= 1.0;
    for (const auto& [v, p] : c.out[u]) at(v, u) += p;
  }
  for (std::size_t col = 0; col < n; ++col) at(n - 1, col) = 1.0;
  at(n - 1, n) = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(at(r, col)) > std::abs(at(piv, col))) piv = r;
    if (piv != col)
      for (std::size_t k = 0; k <= n; ++k) std::swap(at(piv, k), at(col, k));
    const double d = at(col, col);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || at(r, col) == 0.0) continue;
      const double f = at(r, col) / d;
      for (std::size_t k = col; k <= n; ++k) at(r, k) -= f * at(col, k);
    }
  }
  std::vector<double> pi(n);
  for (std::size_t s = 0; s < n; ++s) pi[s] = std::max(0.0, at(s, n) / at(s, s));
  normalize(pi);
  return pi;
}

std::vector<double> stationary_law(const SparseChain& c, const std::string& field) {
  require_ergodic(c, field);
  const std::size_t n = c.states;

  // Doubly stochastic chains have the uniform law.
  std::vector<double> colsum(n, 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (const auto& [v, p] : c.out[u]) colsum[v] += p;
  if (std::all_of(colsum.begin(), colsum.end(), [](double s) { return std::abs(s - 1.0) <= kRowTolerance; })) {
    std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
    if (residual(c, uniform) <= kStationaryResidual) return uniform;
  }

  // Power iteration on the lazy chain (P + I) / 2, which shares pi and has no eigenvalue near -1.
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  std::size_t edges = 0;
  for (const auto& o : c.out) edges += o.size();
  const std::size_t max_iter = std::max<std::size_t>(1000, 400'000'000 / std::max<std::size_t>(1, edges + n));
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (std::size_t s = 0; s < n; ++s) next[s] = 0.5 * pi[s];
    for (std::size_t u = 0; u < n; ++u)
      for (const auto& [v, p] : c.out[u]) next[v] += 0.5 * pi[u] * p;
    normalize(next);
    double delta = 0.0;
    for (std::size_t s = 0; s < n; ++s) delta = std::max(delta, std::abs(next[s] - pi[s]));
    pi.swap(next);
    if (delta <= 1e-17 || (it % 64 == 63 && residual(c, pi) <= 0.01 * kStationaryResidual)) break;
  }
  if (residual(c, pi) <= kStationaryResidual) return pi;
  if (n <= 2048) {
    pi = solve_stationary(c);
    if (residual(c, pi) <= kStationaryResidual) return pi;
  }
  throw ConfigError(field, "stationary law did not converge to 1e-12");
}

std::uint64_t ipow(std::size_t base, std::size_t e) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

std::uint64_t encode_block(std::span<const Symbol> block, std::size_t alphabet_size) {
  std::uint64_t code = 0;
  for (Symbol s : block) code = code * alphabet_size + s;
  return code;
}

void require_symbols(std::span<const Symbol> xs, std::size_t alphabet_size) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] >= alphabet_size)
      throw DomainError("symbol index " + std::to_string(xs[i]) + " at position " + std::to_string(i) +
                        " outside alphabet");
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw DomainError("matrix data does not match its shape");
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw DomainError("ragged matrix rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Matrix(rows.size(), cols, std::move(data));
}

void validate_stochastic(const Matrix& m, const std::string& field) {
  if (m.rows() == 0 || m.cols() == 0) throw ConfigError(field, "matrix is empty");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const std::string where = field + "[" + std::to_string(r) + "]";
    double sum = 0.0;
    for (double p : m.row(r)) {
      if (!std::isfinite(p) || p < 0.0) throw ConfigError(where, "row has a negative or non-finite entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowTolerance) {
      std::ostringstream os;
      os.precision(12);
      os << "row " << r << " sums to " << sum << ", expected 1";
      throw ConfigError(where, os.str());
    }
  }
}

std::vector<double> stationary_distribution(const Matrix& transition) {
  if (transition.rows() != transition.cols()) throw ConfigError("transition", "matrix must be square");
  validate_stochastic(transition, "transition");
  return stationary_law(dense_chain(transition), "transition");
}

std::string ProcessSpec::kind() const {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IidModel>) return "iid";
        else if constexpr (std::is_same_v<T, MarkovModel>) return "markov";
        else return "hmm";
      },
      model);
}

Process::Process(ProcessSpec spec) {
  auto st = std::make_shared<State>();
  const std::size_t a = spec.alphabet.size();
  st->alphabet_size = a;

  if (const auto* iid = std::get_if<IidModel>(&spec.model)) {
    if (iid->probabilities.size() != a)
      throw ConfigError("process.probabilities", "expected " + std::to_string(a) + " entries");
    validate_stochastic(Matrix(1, a, iid->probabilities), "process.probabilities");
    st->state_law = iid->probabilities;
    st->initial = std::make_unique<Categorical>(st->state_law);
  } else if (const auto* mk = std::get_if<MarkovModel>(&spec.model)) {
    if (mk->order == 0) throw ConfigError("process.order", "must be at least 1");
    const double states = std::pow(static_cast<double>(a), static_cast<double>(mk->order));
    if (states > static_cast<double>(kMaxChainStates))
      throw ConfigError("process.order", "|X|^order exceeds " + std::to_string(kMaxChainStates) + " contexts");
    st->block_count = ipow(a, mk->order);
    if (mk->transition.rows() != st->block_count || mk->transition.cols() != a)
      throw ConfigError("process.transition", "expected " + std::to_string(st->block_count) + " rows of " +
                                                  std::to_string(a) + " entries");
    validate_stochastic(mk->transition, "process.transition");
    st->state_law = stationary_law(block_chain(mk->transition, a, st->block_count), "process.transition");
    st->initial = std::make_unique<Categorical>(st->state_law);
    st->rows.reserve(st->block_count);
    for (std::size_t b = 0; b < st->block_count; ++b) st->rows.emplace_back(mk->transition.row(b));
  } else {
    const auto& hmm = std::get<HiddenMarkovModel>(spec.model);
    const auto& h = hmm.hidden_transition;
    if (h.rows() != h.cols()) throw ConfigError("process.hidden_transition", "matrix must be square");
    validate_stochastic(h, "process.hidden_transition");
    if (hmm.emission.rows() != h.rows() || hmm.emission.cols() != a)
      throw ConfigError("process.emission", "expected " + std::to_string(h.rows()) + " rows of " +
                                                std::to_string(a) + " entries");
    validate_stochastic(hmm.emission, "process.emission");
    st->state_law = stationary_law(dense_chain(h), "process.hidden_transition");
    st->initial = std::make_unique<Categorical>(st->state_law);
    for (std::size_t s = 0; s < h.rows(); ++s) {
      st->rows.emplace_back(h.row(s));
      st->emissions.emplace_back(hmm.emission.row(s));
    }
  }
  st->spec = std::make_shared<const ProcessSpec>(std::move(spec));
  state_ = std::move(st);
}

std::vector<double> Process::marginal() const {
  const std::size_t a = alphabet_size();
  std::vector<double> m(a, 0.0);
  const auto& model = spec().model;
  if (std::holds_alternative<IidModel>(model)) {
    m.assign(state_->state_law.begin(), state_->state_law.end());
  } else if (std::holds_alternative<MarkovModel>(model)) {
    for (std::size_t b = 0; b < state_->block_count; ++b) m[b % a] += state_->state_law[b];
  } else {
    const auto& e = std::get<HiddenMarkovModel>(model).emission;
    for (std::size_t s = 0; s < e.rows(); ++s)
      for (std::size_t x = 0; x < a; ++x) m[x] += state_->state_law[s] * e(s, x);
  }
  return m;
}

double Process::block_probability(std::span<const Symbol> block) const {
  const std::size_t a = alphabet_size();
  require_symbols(block, a);
  if (block.empty()) return 1.0;
  const auto& model = spec().model;
  if (const auto* iid = std::get_if<IidModel>(&model)) {
    double p = 1.0;
    for (Symbol s : block) p *= iid->probabilities[s];
    return p;
  }
  if (const auto* mk = std::get_if<MarkovModel>(&model)) {
    const std::size_t k = mk->order;
    if (block.size() <= k) {
      const std::uint64_t tail = ipow(a, k - block.size());
      const std::uint64_t head = encode_block(block, a) * tail;
      double p = 0.0;
      for (std::uint64_t t = 0; t < tail; ++t) p += state_->state_law[head + t];
      return p;
    }
    std::uint64_t ctx = encode_block(block.first(k), a);
    double p = state_->state_law[ctx];
    for (std::size_t t = k; t < block.size(); ++t) {
      p *= mk->transition(ctx, block[t]);
      ctx = (ctx * a + block[t]) % state_->block_count;
    }
    return p;
  }
  const auto& hmm = std::get<HiddenMarkovModel>(model);
  const std::size_t s_count = hmm.hidden_transition.rows();
  std::vector<double> alpha(s_count), next(s_count);
  for (std::size_t s = 0; s < s_count; ++s) alpha[s] = state_->state_law[s] * hmm.emission(s, block[0]);
  for (std::size_t t = 1; t < block.size(); ++t) {
    for (std::size_t s2 = 0; s2 < s_count; ++s2) {
      double acc = 0.0;
      for (std::size_t s = 0; s < s_count; ++s) acc += alpha[s] * hmm.hidden_transition(s, s2);
      next[s2] = acc * hmm.emission(s2, block[t]);
    }
    alpha.swap(next);
  }
  return std::accumulate(alpha.begin(), alpha.end(), 0.0);
}

SymbolSequence Process::generate(std::uint64_t seed, std::uint64_t horizon) const {
  Rng rng(seed);
  const std::size_t a = alphabet_size();
  const std::uint64_t length = horizon + 1;
  std::vector<Symbol> out;
  out.reserve(length);
  const auto& model = spec().model;
  if (std::holds_alternative<IidModel>(model)) {
    while (out.size() < length) out.push_back(state_->initial->sample(rng));
  } else if (const auto* mk = std::get_if<MarkovModel>(&model)) {
    const std::size_t k = mk->order;
    std::uint64_t ctx = state_->initial->sample(rng);
    std::vector<Symbol> first(k);
    std::uint64_t c = ctx;
    for (std::size_t i = k; i-- > 0;) {
      first[i] = static_cast<Symbol>(c % a);
      c /= a;
    }
    for (std::size_t i = 0; i < k && out.size() < length; ++i) out.push_back(first[i]);
    while (out.size() < length) {
      const Symbol y = state_->rows[ctx].sample(rng);
      out.push_back(y);
      ctx = (ctx * a + y) % state_->block_count;
    }
  } else {
    std::size_t s = state_->initial->sample(rng);
    out.push_back(state_->emissions[s].sample(rng));
    while (out.size() < length) {
      s = state_->rows[s].sample(rng);
      out.push_back(state_->emissions[s].sample(rng));
    }
  }
  return SymbolSequence(alphabet(), out);
}

std::vector<double> Process::markov_short_history(std::span<const Symbol> history) const {
  const auto& mk = std::get<MarkovModel>(spec().model);
  const std::size_t a = alphabet_size();
  const std::uint64_t pre_count = ipow(a, mk.order - history.size());
  const std::uint64_t span_h = ipow(a, history.size());
  const std::uint64_t h = encode_block(history, a);
  std::vector<double> pred(a, 0.0);
  double total = 0.0;
  for (std::uint64_t pre = 0; pre < pre_count; ++pre) {
    const std::uint64_t b = pre * span_h + h;
    const double w = state_->state_law[b];
    if (w == 0.0) continue;
    total += w;
    for (std::size_t y = 0; y < a; ++y) pred[y] += w * mk.transition(b, y);
  }
  if (total <= 0.0) throw DomainError("history has zero probability under the model");
  for (auto& p : pred) p /= total;
  return pred;
}

std::vector<double> Process::conditional(std::span<const Symbol> history) const {
  if (history.empty()) throw DomainError("conditional law needs at least one observed symbol");
  require_symbols(history, alphabet_size());
  auto f = filter();
  for (Symbol x : history) f.observe(x);
  const auto p = f.predictive();
  return {p.begin(), p.end()};
}

double Process::payoff_expectation(std::span<const Symbol> history, std::span<const double> payoff) const {
  if (payoff.size() != alphabet_size()) throw DomainError("payoff size does not match alphabet");
  const auto p = conditional(history);
  double e = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) e += p[x] * payoff[x];
  return e;
}

OracleFilter Process::filter() const { return OracleFilter(*this); }

OracleFilter::OracleFilter(const Process& process) : process_(process) {
  const auto& st = *process_.state_;
  predictive_.assign(st.alphabet_size, 0.0);
  if (const auto* hmm = std::get_if<HiddenMarkovModel>(&st.spec->model)) {
    alpha_.assign(hmm->hidden_transition.rows(), 0.0);
    scratch_.assign(alpha_.size(), 0.0);
  }
}

void OracleFilter::observe(Symbol x) {
  const auto& st = *process_.state_;
  if (x >= st.alphabet_size) throw DomainError("symbol index " + std::to_string(x) + " outside alphabet");
  const auto& model = st.spec->model;
  if (const auto* iid = std::get_if<IidModel>(&model)) {
    if (observed_ == 0) predictive_ = iid->probabilities;
  } else if (const auto* mk = std::get_if<MarkovModel>(&model)) {
    context_ = (context_ * st.alphabet_size + x) % st.block_count;
    if (observed_ + 1 < mk->order) {
      prefix_.push_back(x);
      predictive_ = process_.markov_short_history(prefix_);
    } else {
      const auto row = mk->transition.row(context_);
      std::copy(row.begin(), row.end(), predictive_.begin());
    }
  } else {
    const auto& hmm = std::get<HiddenMarkovModel>(model);
    const auto& h = hmm.hidden_transition;
    const std::size_t s_count = h.rows();
    if (observed_ == 0) {
      for (std::size_t s = 0; s < s_count; ++s) alpha_[s] = st.state_law[s] * hmm.emission(s, x);
    } else {
      for (std::size_t s2 = 0; s2 < s_count; ++s2) {
        double acc = 0.0;
        for (std::size_t s = 0; s < s_count; ++s) acc += alpha_[s] * h(s, s2);
        scratch_[s2] = acc * hmm.emission(s2, x);
      }
      alpha_.swap(scratch_);
    }
    const double total = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
    if (!(total > 0.0)) throw DomainError("history has zero probability under the model");
    for (auto& v : alpha_) v /= total;
    std::fill(predictive_.begin(), predictive_.end(), 0.0);
    for (std::size_t s2 = 0; s2 < s_count; ++s2) {
      double w = 0.0;
      for (std::size_t s = 0; s < s_count; ++s) w += alpha_[s] * h(s, s2);
      for (std::size_t y = 0; y < st.alphabet_size; ++y) predictive_[y] += w * hmm.emission(s2, y);
    }
  }
  ++observed_;
}

Trajectory generate(const Process& process, std::uint64_t seed, std::uint64_t horizon,
                    std::span<const std::uint64_t> eval_points) {
  Trajectory t{process.generate(seed, horizon), {eval_points.begin(), eval_points.end()}, {}, seed};
  std::vector<std::uint64_t> order(eval_points.begin(), eval_points.end());
  for (auto n : order)
    if (n > horizon) throw DomainError("evaluation point " + std::to_string(n) + " beyond horizon");
  t.oracle_conditionals.resize(order.size());
  auto filter = process.filter();
  const auto data = t.seq.view();
  std::size_t next = 0;
  for (std::uint64_t n = 0; n <= horizon && next < order.size(); ++n) {
    filter.observe(data[n]);
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i] == n) {
        const auto p = filter.predictive();
        t.oracle_conditionals[i].assign(p.begin(), p.end());
        ++next;
      }
  }
  return t;
}

}  // namespace fwdest
