#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace fwdest {

using Symbol = std::uint32_t;

/// Finite ordered set of distinct symbol names, mapped bijectively onto 0..size()-1.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> symbols);

  /// Symbols named "0", "1", ..., "size-1".
  static Alphabet numbered(std::size_t size);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& name(Symbol s) const { return symbols_.at(s); }
  const std::vector<std::string>& names() const noexcept { return symbols_; }
  std::optional<Symbol> find(const std::string& name) const;
  bool contains(Symbol s) const noexcept { return s < symbols_.size(); }

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, Symbol> index_;
};

/// Append-only data segment X_0, X_1, ..., X_n over a fixed alphabet.
class SymbolSequence {
 public:
  explicit SymbolSequence(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}
  SymbolSequence(Alphabet alphabet, std::span<const Symbol> data);

  void push_back(Symbol s);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t alphabet_size() const noexcept { return alphabet_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  Symbol operator[](std::size_t i) const { return data_[i]; }
  std::span<const Symbol> view() const noexcept { return data_; }

 private:
  Alphabet alphabet_;
  std::vector<Symbol> data_;
};

/// Arbitrary real payoff g defined on every symbol.
class PayoffFunction {
 public:
  explicit PayoffFunction(std::vector<double> values);

  /// g(x) = 1 if x == target else 0.
  static PayoffFunction indicator(std::size_t alphabet_size, Symbol target);
  static PayoffFunction constant(std::size_t alphabet_size, double c);

  std::size_t size() const noexcept { return values_.size(); }
  double operator()(Symbol s) const { return values_[s]; }
  std::span<const double> values() const noexcept { return values_; }
  double min() const;
  double max() const;

 private:
  std::vector<double> values_;
};

}  // namespace fwdest
