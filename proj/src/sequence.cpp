#include "fwdest/sequence.hpp"

#include <algorithm>

#include "fwdest/errors.hpp"

namespace fwdest {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.size() < 2) throw DomainError("alphabet needs at least two symbols");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (!index_.emplace(symbols_[i], static_cast<Symbol>(i)).second)
      throw DomainError("duplicate alphabet symbol '" + symbols_[i] + "'");
  }
}

Alphabet Alphabet::numbered(std::size_t size) {
  std::vector<std::string> names;
  names.reserve(size);
  for (std::size_t i = 0; i < size; ++i) names.push_back(std::to_string(i));
  return Alphabet(std::move(names));
}

std::optional<Symbol> Alphabet::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SymbolSequence::SymbolSequence(Alphabet alphabet, std::span<const Symbol> data)
    : alphabet_(std::move(alphabet)) {
  data_.reserve(data.size());
  for (Symbol s : data) push_back(s);
}

void SymbolSequence::push_back(Symbol s) {
  if (!alphabet_.contains(s))
    throw DomainError("symbol index " + std::to_string(s) + " outside alphabet of size " +
                      std::to_string(alphabet_.size()));
  data_.push_back(s);
}

PayoffFunction::PayoffFunction(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("payoff must be defined on at least one symbol");
}

PayoffFunction PayoffFunction::indicator(std::size_t alphabet_size, Symbol target) {
  if (target >= alphabet_size) throw DomainError("indicator target outside alphabet");
  std::vector<double> v(alphabet_size, 0.0);
  v[target] = 1.0;
  return PayoffFunction(std::move(v));
}

PayoffFunction PayoffFunction::constant(std::size_t alphabet_size, double c) {
  return PayoffFunction(std::vector<double>(alphabet_size, c));
}

double PayoffFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double PayoffFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

}  // namespace fwdest
