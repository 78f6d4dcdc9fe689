#include "palp/factor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace palp {

std::size_t table_size(std::span<const int> dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

std::vector<VarId> scope_union(std::span<const VarId> a, std::span<const VarId> b) {
  std::vector<VarId> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Factor::Factor(std::vector<VarId> scope, std::vector<int> dims, std::vector<double> table)
    : scope_(std::move(scope)), dims_(std::move(dims)), table_(std::move(table)) {
  if (scope_.size() != dims_.size())
    throw std::invalid_argument("factor: scope and dims differ in length");
  for (int d : dims_)
    if (d < 1) throw std::invalid_argument("factor: domain size must be positive");
  for (std::size_t i = 0; i < scope_.size(); ++i)
    for (std::size_t j = i + 1; j < scope_.size(); ++j)
      if (scope_[i] == scope_[j])
        throw std::invalid_argument("factor: duplicate variable " + std::to_string(scope_[i]));
  if (table_.size() != table_size(dims_))
    throw std::invalid_argument("factor: table length " + std::to_string(table_.size()) +
                                " does not match scope size " +
                                std::to_string(table_size(dims_)));
}

Factor Factor::constant(double value) { return Factor({}, {}, {value}); }

Factor Factor::zeros(std::vector<VarId> scope, std::vector<int> dims) {
  std::size_t n = table_size(dims);
  return Factor(std::move(scope), std::move(dims), std::vector<double>(n, 0.0));
}

bool Factor::contains(VarId v) const {
  return std::find(scope_.begin(), scope_.end(), v) != scope_.end();
}

std::size_t Factor::index(std::span<const int> state) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < scope_.size(); ++i)
    idx = idx * static_cast<std::size_t>(dims_[i]) + static_cast<std::size_t>(state[scope_[i]]);
  return idx;
}

void Factor::decode(std::size_t idx, std::span<int> state) const {
  for (std::size_t i = scope_.size(); i-- > 0;) {
    auto d = static_cast<std::size_t>(dims_[i]);
    state[scope_[i]] = static_cast<int>(idx % d);
    idx /= d;
  }
}

}  // namespace palp
