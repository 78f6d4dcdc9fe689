#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace palp {

using VarId = int;

/// Product of domain sizes; 1 for an empty scope.
std::size_t table_size(std::span<const int> dims);

/// Sorted, de-duplicated union of two variable lists.
std::vector<VarId> scope_union(std::span<const VarId> a, std::span<const VarId> b);

/// A real-valued table over an ordered scope of finite variables.
///
/// Entries are stored row-major over the factor's own scope order, so the
/// last scope variable varies fastest. Every table in the library (CPDs,
/// rewards, basis functions, backprojections, elimination messages) uses
/// this one convention.
///
/// Lookups take a full state vector indexed by variable id; entries of the
/// state outside the scope are ignored.
class Factor {
 public:
  Factor() : table_{0.0} {}
  Factor(std::vector<VarId> scope, std::vector<int> dims, std::vector<double> table);

  static Factor constant(double value);
  static Factor zeros(std::vector<VarId> scope, std::vector<int> dims);

  const std::vector<VarId>& scope() const { return scope_; }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<double>& table() const { return table_; }
  std::vector<double>& table() { return table_; }
  std::size_t size() const { return table_.size(); }
  bool empty_scope() const { return scope_.empty(); }
  bool contains(VarId v) const;

  std::size_t index(std::span<const int> state) const;
  double at(std::span<const int> state) const { return table_[index(state)]; }

  /// Writes the scope values of table entry `idx` into `state`.
  void decode(std::size_t idx, std::span<int> state) const;

  friend bool operator==(const Factor&, const Factor&) = default;

 private:
  std::vector<VarId> scope_;
  std::vector<int> dims_;
  std::vector<double> table_;
};

/// Calls fn() once per joint assignment of `scope`, in row-major order,
/// with the assignment written into `state`.
template <class Fn>
void for_each_assignment(std::span<const VarId> scope, std::span<const int> dims,
                         std::span<int> state, Fn&& fn) {
  for (VarId v : scope) state[v] = 0;
  while (true) {
    fn();
    int pos = static_cast<int>(scope.size()) - 1;
    while (pos >= 0) {
      VarId v = scope[pos];
      if (++state[v] < dims[pos]) break;
      state[v] = 0;
      --pos;
    }
    if (pos < 0) return;
  }
}

}  // namespace palp
