#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "palp/factor.hpp"

namespace palp {

struct Variable {
  VarId id = 0;
  std::string name;
  int domain_size = 2;

  friend bool operator==(const Variable&, const Variable&) = default;
};

/// Values for an ordered list of variables.
struct Assignment {
  std::vector<VarId> scope;
  std::vector<int> values;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// P(X'_child | parents, a), one table per action. Each table is row-major
/// over (parents..., child), so every conditional row is contiguous.
struct Cpd {
  VarId child = 0;
  std::vector<VarId> parents;
  std::vector<std::vector<double>> tables;

  friend bool operator==(const Cpd&, const Cpd&) = default;
};

/// A local reward R_j(x_j, a); all per-action factors share one scope.
struct RewardFactor {
  std::vector<VarId> scope;
  std::vector<Factor> tables;

  friend bool operator==(const RewardFactor&, const RewardFactor&) = default;
};

/// A factored MDP with a single action variable. Immutable by convention
/// once built.
struct FactoredMdp {
  std::vector<Variable> variables;
  std::vector<std::string> actions;
  std::vector<Cpd> cpds;  // cpds[i].child == i
  std::vector<RewardFactor> rewards;
  double gamma = 0.95;

  int num_vars() const { return static_cast<int>(variables.size()); }
  int num_actions() const { return static_cast<int>(actions.size()); }
  int domain(VarId v) const { return variables[static_cast<std::size_t>(v)].domain_size; }
  std::vector<int> dims_of(std::span<const VarId> scope) const;
  std::vector<int> domain_sizes() const;

  /// Distribution of X'_v given the current full state and action.
  std::span<const double> next_distribution(VarId v, std::span<const int> state, int action) const;

  friend bool operator==(const FactoredMdp&, const FactoredMdp&) = default;
};

/// Returns one message per broken invariant; empty iff the model is valid.
std::vector<std::string> validate(const FactoredMdp& mdp);

/// Throws std::invalid_argument listing all violations.
void require_valid(const FactoredMdp& mdp);

double full_reward(const FactoredMdp& mdp, std::span<const int> state, int action);

double transition_prob(const FactoredMdp& mdp, std::span<const int> state, int action,
                       std::span<const int> next_state);

/// Flat indexing of the joint state space, row-major over variable ids.
class StateSpace {
 public:
  static constexpr std::size_t kMaxStates = std::size_t{1} << 20;

  explicit StateSpace(const FactoredMdp& mdp);

  std::size_t size() const { return size_; }
  std::size_t encode(std::span<const int> state) const;
  void decode(std::size_t index, std::span<int> state) const;
  std::vector<int> decode(std::size_t index) const;
  const std::vector<int>& dims() const { return dims_; }

 private:
  std::vector<int> dims_;
  std::size_t size_ = 1;
};

}  // namespace palp
