#pragma once

#include <span>
#include <vector>

#include "palp/cost_network.hpp"
#include "palp/mdp.hpp"
#include "palp/partition.hpp"

namespace palp {

/// A constraint is violated only when its left-hand side is below -1e-9.
inline constexpr double kViolationTolerance = 1e-9;

/// One summand coefficient * T_a(x) of a constraint left-hand side.
struct ScaledTerm {
  std::span<const Factor> per_action;
  double coefficient = 1.0;
};

struct ViolationReport {
  Assignment assignment;  // over the constraint's scope, sorted by variable id
  int action = 0;
  double value = 0.0;     // LHS re-evaluated at (assignment, action)
  bool violated = false;
};

/// sum_t c_t T_{t,a}(x) + offset at a state vector covering the term scopes.
double evaluate_constraint(std::span<const ScaledTerm> terms, double offset, int action,
                           std::span<const int> state);

/// Global minimiser over the scope union and all actions by min-sum
/// bucket elimination along `order`, one pass per action. Back-pointers
/// prefer the lowest value and ties across actions go to the lowest id.
ViolationReport min_constraint_ve(std::span<const ScaledTerm> terms, double offset,
                                  int num_actions, std::span<const VarId> order,
                                  double tolerance = kViolationTolerance);

/// Brute-force reference. Scans assignments in row-major order (actions
/// innermost), keeping the first minimum. Refuses scopes beyond 2^20 joint
/// assignments.
ViolationReport exhaustive_min(std::span<const ScaledTerm> terms, double offset,
                               int num_actions, double tolerance = kViolationTolerance);

enum class OracleKind { VariableElimination, Exhaustive };

/// Oracle bound to one constraint space. The elimination order is computed
/// once; queries only differ in the weights.
///
/// Row k of the partitioned constraint is
///   sum_{basis i in k} d_{k,i} w_i F_i(x,a) - sum_{reward j in k} d_{k,j} R_j(x,a)
///     + (1 - gamma) w_0^k.
/// The full ALP constraint is the single space holding every term with unit
/// coefficients and w_0 in place of w_0^k.
class SpaceOracle {
 public:
  SpaceOracle(const CostNetwork& net, ConstraintSpace space,
              OracleKind kind = OracleKind::VariableElimination,
              EliminationHeuristic heuristic = EliminationHeuristic::MinDegree);

  ViolationReport query(std::span<const double> w, double space_constant,
                        double tolerance = kViolationTolerance) const;

  std::vector<ScaledTerm> scaled_terms(std::span<const double> w) const;
  double offset(double space_constant) const { return (1.0 - net_->gamma) * space_constant; }

  const ConstraintSpace& space() const { return space_; }
  const std::vector<VarId>& order() const { return order_; }

 private:
  const CostNetwork* net_;
  ConstraintSpace space_;
  OracleKind kind_;
  std::vector<VarId> order_;
};

/// The whole ALP constraint as a single space.
ConstraintSpace full_constraint_space(const CostNetwork& net);

ViolationReport palp_space_min(const ConstraintSpace& space, const CostNetwork& net,
                               std::span<const double> w, double space_constant,
                               OracleKind kind = OracleKind::VariableElimination);

struct DeltaReport {
  double delta = 0.0;
  int num_spaces = 0;
  double penalty = 0.0;  // K * delta / (1 - gamma)
  std::vector<double> space_minima;
};

/// Worst negative row of D M_w(x,a) + (1-gamma) w_0 / K over all spaces,
/// states and actions, i.e. how far w is from partitioned feasibility when
/// its constant weight is split evenly.
DeltaReport delta_diagnostic(std::span<const ConstraintSpace> spaces, const CostNetwork& net,
                             std::span<const double> w,
                             OracleKind kind = OracleKind::VariableElimination);

}  // namespace palp
