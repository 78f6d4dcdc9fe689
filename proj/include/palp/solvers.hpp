#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "palp/basis.hpp"
#include "palp/cost_network.hpp"
#include "palp/lp.hpp"
#include "palp/mdp.hpp"
#include "palp/oracle.hpp"
#include "palp/partition.hpp"

namespace palp {

struct SolveConfig {
  double violation_tolerance = kViolationTolerance;
  long max_iterations = 10'000;
  double weight_bound = 1e6;
  OracleKind oracle = OracleKind::VariableElimination;
  EliminationHeuristic heuristic = EliminationHeuristic::MinDegree;
  SimplexOptions simplex;
};

enum class Termination { Converged, IterationLimit, LpFailure, DuplicateCut };
const char* to_string(Termination t);

struct SolveResult {
  std::vector<double> weights;          // w_0 .. w_N
  std::vector<double> space_constants;  // w_0^k, partitioned solves only
  double objective = 0.0;               // sum_i alpha_i w_i
  long iterations = 0;
  std::vector<long> cuts_per_space;
  double seconds = 0.0;
  Termination termination = Termination::Converged;
  LpStatus lp_status = LpStatus::Optimal;
  LinearProgram lp;  // the last program solved, with every cut added so far
  bool converged() const { return termination == Termination::Converged; }
};

/// Backprojections, cost network and relevance weights for one (mdp, basis)
/// pair, shared by every solver run on it.
class Problem {
 public:
  Problem(const FactoredMdp& mdp, BasisSet basis);

  const FactoredMdp& mdp() const { return *mdp_; }
  const BasisSet& basis() const { return basis_; }
  const std::vector<BackprojectedTerm>& backprojections() const { return backprojections_; }
  const CostNetwork& network() const { return network_; }
  const std::vector<double>& alphas() const { return alphas_; }
  int num_weights() const { return static_cast<int>(basis_.size()); }

  /// f_i(x) - gamma * E[f_i(x') | x, a] for every basis, w_0's entry being 1 - gamma.
  std::vector<double> constraint_row(std::span<const int> state, int action) const;
  /// Sum_i w_i F_i(x,a) - R(x,a).
  double constraint_value(std::span<const double> w, std::span<const int> state, int action) const;
  double objective(std::span<const double> w) const;

 private:
  const FactoredMdp* mdp_;
  BasisSet basis_;
  std::vector<BackprojectedTerm> backprojections_;
  CostNetwork network_;
  std::vector<double> alphas_;
};

SolveResult solve_alp(const Problem& problem, const SolveConfig& config = {});
SolveResult solve_palp(const Problem& problem, const PartitionMatrix& d,
                       const SolveConfig& config = {});
/// One LP over `samples` i.i.d. uniform (x, a) pairs drawn from mt19937_64(seed).
SolveResult solve_sampled_alp(const Problem& problem, long samples, std::uint64_t seed,
                              const SolveConfig& config = {});

/// Smallest full-constraint value min_{x,a} sum_i w_i F_i(x,a) - R(x,a), by
/// enumeration of every state and action.
ViolationReport exhaustive_alp_check(const Problem& problem, std::span<const double> w);

struct ValueTable {
  std::vector<double> values;  // indexed by StateSpace::encode
  double residual = 0.0;
  long iterations = 0;
};

/// Bellman backups until the sup-norm residual is at most `tolerance`.
ValueTable value_iteration(const FactoredMdp& mdp, double tolerance = 1e-9,
                           long max_iterations = 1'000'000);

/// E[V(x') | x, a] over the flat table.
double expected_next_value(const FactoredMdp& mdp, const StateSpace& space,
                           std::span<const double> values, std::span<const int> state, int action,
                           std::vector<double>& scratch);

/// V^w on every state, indexed like ValueTable.
std::vector<double> tabulate_vw(const FactoredMdp& mdp, std::span<const BasisFunction> basis,
                                std::span<const double> w);

/// Weighted max-norm fit: minimise eps s.t. |V(x) - sum_i w_i f_i(x)| <= eps.
struct ChebyshevFit {
  std::vector<double> weights;
  double error = 0.0;
  LpStatus status = LpStatus::Optimal;
};
ChebyshevFit chebyshev_fit(const FactoredMdp& mdp, std::span<const BasisFunction> basis,
                           std::span<const double> target);

struct ErrorBoundReport {
  ValueTable v_star;
  ChebyshevFit fit;             // w*, ||V* - V^{w*}||_inf
  std::vector<double> w_hat;    // w* shifted along the constant basis
  double w_hat_min_constraint = 0.0;
  DeltaReport delta;
  SolveResult palp;             // w~
  double lhs = 0.0;             // ||V* - V^{w~}||_{1,psi}
  double approximation_term = 0.0;  // 2 eps / (1 - gamma)
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs; }
  double slack() const { return rhs - lhs; }
};

/// Every quantity of the bound computed exactly on an enumerable model.
ErrorBoundReport error_bound_report(const Problem& problem, const PartitionMatrix& d,
                                    const SolveConfig& config = {}, double vi_tolerance = 1e-10);

/// L1 distance under the uniform density, i.e. the mean absolute difference.
double mean_abs_difference(std::span<const double> a, std::span<const double> b);
double mean(std::span<const double> a);

}  // namespace palp
