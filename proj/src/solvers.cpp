#include "palp/solvers.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace palp {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::IterationLimit: return "iteration-limit";
    case Termination::LpFailure: return "lp-failure";
    case Termination::DuplicateCut: return "duplicate-cut";
  }
  return "?";
}

Problem::Problem(const FactoredMdp& mdp, BasisSet basis) : mdp_(&mdp), basis_(std::move(basis)) {
  require_valid(mdp);
  require_valid_basis(mdp, basis_);
  backprojections_ = backproject_all(mdp, basis_);
  network_ = build_cost_network(mdp, backprojections_);
  alphas_ = relevance_weights(basis_);
}

std::vector<double> Problem::constraint_row(std::span<const int> state, int action) const {
  std::vector<double> row(basis_.size());
  for (std::size_t i = 0; i < row.size(); ++i)
    row[i] = backprojections_[i].f[static_cast<std::size_t>(action)].at(state);
  return row;
}

double Problem::constraint_value(std::span<const double> w, std::span<const int> state,
                                 int action) const {
  auto row = constraint_row(state, action);
  double v = -full_reward(*mdp_, state, action);
  for (std::size_t i = 0; i < row.size(); ++i) v += w[i] * row[i];
  return v;
}

double Problem::objective(std::span<const double> w) const {
  double s = 0.0;
  for (std::size_t i = 0; i < alphas_.size(); ++i) s += alphas_[i] * w[i];
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Cut {
  std::vector<std::pair<int, double>> coeffs;
  double bound = 0.0;
};

// Row coeffs . v >= bound for the space's constraint at the reported point.
// Basis weights sit in LP columns 0..N, the space constant in `constant_col`.
Cut make_cut(const Problem& problem, const ConstraintSpace& space, const ViolationReport& r,
             int constant_col) {
  const CostNetwork& net = problem.network();
  std::vector<int> state(static_cast<std::size_t>(problem.mdp().num_vars()), 0);
  for (std::size_t i = 0; i < r.assignment.scope.size(); ++i)
    state[static_cast<std::size_t>(r.assignment.scope[i])] = r.assignment.values[i];
  std::map<int, double> coeffs;
  coeffs[constant_col] += 1.0 - net.gamma;
  Cut cut;
  for (auto [t, d] : space.members) {
    const ConstraintTerm& term = net.terms[static_cast<std::size_t>(t)];
    double v = term.per_action[static_cast<std::size_t>(r.action)].at(state);
    if (term.kind == TermKind::Basis)
      coeffs[term.source] += d * v;
    else
      cut.bound -= d * v;
  }
  for (auto [col, c] : coeffs)
    if (c != 0.0) cut.coeffs.emplace_back(col, c);
  return cut;
}

std::vector<int> cut_key(const ViolationReport& r) {
  std::vector<int> key = r.assignment.values;
  key.push_back(r.action);
  return key;
}

LinearProgram weight_lp(const Problem& problem, const SolveConfig& config) {
  LinearProgram lp;
  for (int i = 0; i < problem.num_weights(); ++i)
    lp.add_variable("w" + std::to_string(i), problem.alphas()[static_cast<std::size_t>(i)],
                    -config.weight_bound, config.weight_bound);
  return lp;
}

// Shared cutting-plane loop. Column layout: weights 0..N, then one constant
// per space when `split_constant` is set (tied to w_0 by an equality row).
SolveResult cutting_plane(const Problem& problem, std::vector<ConstraintSpace> spaces,
                          bool split_constant, const SolveConfig& config) {
  const auto start = Clock::now();
  const int nw = problem.num_weights();
  const int k = static_cast<int>(spaces.size());

  LinearProgram lp = weight_lp(problem, config);
  std::vector<int> constant_col(static_cast<std::size_t>(k), 0);
  if (split_constant) {
    std::vector<std::pair<int, double>> eq{{0, -1.0}};
    for (int s = 0; s < k; ++s) {
      constant_col[static_cast<std::size_t>(s)] =
          lp.add_variable("w0_" + std::to_string(s), 0.0, -config.weight_bound, config.weight_bound);
      eq.emplace_back(constant_col[static_cast<std::size_t>(s)], 1.0);
    }
    lp.add_equality(eq, 0.0);
  }

  std::vector<SpaceOracle> oracles;
  oracles.reserve(spaces.size());
  for (auto& s : spaces) oracles.emplace_back(problem.network(), std::move(s), config.oracle, config.heuristic);

  SolveResult res;
  res.cuts_per_space.assign(static_cast<std::size_t>(k), 0);
  std::vector<std::set<std::vector<int>>> seen(static_cast<std::size_t>(k));
  std::vector<double> values(static_cast<std::size_t>(lp.num_variables()), 0.0);

  auto finish = [&](Termination t) {
    res.termination = t;
    res.weights.assign(values.begin(), values.begin() + nw);
    if (split_constant)
      for (int col : constant_col) res.space_constants.push_back(values[static_cast<std::size_t>(col)]);
    res.objective = problem.objective(res.weights);
    res.seconds = seconds_since(start);
    res.lp = lp;
    return res;
  };

  // Round 0 separates at w = 0 without testing for termination, so the
  // returned weights always come from an LP solve.
  for (long round = 0;; ++round) {
    std::span<const double> w(values.data(), static_cast<std::size_t>(nw));
    std::vector<std::pair<int, ViolationReport>> violated;
    for (int s = 0; s < k; ++s) {
      double c = values[static_cast<std::size_t>(split_constant ? constant_col[static_cast<std::size_t>(s)] : 0)];
      ViolationReport r = oracles[static_cast<std::size_t>(s)].query(w, c, config.violation_tolerance);
      if (r.violated) violated.emplace_back(s, std::move(r));
    }
    if (round > 0 && violated.empty()) return finish(Termination::Converged);
    for (auto& [s, r] : violated) {
      if (!seen[static_cast<std::size_t>(s)].insert(cut_key(r)).second)
        return finish(Termination::DuplicateCut);
      Cut cut = make_cut(problem, oracles[static_cast<std::size_t>(s)].space(), r,
                         split_constant ? constant_col[static_cast<std::size_t>(s)] : 0);
      lp.add_row(std::move(cut.coeffs), cut.bound);
      ++res.cuts_per_space[static_cast<std::size_t>(s)];
    }
    if (res.iterations >= config.max_iterations) return finish(Termination::IterationLimit);
    LpSolution sol = solve_lp(lp, config.simplex);
    ++res.iterations;
    res.lp_status = sol.status;
    if (sol.status != LpStatus::Optimal) return finish(Termination::LpFailure);
    values = std::move(sol.values);
  }
}

}  // namespace

SolveResult solve_alp(const Problem& problem, const SolveConfig& config) {
  std::vector<ConstraintSpace> spaces{full_constraint_space(problem.network())};
  return cutting_plane(problem, std::move(spaces), false, config);
}

SolveResult solve_palp(const Problem& problem, const PartitionMatrix& d, const SolveConfig& config) {
  return cutting_plane(problem, build_spaces(d, problem.network()), true, config);
}

SolveResult solve_sampled_alp(const Problem& problem, long samples, std::uint64_t seed,
                              const SolveConfig& config) {
  if (samples < 1) throw std::invalid_argument("solve_sampled_alp: need at least one sample");
  const auto start = Clock::now();
  const FactoredMdp& mdp = problem.mdp();
  std::mt19937_64 rng(seed);
  auto draw = [&](int n) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return std::min(n - 1, static_cast<int>(u * n));
  };

  LinearProgram lp = weight_lp(problem, config);
  std::vector<int> state(static_cast<std::size_t>(mdp.num_vars()));
  for (long s = 0; s < samples; ++s) {
    for (int v = 0; v < mdp.num_vars(); ++v) state[static_cast<std::size_t>(v)] = draw(mdp.domain(v));
    int a = draw(mdp.num_actions());
    auto row = problem.constraint_row(state, a);
    std::vector<std::pair<int, double>> coeffs;
    for (std::size_t i = 0; i < row.size(); ++i)
      if (row[i] != 0.0) coeffs.emplace_back(static_cast<int>(i), row[i]);
    lp.add_row(std::move(coeffs), full_reward(mdp, state, a));
  }

  LpSolution sol = solve_lp(lp, config.simplex);
  SolveResult res;
  res.iterations = 1;
  res.cuts_per_space = {samples};
  res.lp_status = sol.status;
  if (sol.status != LpStatus::Optimal) {
    res.termination = Termination::LpFailure;
    res.weights.assign(static_cast<std::size_t>(problem.num_weights()), 0.0);
  } else {
    res.weights = std::move(sol.values);
  }
  res.objective = problem.objective(res.weights);
  res.seconds = seconds_since(start);
  res.lp = std::move(lp);
  return res;
}

ViolationReport exhaustive_alp_check(const Problem& problem, std::span<const double> w) {
  const FactoredMdp& mdp = problem.mdp();
  StateSpace space(mdp);
  ViolationReport best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<int> state(static_cast<std::size_t>(mdp.num_vars()));
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    space.decode(idx, state);
    for (int a = 0; a < mdp.num_actions(); ++a) {
      double v = problem.constraint_value(w, state, a);
      if (v < best.value) {
        best.value = v;
        best.action = a;
        best.assignment.values = state;
      }
    }
  }
  for (int v = 0; v < mdp.num_vars(); ++v) best.assignment.scope.push_back(v);
  best.violated = best.value < -kViolationTolerance;
  return best;
}

double expected_next_value(const FactoredMdp& mdp, const StateSpace& space,
                           std::span<const double> values, std::span<const int> state, int action,
                           std::vector<double>& scratch) {
  scratch.assign(values.begin(), values.end());
  std::size_t len = scratch.size();
  for (int v = mdp.num_vars() - 1; v >= 0; --v) {
    const std::size_t d = static_cast<std::size_t>(space.dims()[static_cast<std::size_t>(v)]);
    auto p = mdp.next_distribution(v, state, action);
    len /= d;
    for (std::size_t j = 0; j < len; ++j) {
      double s = 0.0;
      for (std::size_t u = 0; u < d; ++u) s += p[u] * scratch[j * d + u];
      scratch[j] = s;
    }
  }
  return scratch[0];
}

ValueTable value_iteration(const FactoredMdp& mdp, double tolerance, long max_iterations) {
  require_valid(mdp);
  StateSpace space(mdp);
  ValueTable vt;
  vt.values.assign(space.size(), 0.0);
  std::vector<double> next(space.size()), scratch;
  std::vector<int> state(static_cast<std::size_t>(mdp.num_vars()));
  vt.residual = std::numeric_limits<double>::infinity();
  while (vt.residual > tolerance) {
    if (vt.iterations >= max_iterations)
      throw std::runtime_error("value_iteration: iteration limit reached");
    vt.residual = 0.0;
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
      space.decode(idx, state);
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.num_actions(); ++a) {
        double q = full_reward(mdp, state, a) +
                   mdp.gamma * expected_next_value(mdp, space, vt.values, state, a, scratch);
        best = std::max(best, q);
      }
      next[idx] = best;
      vt.residual = std::max(vt.residual, std::abs(best - vt.values[idx]));
    }
    vt.values.swap(next);
    ++vt.iterations;
  }
  return vt;
}

std::vector<double> tabulate_vw(const FactoredMdp& mdp, std::span<const BasisFunction> basis,
                                std::span<const double> w) {
  StateSpace space(mdp);
  std::vector<double> out(space.size());
  std::vector<int> state(static_cast<std::size_t>(mdp.num_vars()));
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    space.decode(idx, state);
    out[idx] = evaluate_vw(basis, w, state);
  }
  return out;
}

ChebyshevFit chebyshev_fit(const FactoredMdp& mdp, std::span<const BasisFunction> basis,
                           std::span<const double> target) {
  StateSpace space(mdp);
  if (target.size() != space.size()) throw std::invalid_argument("chebyshev_fit: target size mismatch");
  LinearProgram lp;
  for (std::size_t i = 0; i < basis.size(); ++i) lp.add_variable("w" + std::to_string(i));
  const int eps = lp.add_variable("eps", 1.0, 0.0, kInf);
  std::vector<int> state(static_cast<std::size_t>(mdp.num_vars()));
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    space.decode(idx, state);
    std::vector<std::pair<int, double>> up{{eps, 1.0}}, down{{eps, 1.0}};
    for (std::size_t i = 0; i < basis.size(); ++i) {
      double f = basis[i].factor.at(state);
      if (f == 0.0) continue;
      up.emplace_back(static_cast<int>(i), f);
      down.emplace_back(static_cast<int>(i), -f);
    }
    lp.add_row(std::move(up), target[idx]);
    lp.add_row(std::move(down), -target[idx]);
  }
  LpSolution sol = solve_lp(lp);
  ChebyshevFit fit;
  fit.status = sol.status;
  if (sol.status != LpStatus::Optimal) throw std::runtime_error("chebyshev_fit: LP not optimal");
  fit.weights.assign(sol.values.begin(), sol.values.begin() + static_cast<long>(basis.size()));
  auto approx = tabulate_vw(mdp, basis, fit.weights);
  for (std::size_t idx = 0; idx < approx.size(); ++idx)
    fit.error = std::max(fit.error, std::abs(target[idx] - approx[idx]));
  return fit;
}

ErrorBoundReport error_bound_report(const Problem& problem, const PartitionMatrix& d,
                                   const SolveConfig& config, double vi_tolerance) {
  const FactoredMdp& mdp = problem.mdp();
  const double g = mdp.gamma;
  ErrorBoundReport rep;
  rep.v_star = value_iteration(mdp, vi_tolerance);
  rep.fit = chebyshev_fit(mdp, problem.basis(), rep.v_star.values);
  rep.w_hat = rep.fit.weights;
  rep.w_hat[0] += (1.0 + g) / (1.0 - g) * rep.fit.error;
  rep.w_hat_min_constraint = exhaustive_alp_check(problem, rep.w_hat).value;
  auto spaces = build_spaces(d, problem.network());
  rep.delta = delta_diagnostic(spaces, problem.network(), rep.w_hat, OracleKind::Exhaustive);
  rep.palp = solve_palp(problem, d, config);
  if (!rep.palp.converged())
    throw std::runtime_error(std::string("error_bound_report: partitioned solve ended with ") +
                             to_string(rep.palp.termination));
  rep.lhs = mean_abs_difference(rep.v_star.values, tabulate_vw(mdp, problem.basis(), rep.palp.weights));
  rep.approximation_term = 2.0 * rep.fit.error / (1.0 - g);
  rep.rhs = rep.approximation_term + rep.delta.penalty;
  return rep;
}

double mean_abs_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("mean_abs_difference: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

double mean(std::span<const double> a) {
  if (a.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double x : a) s += x;
  return s / static_cast<double>(a.size());
}

}  // namespace palp
