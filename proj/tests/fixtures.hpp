#pragma once

// Model builders and brute-force references shared by the unit tests. The
// references enumerate full joint states and successor states directly and
// never go through backprojections or cost-network factors.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "palp/basis.hpp"
#include "palp/cost_network.hpp"
#include "palp/mdp.hpp"

namespace palp::testing {

inline std::vector<double> random_distribution(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(static_cast<std::size_t>(d));
  double s = 0.0;
  for (double& x : p) s += (x = u(rng));
  for (double& x : p) x /= s;
  // Renormalise through the last entry so the row sums to 1 almost exactly.
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) head += p[i];
  p.back() = 1.0 - head;
  return p;
}

/// Random valid model: domains 2..max_domain, up to max_parents extra
/// parents per variable, one reward factor per variable plus a pairwise one.
inline FactoredMdp random_mdp(std::mt19937_64& rng, int n, int max_domain = 3, int num_actions = 3,
                              int max_parents = 2, double gamma = 0.9) {
  FactoredMdp m;
  m.gamma = gamma;
  std::uniform_int_distribution<int> dom(2, max_domain);
  for (int i = 0; i < n; ++i) m.variables.push_back({i, "v" + std::to_string(i), dom(rng)});
  for (int a = 0; a < num_actions; ++a) m.actions.push_back("a" + std::to_string(a));
  std::uniform_int_distribution<int> pick(0, n - 1), extra(0, max_parents);
  for (int i = 0; i < n; ++i) {
    Cpd c;
    c.child = i;
    c.parents = {i};
    for (int k = extra(rng); k > 0; --k) c.parents.push_back(pick(rng));
    std::sort(c.parents.begin(), c.parents.end());
    c.parents.erase(std::unique(c.parents.begin(), c.parents.end()), c.parents.end());
    std::size_t rows = table_size(m.dims_of(c.parents));
    for (int a = 0; a < num_actions; ++a) {
      std::vector<double> t;
      for (std::size_t r = 0; r < rows; ++r) {
        auto p = random_distribution(rng, m.domain(i));
        t.insert(t.end(), p.begin(), p.end());
      }
      c.tables.push_back(std::move(t));
    }
    m.cpds.push_back(std::move(c));
  }
  std::uniform_real_distribution<double> r(-1.0, 2.0);
  auto add_reward = [&](std::vector<VarId> scope) {
    RewardFactor rf;
    rf.scope = scope;
    for (int a = 0; a < num_actions; ++a) {
      std::vector<double> t(table_size(m.dims_of(scope)));
      for (double& x : t) x = r(rng);
      rf.tables.emplace_back(scope, m.dims_of(scope), std::move(t));
    }
    m.rewards.push_back(std::move(rf));
  };
  for (int i = 0; i < n; ++i) add_reward({i});
  if (n >= 2) add_reward({0, n - 1});
  return m;
}

/// One machine, actions {reboot, noop}; up stays up with `stay`, reboot
/// brings it up with `reboot`, reward 1 while up.
inline FactoredMdp single_machine(double gamma, double stay, double reboot) {
  FactoredMdp m;
  m.gamma = gamma;
  m.variables = {{0, "m", 2}};
  m.actions = {"reboot_m", "noop"};
  Cpd c;
  c.child = 0;
  c.parents = {0};
  c.tables = {{1 - reboot, reboot, 1 - reboot, reboot}, {1.0, 0.0, 1 - stay, stay}};
  m.cpds = {c};
  m.rewards = {{{0}, {Factor({0}, {2}, {0.0, 1.0}), Factor({0}, {2}, {0.0, 1.0})}}};
  return m;
}

/// Row-major table index computed from scratch, independent of Factor::index.
inline double table_lookup(const std::vector<VarId>& scope, const std::vector<int>& dims,
                           const std::vector<double>& table, const std::vector<int>& state) {
  std::size_t idx = 0, stride = 1;
  for (std::size_t k = scope.size(); k-- > 0;) {
    idx += stride * static_cast<std::size_t>(state[static_cast<std::size_t>(scope[k])]);
    stride *= static_cast<std::size_t>(dims[k]);
  }
  return table[idx];
}

inline double hand_reward(const FactoredMdp& m, const std::vector<int>& x, int a) {
  double s = 0.0;
  for (const auto& rf : m.rewards) {
    const Factor& f = rf.tables[static_cast<std::size_t>(a)];
    s += table_lookup(f.scope(), f.dims(), f.table(), x);
  }
  return s;
}

inline double hand_transition(const FactoredMdp& m, const std::vector<int>& x, int a,
                              const std::vector<int>& xn) {
  double p = 1.0;
  for (const auto& c : m.cpds) {
    std::size_t row = 0;
    for (VarId v : c.parents)
      row = row * static_cast<std::size_t>(m.domain(v)) + static_cast<std::size_t>(x[static_cast<std::size_t>(v)]);
    std::size_t d = static_cast<std::size_t>(m.domain(c.child));
    p *= c.tables[static_cast<std::size_t>(a)][row * d + static_cast<std::size_t>(xn[static_cast<std::size_t>(c.child)])];
  }
  return p;
}

inline std::vector<std::vector<int>> all_states(const FactoredMdp& m) {
  StateSpace s(m);
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back(s.decode(i));
  return out;
}

/// E[f(x') | x, a] by enumeration of every successor.
template <class Fn>
double brute_expectation(const FactoredMdp& m, const std::vector<std::vector<int>>& states,
                         const std::vector<int>& x, int a, Fn&& f) {
  double s = 0.0;
  for (const auto& xn : states) s += hand_transition(m, x, a, xn) * f(xn);
  return s;
}

inline double basis_value(const BasisFunction& b, const std::vector<int>& x) {
  return table_lookup(b.factor.scope(), b.factor.dims(), b.factor.table(), x);
}

/// f_i(x) - gamma E[f_i(x')].
inline double brute_f(const FactoredMdp& m, const std::vector<std::vector<int>>& states,
                      const BasisFunction& b, const std::vector<int>& x, int a) {
  return basis_value(b, x) -
         m.gamma * brute_expectation(m, states, x, a, [&](const auto& xn) { return basis_value(b, xn); });
}

/// sum_i w_i F_i(x,a) - R(x,a), fully enumerated.
inline double brute_alp_lhs(const FactoredMdp& m, const std::vector<std::vector<int>>& states,
                            const BasisSet& basis, const std::vector<double>& w, const std::vector<int>& x,
                            int a) {
  double v = -hand_reward(m, x, a);
  for (std::size_t i = 0; i < basis.size(); ++i) v += w[i] * brute_f(m, states, basis[i], x, a);
  return v;
}

/// The seven-term network whose adjacency is {1,2},{1,4},{2,3},{3,4},{3,5},
/// {4,5},{2,6},{3,6},{5,7} (terms numbered from 1; terms 1-5 basis, 6-7
/// reward). Each edge gets its own binary variable and a term's scope is the
/// set of its incident edges, so two terms share a variable iff adjacent.
inline const std::vector<std::pair<int, int>>& fixture_edges() {
  static const std::vector<std::pair<int, int>> e{{1, 2}, {1, 4}, {2, 3}, {3, 4}, {3, 5},
                                                  {4, 5}, {2, 6}, {3, 6}, {5, 7}};
  return e;
}

inline CostNetwork fixture_network() {
  const auto& edges = fixture_edges();
  std::vector<ConstraintTerm> terms;
  for (int t = 1; t <= 7; ++t) {
    ConstraintTerm term;
    term.kind = t <= 5 ? TermKind::Basis : TermKind::Reward;
    term.source = t <= 5 ? t : t - 6;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (edges[e].first == t || edges[e].second == t) term.scope.push_back(static_cast<VarId>(e));
    std::vector<int> dims(term.scope.size(), 2);
    std::vector<double> table(table_size(dims));
    for (std::size_t k = 0; k < table.size(); ++k) table[k] = 0.1 * static_cast<double>(t) - 0.05 * static_cast<double>(k);
    term.per_action = {Factor(term.scope, dims, table)};
    terms.push_back(std::move(term));
  }
  return make_cost_network(std::move(terms), 1, 0.9);
}

}  // namespace palp::testing
