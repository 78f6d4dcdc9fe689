#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "palp/bench.hpp"
#include "palp/solvers.hpp"
#include "vertex_enumeration.hpp"

using namespace palp;
using namespace palp::testing;

namespace {

NetworkInstance ring(int n) { return generate(Topology::ring(n)); }

// The ALP over every (x, a), or the partitioned program over every
// (space, scope assignment, a), with F from successor enumeration.
LinearProgram enumerated_lp(const FactoredMdp& m, const BasisSet& basis, const PartitionMatrix* d) {
  auto states = all_states(m);
  LinearProgram lp;
  for (std::size_t i = 0; i < basis.size(); ++i)
    lp.add_variable("w" + std::to_string(i), relevance_weight(basis[i]), -1e6, 1e6);
  auto full_row = [&](const std::vector<int>& x, int a) {
    std::vector<std::pair<int, double>> c;
    for (std::size_t i = 0; i < basis.size(); ++i) c.emplace_back(int(i), brute_f(m, states, basis[i], x, a));
    return c;
  };
  if (!d) {
    for (const auto& x : states)
      for (int a = 0; a < m.num_actions(); ++a) lp.add_row(full_row(x, a), hand_reward(m, x, a));
    return lp;
  }
  auto net = build_cost_network(m, backproject_all(m, basis));
  auto spaces = build_spaces(*d, net);
  std::vector<std::pair<int, double>> eq{{0, -1.0}};
  std::vector<int> col;
  for (std::size_t k = 0; k < spaces.size(); ++k) {
    col.push_back(lp.add_variable("c" + std::to_string(k), 0.0, -1e6, 1e6));
    eq.emplace_back(col.back(), 1.0);
  }
  lp.add_equality(eq, 0.0);
  for (std::size_t k = 0; k < spaces.size(); ++k) {
    // Every assignment of the space scope; variables outside stay at 0.
    std::vector<int> x(m.num_vars(), 0);
    const auto& scope = spaces[k].scope;
    for_each_assignment(scope, m.dims_of(scope), x, [&] {
      for (int a = 0; a < m.num_actions(); ++a) {
        std::vector<double> coef(basis.size() + spaces.size(), 0.0);
        coef[col[k]] = 1 - m.gamma;
        double bound = 0.0;
        for (auto [t, dk] : spaces[k].members) {
          const auto& term = net.terms[t];
          if (term.kind == TermKind::Basis) {
            coef[term.source] += dk * brute_f(m, states, basis[term.source], x, a);
          } else {
            const auto& r = m.rewards[term.source];
            bound += dk * table_lookup(r.scope, m.dims_of(r.scope), r.tables[a].table(), x);
          }
        }
        std::vector<std::pair<int, double>> c;
        for (std::size_t j = 0; j < coef.size(); ++j)
          if (coef[j] != 0.0) c.emplace_back(int(j), coef[j]);
        lp.add_row(c, bound);
      }
    });
  }
  return lp;
}

}  // namespace

TEST_CASE("zero rewards give zero weights") {
  auto m = single_machine(0.9, 0.8, 0.9);
  for (auto& t : m.rewards[0].tables) std::fill(t.table().begin(), t.table().end(), 0.0);
  Problem p(m, {constant_basis()});
  auto r = solve_alp(p);
  REQUIRE(r.converged());
  CHECK(r.weights[0] == doctest::Approx(0.0));
  CHECK(r.objective == doctest::Approx(0.0));
}

TEST_CASE("single machine against the vertex-enumerated LP") {
  auto m = single_machine(0.9, 0.9, 0.95);
  auto basis = singleton_basis(m);
  Problem p(m, basis);
  auto r = solve_alp(p);
  REQUIRE(r.converged());
  auto lp = enumerated_lp(m, basis, nullptr);
  CHECK(lp.num_rows() == 4);
  auto want = vertex_enumeration_optimum(lp);
  REQUIRE(want.has_value());
  CHECK(r.objective == doctest::Approx(*want).epsilon(1e-9));
  // The objective is E_psi[V^w] under the uniform density.
  CHECK(r.objective == doctest::Approx(mean(tabulate_vw(m, basis, r.weights))).epsilon(1e-12));
}

TEST_CASE("cutting planes reach the fully enumerated optimum") {
  for (const char* basis_name : {"singleton", "singleton-pairwise"}) {
    CAPTURE(basis_name);
    auto inst = ring(5);
    auto basis = basis_preset(basis_name, inst);
    Problem p(inst.mdp, basis);
    auto alp = solve_alp(p);
    REQUIRE(alp.converged());
    auto full = solve_lp(enumerated_lp(inst.mdp, basis, nullptr));
    REQUIRE(full.status == LpStatus::Optimal);
    CHECK(alp.objective == doctest::Approx(full.objective).epsilon(1e-9));

    auto d = heuristic_partition(p.network());
    auto palp = solve_palp(p, d);
    REQUIRE(palp.converged());
    auto part = solve_lp(enumerated_lp(inst.mdp, basis, &d));
    REQUIRE(part.status == LpStatus::Optimal);
    CHECK(palp.objective == doctest::Approx(part.objective).epsilon(1e-9));
  }
}

TEST_CASE("6-ring solves") {
  auto inst = ring(6);
  Problem p(inst.mdp, basis_preset("singleton", inst));
  auto alp = solve_alp(p);
  REQUIRE(alp.converged());

  SUBCASE("oracle swap") {
    SolveConfig ex;
    ex.oracle = OracleKind::Exhaustive;
    auto alt = solve_alp(p, ex);
    REQUIRE(alt.converged());
    CHECK(std::abs(alt.objective - alp.objective) <= 1e-9);
    for (std::size_t i = 0; i < alp.weights.size(); ++i) CHECK(alt.weights[i] == doctest::Approx(alp.weights[i]).epsilon(1e-6));
  }
  SUBCASE("single space collapses to ALP") {
    auto one = solve_palp(p, single_space_partition(p.network()));
    REQUIRE(one.converged());
    CHECK(std::abs(one.objective - alp.objective) <= 1e-6);
  }
  SUBCASE("heuristic partition is an inner approximation") {
    auto palp = solve_palp(p, heuristic_partition(p.network()));
    REQUIRE(palp.converged());
    CHECK(palp.objective >= alp.objective - 1e-9);
    CHECK(exhaustive_alp_check(p, palp.weights).value >= -1e-6);
    double sum = 0.0;
    for (double c : palp.space_constants) sum += c;
    CHECK(std::abs(sum - palp.weights[0]) <= 1e-9);
    CHECK(palp.cuts_per_space.size() == palp.space_constants.size());
  }
  SUBCASE("ALP solution is feasible") { CHECK(exhaustive_alp_check(p, alp.weights).value >= -1e-6); }
  SUBCASE("iteration cap") {
    SolveConfig tight;
    tight.max_iterations = 1;
    auto r = solve_alp(p, tight);
    CHECK(r.termination == Termination::IterationLimit);
    CHECK_FALSE(r.converged());
  }
  SUBCASE("determinism") {
    auto again = solve_alp(p);
    CHECK(again.weights == alp.weights);
    CHECK(again.iterations == alp.iterations);
  }
}

TEST_CASE("sampled ALP") {
  SUBCASE("covering every constraint recovers ALP") {
    auto m = single_machine(0.9, 0.9, 0.95);
    Problem p(m, singleton_basis(m));
    auto exact = solve_alp(p);
    auto sampled = solve_sampled_alp(p, 400, 3);
    REQUIRE(sampled.converged());
    CHECK(sampled.objective == doctest::Approx(exact.objective).epsilon(1e-9));
  }
  auto inst = ring(6);
  Problem p(inst.mdp, basis_preset("singleton", inst));
  auto exact = solve_alp(p);
  SUBCASE("seeded determinism") {
    auto a = solve_sampled_alp(p, 600, 9), b = solve_sampled_alp(p, 600, 9), c = solve_sampled_alp(p, 600, 10);
    CHECK(a.weights == b.weights);
    CHECK(c.weights.size() == a.weights.size());
  }
  SUBCASE("relaxation bound over 20 seeds") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      auto r = solve_sampled_alp(p, 600, s);
      REQUIRE(r.converged());
      CHECK(r.objective <= exact.objective + 1e-9);
    }
  }
  CHECK_THROWS_AS(solve_sampled_alp(p, 0, 1), std::invalid_argument);
}

TEST_CASE("value iteration") {
  SUBCASE("zero rewards") {
    auto m = ring(4).mdp;
    for (auto& r : m.rewards)
      for (auto& t : r.tables) std::fill(t.table().begin(), t.table().end(), 0.0);
    auto vt = value_iteration(m, 1e-9);
    for (double v : vt.values) CHECK(v == 0.0);
  }
  SUBCASE("certain uptime gives a geometric series") {
    auto m = single_machine(0.9, 1.0, 1.0);
    auto vt = value_iteration(m, 1e-12);
    CHECK(vt.values[1] == doctest::Approx(10.0).epsilon(1e-10));
    CHECK(vt.values[0] == doctest::Approx(9.0).epsilon(1e-10));
  }
  SUBCASE("Bellman residual checked by enumeration") {
    auto m = ring(4).mdp;
    auto vt = value_iteration(m, 1e-9);
    CHECK(vt.residual <= 1e-9);
    auto states = all_states(m);
    StateSpace space(m);
    double worst = 0.0;
    for (const auto& x : states) {
      double best = -1e300;
      for (int a = 0; a < m.num_actions(); ++a)
        best = std::max(best, hand_reward(m, x, a) + m.gamma * brute_expectation(m, states, x, a, [&](const auto& xn) {
                                return vt.values[space.encode(xn)];
                              }));
      worst = std::max(worst, std::abs(best - vt.values[space.encode(x)]));
    }
    CHECK(worst <= 1e-9);
  }
  FactoredMdp big;
  for (int i = 0; i < 21; ++i) big.variables.push_back({i, "b", 2});
  CHECK_THROWS(value_iteration(big));
}

TEST_CASE("upper bound and objective identity on the 6-ring") {
  auto inst = ring(6);
  const auto& m = inst.mdp;
  auto vstar = value_iteration(m, 1e-9).values;
  double vmax = 0.0;
  for (double v : vstar) vmax = std::max(vmax, std::abs(v));
  for (const char* b : {"singleton", "singleton-pairwise"}) {
    Problem p(m, basis_preset(b, inst));
    for (auto r : {solve_alp(p), solve_palp(p, heuristic_partition(p.network()))}) {
      REQUIRE(r.converged());
      auto vw = tabulate_vw(m, p.basis(), r.weights);
      for (std::size_t s = 0; s < vw.size(); ++s) CHECK(vw[s] >= vstar[s] - 1e-6 * (1 + vmax));
      CHECK(std::abs((r.objective - mean(vstar)) - mean_abs_difference(vstar, vw)) <= 1e-6);
    }
  }
}

TEST_CASE("max-norm fit") {
  auto m = single_machine(0.9, 0.9, 0.95);
  std::vector<double> target{3.0, 8.0};
  auto fit = chebyshev_fit(m, BasisSet{constant_basis()}, target);
  CHECK(fit.error == doctest::Approx(2.5));
  CHECK(fit.weights[0] == doctest::Approx(5.5));
  auto exact = chebyshev_fit(m, singleton_basis(m), target);
  CHECK(exact.error <= 1e-9);
}

TEST_CASE("error bound report") {
  SUBCASE("basis spanning V exactly") {
    auto m = single_machine(0.9, 0.9, 0.95);
    Problem p(m, singleton_basis(m));
    auto rep = error_bound_report(p, heuristic_partition(p.network()));
    CHECK(rep.fit.error <= 1e-9);
    CHECK(rep.lhs <= rep.delta.penalty + 1e-9);
    CHECK(rep.holds());
  }
  SUBCASE("4-ring") {
    auto inst = ring(4);
    Problem p(inst.mdp, singleton_basis(inst.mdp));
    auto rep = error_bound_report(p, heuristic_partition(p.network()));
    CHECK(rep.w_hat_min_constraint >= -1e-7);
    CHECK(rep.holds());
    CHECK(rep.slack() >= 0.0);
    CHECK(rep.delta.num_spaces == heuristic_partition(p.network()).num_spaces());
  }
  SUBCASE("single space") {
    auto inst = ring(4);
    Problem p(inst.mdp, singleton_basis(inst.mdp));
    auto rep = error_bound_report(p, single_space_partition(p.network()));
    CHECK(rep.delta.num_spaces == 1);
    CHECK(rep.delta.delta <= 1e-7);
    CHECK(rep.lhs <= rep.approximation_term + 1e-9);
    CHECK(std::abs(rep.palp.objective - solve_alp(p).objective) <= 1e-6);
  }
}
