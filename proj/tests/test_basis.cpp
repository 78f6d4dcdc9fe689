#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "palp/basis.hpp"
#include "palp/bench.hpp"
#include "palp/model_io.hpp"

using namespace palp;
using namespace palp::testing;

namespace {

// Two coupled machines with hand-picked, asymmetric CPDs.
FactoredMdp coupled_pair() {
  FactoredMdp m;
  m.gamma = 0.8;
  m.variables = {{0, "a", 2}, {1, "b", 2}};
  m.actions = {"left", "right"};
  Cpd c0{0, {0, 1}, {{0.9, 0.1, 0.6, 0.4, 0.3, 0.7, 0.2, 0.8}, {0.5, 0.5, 0.5, 0.5, 0.1, 0.9, 0.05, 0.95}}};
  Cpd c1{1, {1}, {{0.7, 0.3, 0.25, 0.75}, {1.0, 0.0, 0.0, 1.0}}};
  m.cpds = {c0, c1};
  Factor r({0, 1}, {2, 2}, {0.0, 1.0, 1.0, 3.0});
  m.rewards = {{{0, 1}, {r, r}}};
  return m;
}

BasisSet random_basis(std::mt19937_64& rng, const FactoredMdp& m, int count) {
  BasisSet b{constant_basis()};
  std::uniform_int_distribution<int> var(0, m.num_vars() - 1);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  for (int k = 0; k < count; ++k) {
    std::vector<VarId> scope{var(rng)};
    VarId other = var(rng);
    if (k % 2 == 1 && other != scope[0]) scope.push_back(other);
    auto dims = m.dims_of(scope);
    std::vector<double> t(table_size(dims));
    for (double& x : t) x = val(rng);
    b.push_back({static_cast<int>(b.size()), Factor(scope, dims, t), "r"});
  }
  return b;
}

}  // namespace

TEST_CASE("constant basis backprojects to one") {
  auto m = coupled_pair();
  auto t = backproject(m, constant_basis());
  REQUIRE(t.g.size() == 2);
  for (int a = 0; a < 2; ++a) {
    CHECK(t.g[a].empty_scope());
    CHECK(t.g[a].table()[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.f[a].table()[0] == doctest::Approx(1.0 - m.gamma).epsilon(1e-15));
  }
}

TEST_CASE("singleton backprojection matches successor enumeration") {
  auto m = coupled_pair();
  auto basis = singleton_basis(m);
  auto states = all_states(m);
  for (int i = 1; i <= 2; ++i) {
    auto t = backproject(m, basis[i]);
    for (const auto& x : states)
      for (int a = 0; a < 2; ++a) {
        double brute = brute_expectation(m, states, x, a, [&](const auto& xn) { return double(xn[i - 1]); });
        CHECK(t.g[a].at(x) == doctest::Approx(brute).epsilon(1e-14));
      }
  }
}

TEST_CASE("ring backprojection scope is predecessor plus self") {
  auto inst = generate(Topology::ring(6));
  auto basis = singleton_basis(inst.mdp);
  for (int i = 0; i < 6; ++i) {
    auto t = backproject(inst.mdp, basis[i + 1]);
    std::vector<VarId> want{(i + 5) % 6, i};
    std::sort(want.begin(), want.end());
    for (const auto& g : t.g) CHECK(g.scope() == want);
    for (const auto& f : t.f) CHECK(f.scope() == want);
  }
}

TEST_CASE("difference terms equal the enumerated one-step identity") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 12; ++k) {
    auto m = random_mdp(rng, 4, 3, 2);
    auto basis = random_basis(rng, m, 4);
    auto states = all_states(m);
    auto bp = backproject_all(m, basis);
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      std::vector<VarId> g_scope;
      for (VarId v : basis[i].factor.scope()) g_scope = scope_union(g_scope, m.cpds[v].parents);
      for (int a = 0; a < m.num_actions(); ++a) {
        CHECK(bp[i].g[a].scope() == g_scope);
        for (const auto& x : states)
          worst = std::max(worst, std::abs(bp[i].f[a].at(x) - brute_f(m, states, basis[i], x, a)));
      }
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("relevance weights under the uniform product density") {
  auto inst = generate(Topology::ring(4));
  auto basis = basis_preset("singleton-pairwise", inst);
  CHECK(relevance_weight(basis[0]) == 1.0);
  for (int i = 1; i <= 4; ++i) CHECK(relevance_weight(basis[i]) == 0.5);
  for (std::size_t i = 5; i < basis.size(); ++i) CHECK(relevance_weight(basis[i]) == 0.25);

  // Same function over a permuted scope order.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> t(6);
  for (double& x : t) x = u(rng);
  std::vector<double> transposed(6);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 3; ++q) transposed[q * 2 + p] = t[p * 3 + q];
  BasisFunction a{1, Factor({0, 1}, {2, 3}, t), "a"}, b{1, Factor({1, 0}, {3, 2}, transposed), "b"};
  std::vector<int> x(2);
  for (x[0] = 0; x[0] < 2; ++x[0])
    for (x[1] = 0; x[1] < 3; ++x[1]) REQUIRE(a.factor.at(x) == b.factor.at(x));
  CHECK(relevance_weight(a) == doctest::Approx(relevance_weight(b)).epsilon(1e-15));
}

TEST_CASE("evaluate_vw") {
  std::mt19937_64 rng(8);
  auto m = random_mdp(rng, 3);
  auto basis = random_basis(rng, m, 5);
  auto states = all_states(m);
  std::vector<double> zero(basis.size(), 0.0), e0(basis.size(), 0.0);
  e0[0] = 1.0;
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<double> w1(basis.size()), w2(basis.size());
  for (auto& x : w1) x = u(rng);
  for (auto& x : w2) x = u(rng);
  for (const auto& x : states) {
    CHECK(evaluate_vw(basis, zero, x) == 0.0);
    CHECK(evaluate_vw(basis, e0, x) == 1.0);
    double hand = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) hand += w1[i] * basis_value(basis[i], x);
    CHECK(evaluate_vw(basis, w1, x) == doctest::Approx(hand).epsilon(1e-13));
    std::vector<double> mix(basis.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.5 * w1[i] - 0.75 * w2[i];
    CHECK(std::abs(evaluate_vw(basis, mix, x) -
                   (2.5 * evaluate_vw(basis, w1, x) - 0.75 * evaluate_vw(basis, w2, x))) <= 1e-10);
  }
  CHECK_THROWS_AS(evaluate_vw(basis, std::vector<double>(2, 0.0), states[0]), std::invalid_argument);
}

TEST_CASE("basis presets and files") {
  auto ring = generate(Topology::ring(5));
  auto pairwise = basis_preset("singleton-pairwise", ring);
  CHECK(pairwise.size() == 1 + 5 + ring.arrows.size());
  for (std::size_t k = 0; k < ring.arrows.size(); ++k) {
    auto [from, to] = ring.arrows[k];
    const auto& f = pairwise[6 + k].factor;
    CHECK(f.scope() == std::vector<VarId>{std::min(from, to), std::max(from, to)});
    CHECK(f.table() == std::vector<double>{0, 0, 0, 1});
  }
  CHECK_THROWS_AS(basis_preset("singleton-pairwise", generate(Topology::grid(3, 3))), std::invalid_argument);
  CHECK_THROWS_AS(basis_preset("cubic", ring), std::invalid_argument);

  auto text = basis_to_json_text(pairwise);
  auto back = basis_from_json_text(ring.mdp, text);
  REQUIRE(back.size() == pairwise.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].factor == pairwise[i].factor);
    CHECK(back[i].label == pairwise[i].label);
  }
  CHECK_THROWS_AS(basis_from_json_text(ring.mdp, R"({"bases":[{"scope":[9],"table":[0,1]}]})"), FormatError);
  CHECK_THROWS_AS(basis_from_json_text(ring.mdp, R"({"bases":[{"scope":[0],"table":[0,1,2]}]})"), FormatError);
  CHECK_THROWS_AS(basis_from_json_text(ring.mdp, R"({"bases":[{"scope":[],"table":[1]}]})"), std::invalid_argument);
}
