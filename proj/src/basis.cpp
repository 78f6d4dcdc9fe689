#include "palp/basis.hpp"

#include <numeric>
#include <stdexcept>

#include "json_util.hpp"

namespace palp {

BasisFunction constant_basis() { return {0, Factor::constant(1.0), "1"}; }

void require_valid_basis(const FactoredMdp& mdp, std::span<const BasisFunction> basis) {
  if (basis.empty()) throw std::invalid_argument("basis: empty basis set");
  const Factor& c = basis[0].factor;
  if (basis[0].id != 0 || !c.empty_scope() || c.table().size() != 1 || c.table()[0] != 1.0)
    throw std::invalid_argument("basis: entry 0 must be the constant function 1");
  for (std::size_t i = 1; i < basis.size(); ++i) {
    const auto& b = basis[i];
    if (b.id != static_cast<int>(i))
      throw std::invalid_argument("basis: id " + std::to_string(b.id) + " at position " +
                                  std::to_string(i));
    if (b.factor.empty_scope())
      throw std::invalid_argument("basis " + std::to_string(i) + ": empty scope");
    for (std::size_t k = 0; k < b.factor.scope().size(); ++k) {
      VarId v = b.factor.scope()[k];
      if (v < 0 || v >= mdp.num_vars())
        throw std::invalid_argument("basis " + std::to_string(i) + ": variable " +
                                    std::to_string(v) + " out of range");
      if (b.factor.dims()[k] != mdp.domain(v))
        throw std::invalid_argument("basis " + std::to_string(i) + ": domain mismatch on " +
                                    std::to_string(v));
    }
  }
}

BasisSet singleton_basis(const FactoredMdp& mdp) {
  BasisSet basis{constant_basis()};
  for (const auto& var : mdp.variables) {
    std::vector<double> t(static_cast<std::size_t>(var.domain_size), 0.0);
    t.back() = 1.0;
    basis.push_back({static_cast<int>(basis.size()), Factor({var.id}, {var.domain_size}, t),
                     "x" + std::to_string(var.id)});
  }
  return basis;
}

void add_pairwise_bases(const FactoredMdp& mdp, std::span<const std::pair<VarId, VarId>> pairs,
                        BasisSet& basis) {
  for (auto [from, to] : pairs) {
    if (from == to) throw std::invalid_argument("pairwise basis: self pair");
    VarId lo = std::min(from, to), hi = std::max(from, to);
    int dl = mdp.domain(lo), dh = mdp.domain(hi);
    std::vector<double> t(static_cast<std::size_t>(dl * dh), 0.0);
    t.back() = 1.0;
    basis.push_back({static_cast<int>(basis.size()), Factor({lo, hi}, {dl, dh}, t),
                     "x" + std::to_string(from) + "*x" + std::to_string(to)});
  }
}

BasisSet basis_from_json_text(const FactoredMdp& mdp, const std::string& text) {
  using namespace detail;
  json doc = parse_json(text, "basis");
  const json& list = array_field(doc, "bases", "basis");
  BasisSet basis{constant_basis()};
  for (std::size_t i = 0; i < list.size(); ++i) {
    std::string p = at_index("basis.bases", i);
    auto scope = as_int_vector(field(list[i], "scope", p), p + ".scope");
    auto table = as_double_vector(field(list[i], "table", p), p + ".table");
    for (VarId v : scope)
      if (v < 0 || v >= mdp.num_vars())
        throw FormatError(p + ".scope: variable " + std::to_string(v) + " out of range");
    std::string label = list[i].contains("label") ? as_string(list[i]["label"], p + ".label")
                                                  : "f" + std::to_string(i + 1);
    try {
      basis.push_back({static_cast<int>(basis.size()),
                       Factor(scope, mdp.dims_of(scope), std::move(table)), label});
    } catch (const std::invalid_argument& e) {
      throw FormatError(p + ": " + e.what());
    }
  }
  require_valid_basis(mdp, basis);
  return basis;
}

std::string basis_to_json_text(std::span<const BasisFunction> basis) {
  detail::json list = detail::json::array();
  for (std::size_t i = 1; i < basis.size(); ++i)
    list.push_back({{"scope", basis[i].factor.scope()},
                    {"table", basis[i].factor.table()},
                    {"label", basis[i].label}});
  return detail::json{{"bases", list}}.dump(1) + "\n";
}

BackprojectedTerm backproject(const FactoredMdp& mdp, const BasisFunction& basis) {
  const Factor& f = basis.factor;
  for (VarId v : f.scope())
    if (v < 0 || v >= mdp.num_vars())
      throw std::invalid_argument("backproject: basis variable " + std::to_string(v) +
                                  " out of range");

  std::vector<VarId> g_scope;
  for (VarId v : f.scope()) g_scope = scope_union(g_scope, mdp.cpds[static_cast<std::size_t>(v)].parents);
  std::vector<VarId> f_scope = scope_union(f.scope(), g_scope);
  std::vector<int> g_dims = mdp.dims_of(g_scope);
  std::vector<int> f_dims = mdp.dims_of(f_scope);

  const auto n = static_cast<std::size_t>(mdp.num_vars());
  std::vector<int> state(n, 0), next(n, 0);
  BackprojectedTerm out;
  out.basis_id = basis.id;

  for (int a = 0; a < mdp.num_actions(); ++a) {
    std::vector<double> g_table;
    g_table.reserve(table_size(g_dims));
    for_each_assignment(g_scope, g_dims, state, [&] {
      double expectation = 0.0;
      for_each_assignment(f.scope(), f.dims(), next, [&] {
        double p = 1.0;
        for (VarId v : f.scope())
          p *= mdp.next_distribution(v, state, a)[static_cast<std::size_t>(next[v])];
        expectation += p * f.at(next);
      });
      g_table.push_back(expectation);
    });
    Factor g(g_scope, g_dims, std::move(g_table));

    std::vector<double> f_table;
    f_table.reserve(table_size(f_dims));
    for_each_assignment(f_scope, f_dims, state,
                        [&] { f_table.push_back(f.at(state) - mdp.gamma * g.at(state)); });
    out.f.emplace_back(f_scope, f_dims, std::move(f_table));
    out.g.push_back(std::move(g));
  }
  return out;
}

std::vector<BackprojectedTerm> backproject_all(const FactoredMdp& mdp,
                                              std::span<const BasisFunction> basis) {
  std::vector<BackprojectedTerm> out;
  out.reserve(basis.size());
  for (const auto& b : basis) out.push_back(backproject(mdp, b));
  return out;
}

double relevance_weight(const BasisFunction& basis, const RelevanceConfig& config) {
  switch (config.density) {
    case RelevanceDensity::UniformProduct: {
      const auto& t = basis.factor.table();
      return std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
    }
  }
  throw std::invalid_argument("relevance_weight: unknown density");
}

std::vector<double> relevance_weights(std::span<const BasisFunction> basis,
                                      const RelevanceConfig& config) {
  std::vector<double> out;
  for (const auto& b : basis) out.push_back(relevance_weight(b, config));
  return out;
}

double evaluate_vw(std::span<const BasisFunction> basis, std::span<const double> w,
                   std::span<const int> state) {
  if (w.size() != basis.size())
    throw std::invalid_argument("evaluate_vw: " + std::to_string(w.size()) + " weights for " +
                                std::to_string(basis.size()) + " bases");
  double v = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) v += w[i] * basis[i].factor.at(state);
  return v;
}

}  // namespace palp
