#include "palp/cost_network.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "json_util.hpp"

namespace palp {

bool CostNetwork::adjacent(int i, int j) const {
  const auto& a = adjacency[static_cast<std::size_t>(i)];
  return std::binary_search(a.begin(), a.end(), j);
}

CostNetwork make_cost_network(std::vector<ConstraintTerm> terms, int num_actions, double gamma) {
  CostNetwork net;
  net.terms = std::move(terms);
  net.num_actions = num_actions;
  net.gamma = gamma;
  const int t = net.size();
  net.adjacency.assign(static_cast<std::size_t>(t), {});
  for (int i = 0; i < t; ++i) {
    const auto& si = net.terms[static_cast<std::size_t>(i)].scope;
    if (net.terms[static_cast<std::size_t>(i)].kind == TermKind::Basis) ++net.num_basis_terms;
    for (int j = i + 1; j < t; ++j) {
      const auto& sj = net.terms[static_cast<std::size_t>(j)].scope;
      bool shared = std::any_of(si.begin(), si.end(), [&](VarId v) {
        return std::find(sj.begin(), sj.end(), v) != sj.end();
      });
      if (!shared) continue;
      net.edges.emplace_back(i, j);
      net.adjacency[static_cast<std::size_t>(i)].push_back(j);
      net.adjacency[static_cast<std::size_t>(j)].push_back(i);
    }
  }
  for (auto& a : net.adjacency) std::sort(a.begin(), a.end());
  return net;
}

CostNetwork build_cost_network(const FactoredMdp& mdp, std::span<const BackprojectedTerm> terms) {
  std::vector<ConstraintTerm> out;
  for (const auto& bp : terms) {
    if (bp.basis_id == 0) continue;
    ConstraintTerm t;
    t.kind = TermKind::Basis;
    t.source = bp.basis_id;
    t.per_action = bp.f;
    t.scope = bp.f.front().scope();
    out.push_back(std::move(t));
  }
  for (std::size_t j = 0; j < mdp.rewards.size(); ++j) {
    const auto& rf = mdp.rewards[j];
    ConstraintTerm t;
    t.kind = TermKind::Reward;
    t.source = static_cast<int>(j);
    t.scope = rf.scope;
    for (const Factor& f : rf.tables) {
      Factor neg = f;
      for (double& x : neg.table()) x = -x;
      t.per_action.push_back(std::move(neg));
    }
    out.push_back(std::move(t));
  }
  return make_cost_network(std::move(out), mdp.num_actions(), mdp.gamma);
}

std::string cost_network_to_json_text(const CostNetwork& net) {
  using detail::json;
  json nodes = json::array();
  for (int i = 0; i < net.size(); ++i) {
    const auto& t = net.terms[static_cast<std::size_t>(i)];
    nodes.push_back({{"index", i},
                     {"kind", t.kind == TermKind::Basis ? "basis" : "reward"},
                     {"source", t.source},
                     {"scope", t.scope}});
  }
  json edges = json::array();
  for (auto [i, j] : net.edges) edges.push_back({i, j});
  return json{{"nodes", nodes}, {"edges", edges}}.dump(1) + "\n";
}

std::vector<std::vector<VarId>> subset_scopes(const CostNetwork& net,
                                              std::span<const int> term_subset) {
  std::vector<std::vector<VarId>> out;
  for (int i : term_subset) {
    if (i < 0 || i >= net.size())
      throw std::invalid_argument("term index " + std::to_string(i) + " out of range");
    out.push_back(net.terms[static_cast<std::size_t>(i)].scope);
  }
  return out;
}

std::vector<int> all_terms(const CostNetwork& net) {
  std::vector<int> out(static_cast<std::size_t>(net.size()));
  for (int i = 0; i < net.size(); ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

namespace {

using Graph = std::map<VarId, std::set<VarId>>;

Graph interaction_graph(std::span<const std::vector<VarId>> scopes) {
  Graph g;
  for (const auto& s : scopes)
    for (VarId u : s) {
      auto& nb = g[u];
      for (VarId v : s)
        if (u != v) nb.insert(v);
    }
  return g;
}

std::size_t fill_in(const Graph& g, VarId v) {
  const auto& nb = g.at(v);
  std::size_t missing = 0;
  for (auto it = nb.begin(); it != nb.end(); ++it)
    for (auto jt = std::next(it); jt != nb.end(); ++jt)
      if (!g.at(*it).count(*jt)) ++missing;
  return missing;
}

// Connects v's neighbours pairwise and removes v; returns v's degree.
std::size_t eliminate(Graph& g, VarId v) {
  std::set<VarId> nb = g.at(v);
  for (VarId a : nb) {
    auto& na = g.at(a);
    na.erase(v);
    for (VarId b : nb)
      if (a != b) na.insert(b);
  }
  g.erase(v);
  return nb.size();
}

}  // namespace

std::vector<VarId> elimination_order(std::span<const std::vector<VarId>> scopes,
                                     EliminationHeuristic heuristic) {
  Graph g = interaction_graph(scopes);
  std::vector<VarId> order;
  order.reserve(g.size());
  while (!g.empty()) {
    VarId best = g.begin()->first;
    std::size_t best_cost = SIZE_MAX;
    for (const auto& [v, nb] : g) {
      std::size_t cost = heuristic == EliminationHeuristic::MinDegree ? nb.size() : fill_in(g, v);
      if (cost < best_cost) {
        best_cost = cost;
        best = v;
      }
    }
    order.push_back(best);
    eliminate(g, best);
  }
  return order;
}

std::vector<VarId> elimination_order(const CostNetwork& net, std::span<const int> term_subset,
                                     EliminationHeuristic heuristic) {
  if (term_subset.empty()) throw std::invalid_argument("elimination_order: empty term subset");
  auto scopes = subset_scopes(net, term_subset);
  return elimination_order(scopes, heuristic);
}

int induced_width(std::span<const VarId> order, std::span<const std::vector<VarId>> scopes) {
  Graph g = interaction_graph(scopes);
  std::set<VarId> seen(order.begin(), order.end());
  if (seen.size() != order.size() || seen.size() != g.size() ||
      !std::all_of(order.begin(), order.end(), [&](VarId v) { return g.count(v) > 0; }))
    throw std::invalid_argument("induced_width: order is not a permutation of the scope union");
  int width = 0;
  for (VarId v : order) width = std::max(width, static_cast<int>(eliminate(g, v)));
  return width;
}

int induced_width(std::span<const VarId> order, const CostNetwork& net,
                  std::span<const int> term_subset) {
  auto scopes = subset_scopes(net, term_subset);
  return induced_width(order, scopes);
}

}  // namespace palp
