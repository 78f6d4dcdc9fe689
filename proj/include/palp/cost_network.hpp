#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "palp/basis.hpp"
#include "palp/factor.hpp"
#include "palp/mdp.hpp"

namespace palp {

enum class TermKind { Basis, Reward };

/// One entry of the constraint-term vector M_w(x, a). Basis terms hold the
/// unweighted F_{i,a} (weighted by w_i at query time); reward terms hold
/// -R_{j,a} and enter with unit weight.
struct ConstraintTerm {
  TermKind kind = TermKind::Basis;
  int source = 0;                  // basis id or reward index
  std::vector<Factor> per_action;  // one factor per action, all over `scope`
  std::vector<VarId> scope;
};

/// Terms ordered basis-first (by basis id), then rewards (by index), with
/// an undirected edge between any two terms whose scopes intersect.
struct CostNetwork {
  std::vector<ConstraintTerm> terms;
  std::vector<std::pair<int, int>> edges;  // i < j, lexicographic
  std::vector<std::vector<int>> adjacency;
  int num_basis_terms = 0;
  int num_actions = 0;
  double gamma = 0.0;

  int size() const { return static_cast<int>(terms.size()); }
  bool adjacent(int i, int j) const;
};

/// Builds the network from backprojections. The constant basis (id 0) is
/// left out; its contribution enters the constraints as a scalar offset.
CostNetwork build_cost_network(const FactoredMdp& mdp, std::span<const BackprojectedTerm> terms);

/// Network over arbitrary terms; computes edges from scopes.
CostNetwork make_cost_network(std::vector<ConstraintTerm> terms, int num_actions, double gamma);

std::string cost_network_to_json_text(const CostNetwork& net);

enum class EliminationHeuristic { MinDegree, MinFill };

/// Greedy elimination order over the interaction graph induced by the
/// scopes (each scope forms a clique). Ties go to the lowest variable id.
std::vector<VarId> elimination_order(std::span<const std::vector<VarId>> scopes,
                                     EliminationHeuristic heuristic = EliminationHeuristic::MinDegree);
std::vector<VarId> elimination_order(const CostNetwork& net, std::span<const int> term_subset,
                                     EliminationHeuristic heuristic = EliminationHeuristic::MinDegree);

/// Largest neighbour count met while eliminating in `order`, i.e. the
/// largest intermediate scope minus one. Throws unless `order` is a
/// permutation of the scope union.
int induced_width(std::span<const VarId> order, std::span<const std::vector<VarId>> scopes);
int induced_width(std::span<const VarId> order, const CostNetwork& net,
                  std::span<const int> term_subset);

std::vector<std::vector<VarId>> subset_scopes(const CostNetwork& net,
                                              std::span<const int> term_subset);
std::vector<int> all_terms(const CostNetwork& net);

}  // namespace palp
