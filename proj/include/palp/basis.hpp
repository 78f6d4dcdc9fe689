#pragma once

#include <span>
#include <string>
#include <vector>

#include "palp/factor.hpp"
#include "palp/mdp.hpp"

namespace palp {

/// f_i over a subset of the state variables. Id 0 is the constant function.
struct BasisFunction {
  int id = 0;
  Factor factor;
  std::string label;
};

using BasisSet = std::vector<BasisFunction>;

/// Throws unless basis[0] is the constant 1, ids equal positions and every
/// other basis has a non-empty scope of valid variables.
void require_valid_basis(const FactoredMdp& mdp, std::span<const BasisFunction> basis);

BasisFunction constant_basis();

/// {1} plus f_i(x) = x_i for every variable (indicator of the top value for
/// non-binary domains).
BasisSet singleton_basis(const FactoredMdp& mdp);

/// Appends f(x) = x_from * x_to for each directed pair.
void add_pairwise_bases(const FactoredMdp& mdp, std::span<const std::pair<VarId, VarId>> pairs,
                        BasisSet& basis);

/// Explicit basis lists: {"bases": [{"scope": [...], "table": [...]}, ...]}.
/// The constant function is implicit and always placed first.
BasisSet basis_from_json_text(const FactoredMdp& mdp, const std::string& text);
std::string basis_to_json_text(std::span<const BasisFunction> basis);

/// Backprojection G_{i,a}(x) = E[f_i(x') | x, a] and difference term
/// F_{i,a} = f_i - gamma * G_{i,a}, one factor per action.
///
/// G's scope is the union of the parent sets of the basis scope variables;
/// F's scope is scope(f_i) united with scope(G).
struct BackprojectedTerm {
  int basis_id = 0;
  std::vector<Factor> g;
  std::vector<Factor> f;
};

BackprojectedTerm backproject(const FactoredMdp& mdp, const BasisFunction& basis);
std::vector<BackprojectedTerm> backproject_all(const FactoredMdp& mdp,
                                              std::span<const BasisFunction> basis);

enum class RelevanceDensity { UniformProduct };

struct RelevanceConfig {
  RelevanceDensity density = RelevanceDensity::UniformProduct;
};

/// alpha_i = E_psi[f_i]; under the uniform product density this is the
/// mean of the basis table.
double relevance_weight(const BasisFunction& basis, const RelevanceConfig& config = {});
std::vector<double> relevance_weights(std::span<const BasisFunction> basis,
                                      const RelevanceConfig& config = {});

/// V^w(x) = sum_i w_i f_i(x).
double evaluate_vw(std::span<const BasisFunction> basis, std::span<const double> w,
                   std::span<const int> state);

}  // namespace palp
