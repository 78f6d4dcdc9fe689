#include "palp/oracle.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

namespace palp {

namespace {

struct ScopeInfo {
  std::vector<VarId> scope;  // sorted
  std::map<VarId, int> dim;
  std::size_t state_size = 0;
};

ScopeInfo collect_scope(std::span<const ScaledTerm> terms, int num_actions) {
  ScopeInfo info;
  for (const auto& t : terms) {
    if (static_cast<int>(t.per_action.size()) != num_actions)
      throw std::invalid_argument("oracle: term has " + std::to_string(t.per_action.size()) +
                                  " factors for " + std::to_string(num_actions) + " actions");
    for (const Factor& f : t.per_action)
      for (std::size_t k = 0; k < f.scope().size(); ++k) info.dim[f.scope()[k]] = f.dims()[k];
  }
  for (auto [v, d] : info.dim) info.scope.push_back(v);
  info.state_size = info.scope.empty() ? 0 : static_cast<std::size_t>(info.scope.back()) + 1;
  return info;
}

ViolationReport make_report(const ScopeInfo& info, std::span<const int> state, int action,
                            double value, double tolerance) {
  ViolationReport r;
  r.assignment.scope = info.scope;
  for (VarId v : info.scope) r.assignment.values.push_back(state[v]);
  r.action = action;
  r.value = value;
  r.violated = value < -tolerance;
  return r;
}

struct Piece {
  const Factor* factor;
  double coefficient;
};

}  // namespace

double evaluate_constraint(std::span<const ScaledTerm> terms, double offset, int action,
                           std::span<const int> state) {
  double v = offset;
  for (const auto& t : terms) v += t.coefficient * t.per_action[static_cast<std::size_t>(action)].at(state);
  return v;
}

ViolationReport min_constraint_ve(std::span<const ScaledTerm> terms, double offset,
                                  int num_actions, std::span<const VarId> order,
                                  double tolerance) {
  if (terms.empty()) throw std::invalid_argument("min_constraint_ve: empty term set");
  if (num_actions < 1) throw std::invalid_argument("min_constraint_ve: no actions");
  ScopeInfo info = collect_scope(terms, num_actions);
  std::vector<VarId> sorted(order.begin(), order.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted != info.scope)
    throw std::invalid_argument("min_constraint_ve: elimination order does not match term scopes");

  const std::size_t nv = order.size();
  std::map<VarId, std::size_t> position;
  for (std::size_t p = 0; p < nv; ++p) position[order[p]] = p;

  std::vector<int> state(info.state_size, 0), best_state;
  double best_value = std::numeric_limits<double>::infinity();
  int best_action = 0;

  for (int a = 0; a < num_actions; ++a) {
    std::vector<std::vector<Piece>> buckets(nv);
    std::deque<Factor> messages;
    std::vector<Factor> argmins(nv);
    double constant = offset;

    auto place = [&](const Factor* f, double c) {
      if (f->empty_scope()) {
        constant += c * f->table()[0];
        return;
      }
      std::size_t first = nv;
      for (VarId v : f->scope()) first = std::min(first, position.at(v));
      buckets[first].push_back({f, c});
    };
    for (const auto& t : terms) place(&t.per_action[static_cast<std::size_t>(a)], t.coefficient);

    for (std::size_t p = 0; p < nv; ++p) {
      const VarId v = order[p];
      const int dv = info.dim.at(v);
      std::vector<VarId> msg_scope;
      for (const auto& piece : buckets[p]) msg_scope = scope_union(msg_scope, piece.factor->scope());
      msg_scope.erase(std::remove(msg_scope.begin(), msg_scope.end(), v), msg_scope.end());
      std::vector<int> msg_dims;
      for (VarId u : msg_scope) msg_dims.push_back(info.dim.at(u));

      Factor msg = Factor::zeros(msg_scope, msg_dims);
      Factor arg = Factor::zeros(msg_scope, msg_dims);
      std::size_t idx = 0;
      for_each_assignment(msg_scope, msg_dims, state, [&] {
        double lo = std::numeric_limits<double>::infinity();
        int lo_val = 0;
        for (int val = 0; val < dv; ++val) {
          state[v] = val;
          double s = 0.0;
          for (const auto& piece : buckets[p]) s += piece.coefficient * piece.factor->at(state);
          if (s < lo) {
            lo = s;
            lo_val = val;
          }
        }
        msg.table()[idx] = lo;
        arg.table()[idx] = lo_val;
        ++idx;
      });
      argmins[p] = std::move(arg);
      messages.push_back(std::move(msg));
      place(&messages.back(), 1.0);
    }

    for (std::size_t p = nv; p-- > 0;)
      state[order[p]] = static_cast<int>(argmins[p].at(state));

    double value = evaluate_constraint(terms, offset, a, state);
    if (value < best_value) {
      best_value = value;
      best_action = a;
      best_state = state;
    }
  }
  return make_report(info, best_state, best_action, best_value, tolerance);
}

ViolationReport exhaustive_min(std::span<const ScaledTerm> terms, double offset,
                               int num_actions, double tolerance) {
  if (terms.empty()) throw std::invalid_argument("exhaustive_min: empty term set");
  if (num_actions < 1) throw std::invalid_argument("exhaustive_min: no actions");
  ScopeInfo info = collect_scope(terms, num_actions);
  std::vector<int> dims;
  for (VarId v : info.scope) dims.push_back(info.dim.at(v));
  if (table_size(dims) > (std::size_t{1} << 20))
    throw std::invalid_argument("exhaustive_min: scope has more than 2^20 assignments");

  std::vector<int> state(info.state_size, 0), best_state(info.state_size, 0);
  double best_value = std::numeric_limits<double>::infinity();
  int best_action = 0;
  for_each_assignment(info.scope, dims, state, [&] {
    for (int a = 0; a < num_actions; ++a) {
      double value = evaluate_constraint(terms, offset, a, state);
      if (value < best_value) {
        best_value = value;
        best_action = a;
        best_state = state;
      }
    }
  });
  return make_report(info, best_state, best_action, best_value, tolerance);
}

ConstraintSpace full_constraint_space(const CostNetwork& net) {
  ConstraintSpace s;
  for (int i = 0; i < net.size(); ++i) {
    s.members.emplace_back(i, 1.0);
    s.scope = scope_union(s.scope, net.terms[static_cast<std::size_t>(i)].scope);
  }
  return s;
}

SpaceOracle::SpaceOracle(const CostNetwork& net, ConstraintSpace space, OracleKind kind,
                         EliminationHeuristic heuristic)
    : net_(&net), space_(std::move(space)), kind_(kind) {
  if (space_.members.empty()) throw std::invalid_argument("SpaceOracle: empty constraint space");
  std::vector<int> subset;
  for (auto [i, d] : space_.members) subset.push_back(i);
  order_ = elimination_order(net, subset, heuristic);
}

std::vector<ScaledTerm> SpaceOracle::scaled_terms(std::span<const double> w) const {
  std::vector<ScaledTerm> out;
  out.reserve(space_.members.size());
  for (auto [i, d] : space_.members) {
    const ConstraintTerm& t = net_->terms[static_cast<std::size_t>(i)];
    double c = d;
    if (t.kind == TermKind::Basis) {
      if (t.source < 0 || static_cast<std::size_t>(t.source) >= w.size())
        throw std::invalid_argument("SpaceOracle: weight vector too short");
      c *= w[static_cast<std::size_t>(t.source)];
    }
    out.push_back({t.per_action, c});
  }
  return out;
}

ViolationReport SpaceOracle::query(std::span<const double> w, double space_constant,
                                   double tolerance) const {
  auto terms = scaled_terms(w);
  double off = offset(space_constant);
  if (kind_ == OracleKind::Exhaustive) return exhaustive_min(terms, off, net_->num_actions, tolerance);
  return min_constraint_ve(terms, off, net_->num_actions, order_, tolerance);
}

ViolationReport palp_space_min(const ConstraintSpace& space, const CostNetwork& net,
                               std::span<const double> w, double space_constant,
                               OracleKind kind) {
  return SpaceOracle(net, space, kind).query(w, space_constant);
}

DeltaReport delta_diagnostic(std::span<const ConstraintSpace> spaces, const CostNetwork& net,
                             std::span<const double> w, OracleKind kind) {
  if (spaces.empty()) throw std::invalid_argument("delta_diagnostic: no constraint spaces");
  DeltaReport r;
  r.num_spaces = static_cast<int>(spaces.size());
  const double share = w[0] / r.num_spaces;
  r.delta = -std::numeric_limits<double>::infinity();
  for (const auto& s : spaces) {
    double m = palp_space_min(s, net, w, share, kind).value;
    r.space_minima.push_back(m);
    r.delta = std::max(r.delta, -m);
  }
  r.penalty = r.num_spaces * r.delta / (1.0 - net.gamma);
  return r;
}

}  // namespace palp
