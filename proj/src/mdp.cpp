#include "palp/mdp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace palp {

namespace {

constexpr double kRowSumTolerance = 1e-12;

void check_state(const FactoredMdp& mdp, std::span<const int> state, const char* what) {
  if (static_cast<int>(state.size()) != mdp.num_vars())
    throw std::invalid_argument(std::string(what) + ": assignment covers " +
                                std::to_string(state.size()) + " of " +
                                std::to_string(mdp.num_vars()) + " variables");
  for (int v = 0; v < mdp.num_vars(); ++v)
    if (state[v] < 0 || state[v] >= mdp.domain(v))
      throw std::invalid_argument(std::string(what) + ": value " + std::to_string(state[v]) +
                                  " out of range for variable " + std::to_string(v));
}

void check_action(const FactoredMdp& mdp, int action) {
  if (action < 0 || action >= mdp.num_actions())
    throw std::invalid_argument("action " + std::to_string(action) + " out of range");
}

}  // namespace

std::vector<int> FactoredMdp::dims_of(std::span<const VarId> scope) const {
  std::vector<int> dims;
  dims.reserve(scope.size());
  for (VarId v : scope) dims.push_back(domain(v));
  return dims;
}

std::vector<int> FactoredMdp::domain_sizes() const {
  std::vector<int> dims;
  for (const auto& v : variables) dims.push_back(v.domain_size);
  return dims;
}

std::span<const double> FactoredMdp::next_distribution(VarId v, std::span<const int> state,
                                                       int action) const {
  const Cpd& cpd = cpds[static_cast<std::size_t>(v)];
  int child_dim = domain(v);
  std::size_t off = 0;
  for (VarId p : cpd.parents)
    off = off * static_cast<std::size_t>(domain(p)) + static_cast<std::size_t>(state[p]);
  off *= static_cast<std::size_t>(child_dim);
  const auto& table = cpd.tables[static_cast<std::size_t>(action)];
  return std::span<const double>(table).subspan(off, static_cast<std::size_t>(child_dim));
}

std::vector<std::string> validate(const FactoredMdp& mdp) {
  std::vector<std::string> out;
  const int n = mdp.num_vars();
  const int na = mdp.num_actions();
  auto valid_var = [n](VarId v) { return v >= 0 && v < n; };

  for (int i = 0; i < n; ++i) {
    const auto& var = mdp.variables[static_cast<std::size_t>(i)];
    if (var.id != i)
      out.push_back("variable " + std::to_string(i) + ": id " + std::to_string(var.id) +
                    " is not its index");
    if (var.domain_size < 2)
      out.push_back("variable " + std::to_string(i) + ": domain size " +
                    std::to_string(var.domain_size) + " < 2");
  }
  if (na < 1) out.push_back("actions: at least one action required");
  if (!(mdp.gamma >= 0.0 && mdp.gamma < 1.0))
    out.push_back("gamma: " + std::to_string(mdp.gamma) + " not in [0,1)");

  if (static_cast<int>(mdp.cpds.size()) != n)
    out.push_back("cpds: " + std::to_string(mdp.cpds.size()) + " cpds for " +
                  std::to_string(n) + " variables");
  for (std::size_t c = 0; c < mdp.cpds.size(); ++c) {
    const Cpd& cpd = mdp.cpds[c];
    std::string where = "cpd " + std::to_string(c) + " (child " + std::to_string(cpd.child) + ")";
    if (cpd.child != static_cast<VarId>(c)) {
      out.push_back(where + ": child does not match position");
      continue;
    }
    if (!valid_var(cpd.child)) {
      out.push_back(where + ": child out of range");
      continue;
    }
    bool parents_ok = true;
    for (std::size_t p = 0; p < cpd.parents.size(); ++p) {
      if (!valid_var(cpd.parents[p])) {
        out.push_back(where + ": parent " + std::to_string(cpd.parents[p]) + " out of range");
        parents_ok = false;
      }
      for (std::size_t q = p + 1; q < cpd.parents.size(); ++q)
        if (cpd.parents[p] == cpd.parents[q]) {
          out.push_back(where + ": duplicate parent " + std::to_string(cpd.parents[p]));
          parents_ok = false;
        }
    }
    if (!parents_ok) continue;
    if (static_cast<int>(cpd.tables.size()) != na) {
      out.push_back(where + ": " + std::to_string(cpd.tables.size()) + " tables for " +
                    std::to_string(na) + " actions");
      continue;
    }
    int child_dim = mdp.domain(cpd.child);
    std::size_t rows = table_size(mdp.dims_of(cpd.parents));
    for (int a = 0; a < na; ++a) {
      const auto& t = cpd.tables[static_cast<std::size_t>(a)];
      if (t.size() != rows * static_cast<std::size_t>(child_dim)) {
        out.push_back(where + " action " + std::to_string(a) + ": table length " +
                      std::to_string(t.size()) + ", expected " +
                      std::to_string(rows * static_cast<std::size_t>(child_dim)));
        continue;
      }
      for (std::size_t r = 0; r < rows; ++r) {
        double sum = 0.0;
        bool bad = false;
        for (int k = 0; k < child_dim; ++k) {
          double p = t[r * static_cast<std::size_t>(child_dim) + static_cast<std::size_t>(k)];
          if (!std::isfinite(p) || p < 0.0) bad = true;
          sum += p;
        }
        if (bad)
          out.push_back(where + " action " + std::to_string(a) + " row " + std::to_string(r) +
                        ": negative or non-finite probability");
        else if (std::abs(sum - 1.0) > kRowSumTolerance) {
          std::ostringstream os;
          os.precision(17);
          os << where << " action " << a << " row " << r << ": sums to " << sum;
          out.push_back(os.str());
        }
      }
    }
  }

  for (std::size_t j = 0; j < mdp.rewards.size(); ++j) {
    const RewardFactor& rf = mdp.rewards[j];
    std::string where = "reward " + std::to_string(j);
    bool scope_ok = true;
    for (VarId v : rf.scope)
      if (!valid_var(v)) {
        out.push_back(where + ": variable " + std::to_string(v) + " out of range");
        scope_ok = false;
      }
    if (!scope_ok) continue;
    if (static_cast<int>(rf.tables.size()) != na) {
      out.push_back(where + ": " + std::to_string(rf.tables.size()) + " tables for " +
                    std::to_string(na) + " actions");
      continue;
    }
    for (int a = 0; a < na; ++a) {
      const Factor& f = rf.tables[static_cast<std::size_t>(a)];
      if (f.scope() != rf.scope || f.dims() != mdp.dims_of(rf.scope)) {
        out.push_back(where + " action " + std::to_string(a) + ": factor scope mismatch");
        continue;
      }
      for (double x : f.table())
        if (!std::isfinite(x)) {
          out.push_back(where + " action " + std::to_string(a) + ": non-finite entry");
          break;
        }
    }
  }
  return out;
}

void require_valid(const FactoredMdp& mdp) {
  auto v = validate(mdp);
  if (v.empty()) return;
  std::string msg = "invalid model:";
  for (const auto& s : v) msg += "\n  " + s;
  throw std::invalid_argument(msg);
}

double full_reward(const FactoredMdp& mdp, std::span<const int> state, int action) {
  check_state(mdp, state, "full_reward");
  check_action(mdp, action);
  double r = 0.0;
  for (const auto& rf : mdp.rewards) r += rf.tables[static_cast<std::size_t>(action)].at(state);
  return r;
}

double transition_prob(const FactoredMdp& mdp, std::span<const int> state, int action,
                       std::span<const int> next_state) {
  check_state(mdp, state, "transition_prob");
  check_state(mdp, next_state, "transition_prob");
  check_action(mdp, action);
  double p = 1.0;
  for (int v = 0; v < mdp.num_vars(); ++v)
    p *= mdp.next_distribution(v, state, action)[static_cast<std::size_t>(next_state[v])];
  return p;
}

StateSpace::StateSpace(const FactoredMdp& mdp) : dims_(mdp.domain_sizes()) {
  for (int d : dims_) {
    size_ *= static_cast<std::size_t>(d);
    if (size_ > kMaxStates)
      throw std::invalid_argument("state space exceeds " + std::to_string(kMaxStates) +
                                  " joint states");
  }
}

std::size_t StateSpace::encode(std::span<const int> state) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i)
    idx = idx * static_cast<std::size_t>(dims_[i]) + static_cast<std::size_t>(state[i]);
  return idx;
}

void StateSpace::decode(std::size_t index, std::span<int> state) const {
  for (std::size_t i = dims_.size(); i-- > 0;) {
    auto d = static_cast<std::size_t>(dims_[i]);
    state[i] = static_cast<int>(index % d);
    index /= d;
  }
}

std::vector<int> StateSpace::decode(std::size_t index) const {
  std::vector<int> s(dims_.size());
  decode(index, s);
  return s;
}

}  // namespace palp
