#include "palp/policy_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "palp/solvers.hpp"

namespace palp {

GreedyPolicy::GreedyPolicy(const FactoredMdp& mdp, BasisSet basis, std::vector<double> weights)
    : GreedyPolicy(mdp, basis, backproject_all(mdp, basis), std::move(weights)) {}

GreedyPolicy::GreedyPolicy(const FactoredMdp& mdp, BasisSet basis,
                           std::vector<BackprojectedTerm> backprojections, std::vector<double> weights)
    : mdp_(&mdp),
      basis_(std::move(basis)),
      backprojections_(std::move(backprojections)),
      weights_(std::move(weights)) {
  if (weights_.size() != basis_.size() || backprojections_.size() != basis_.size())
    throw std::invalid_argument("GreedyPolicy: weights, basis and backprojections differ in size");
}

double GreedyPolicy::q_value(std::span<const int> state, int action) const {
  double v = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    v += weights_[i] * backprojections_[i].g[static_cast<std::size_t>(action)].at(state);
  return full_reward(*mdp_, state, action) + mdp_->gamma * v;
}

int GreedyPolicy::action(std::span<const int> state) const {
  int best = 0;
  double best_q = q_value(state, 0);
  for (int a = 1; a < mdp_->num_actions(); ++a) {
    double q = q_value(state, a);
    if (q > best_q + kGreedyTieTolerance * (1.0 + std::abs(best_q))) {
      best_q = q;
      best = a;
    }
  }
  return best;
}

ConstantPolicy server_heuristic_policy(const FactoredMdp& mdp, std::optional<VarId> server) {
  if (!server) throw std::invalid_argument("server heuristic needs a designated server");
  if (*server < 0 || *server >= mdp.num_vars()) throw std::invalid_argument("server id out of range");
  const std::string want = "reboot_" + mdp.variables[static_cast<std::size_t>(*server)].name;
  auto it = std::find(mdp.actions.begin(), mdp.actions.end(), want);
  if (it == mdp.actions.end()) throw std::invalid_argument("model has no action '" + want + "'");
  return ConstantPolicy(static_cast<int>(it - mdp.actions.begin()), "server-heuristic");
}

const char* to_string(InitialState s) {
  return s == InitialState::AllUp ? "all-up" : "uniform";
}

InitialState initial_state_from_string(const std::string& s) {
  if (s == "all-up") return InitialState::AllUp;
  if (s == "uniform") return InitialState::UniformRandom;
  throw std::invalid_argument("unknown initial state rule '" + s + "'");
}

std::vector<int> all_up_state(const FactoredMdp& mdp) {
  std::vector<int> s(static_cast<std::size_t>(mdp.num_vars()));
  for (int v = 0; v < mdp.num_vars(); ++v) s[static_cast<std::size_t>(v)] = mdp.domain(v) - 1;
  return s;
}

double max_reward(const FactoredMdp& mdp) {
  double total = 0.0;
  for (const auto& rf : mdp.rewards) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : rf.tables)
      for (double x : t.table()) m = std::max(m, x);
    total += m;
  }
  return total;
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int sample(std::span<const double> p, double u) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    c += p[i];
    if (u < c) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

}  // namespace

EvalReport rollout_eval(const FactoredMdp& mdp, const Policy& policy, const RolloutConfig& config) {
  if (config.horizon < 1) throw std::invalid_argument("rollout_eval: horizon must be at least 1");
  if (config.rollouts < 1) throw std::invalid_argument("rollout_eval: need at least one rollout");
  const int n = mdp.num_vars();
  std::vector<double> returns(static_cast<std::size_t>(config.rollouts));
  std::vector<int> state(static_cast<std::size_t>(n)), next(static_cast<std::size_t>(n));
  for (long r = 0; r < config.rollouts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(static_cast<std::uint64_t>(r) >> 32)};
    std::mt19937_64 rng(seq);
    if (config.initial == InitialState::AllUp) {
      state = all_up_state(mdp);
    } else {
      for (int v = 0; v < n; ++v)
        state[static_cast<std::size_t>(v)] =
            std::min(mdp.domain(v) - 1, static_cast<int>(uniform01(rng) * mdp.domain(v)));
    }
    double ret = 0.0, discount = 1.0;
    for (int t = 0; t < config.horizon; ++t) {
      int a = policy.action(state);
      ret += discount * full_reward(mdp, state, a);
      discount *= mdp.gamma;
      for (int v = 0; v < n; ++v)
        next[static_cast<std::size_t>(v)] = sample(mdp.next_distribution(v, state, a), uniform01(rng));
      state.swap(next);
    }
    returns[static_cast<std::size_t>(r)] = ret;
  }

  EvalReport rep;
  rep.rollouts = config.rollouts;
  rep.horizon = config.horizon;
  rep.seed = config.seed;
  rep.initial = config.initial;
  rep.mean = mean(returns);
  if (config.rollouts > 1) {
    double ss = 0.0;
    for (double x : returns) ss += (x - rep.mean) * (x - rep.mean);
    rep.stdev = std::sqrt(ss / static_cast<double>(config.rollouts - 1));
  }
  rep.std_error = rep.stdev / std::sqrt(static_cast<double>(config.rollouts));
  rep.truncation_bound = std::pow(mdp.gamma, config.horizon) * std::abs(max_reward(mdp)) / (1.0 - mdp.gamma);
  return rep;
}

std::vector<double> exact_policy_value(const FactoredMdp& mdp, const Policy& policy, double tolerance) {
  StateSpace space(mdp);
  std::vector<double> v(space.size(), 0.0), next(space.size()), reward(space.size()), scratch;
  std::vector<int> actions(space.size());
  std::vector<int> state(static_cast<std::size_t>(mdp.num_vars()));
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    space.decode(idx, state);
    actions[idx] = policy.action(state);
    reward[idx] = full_reward(mdp, state, actions[idx]);
  }
  double residual = std::numeric_limits<double>::infinity();
  while (residual > tolerance) {
    residual = 0.0;
    for (std::size_t idx = 0; idx < space.size(); ++idx) {
      space.decode(idx, state);
      next[idx] = reward[idx] + mdp.gamma * expected_next_value(mdp, space, v, state, actions[idx], scratch);
      residual = std::max(residual, std::abs(next[idx] - v[idx]));
    }
    v.swap(next);
  }
  return v;
}

}  // namespace palp
