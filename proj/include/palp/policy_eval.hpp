#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "palp/basis.hpp"
#include "palp/mdp.hpp"

namespace palp {

class Policy {
 public:
  virtual ~Policy() = default;
  virtual int action(std::span<const int> state) const = 0;
  virtual std::string name() const = 0;
};

/// Q-values closer than this (relative) count as tied.
inline constexpr double kGreedyTieTolerance = 1e-9;

/// argmax_a R(x,a) + gamma * sum_i w_i G_{i,a}(x) over cached backprojections,
/// lowest action id on ties.
class GreedyPolicy : public Policy {
 public:
  GreedyPolicy(const FactoredMdp& mdp, BasisSet basis, std::vector<double> weights);
  GreedyPolicy(const FactoredMdp& mdp, BasisSet basis, std::vector<BackprojectedTerm> backprojections,
               std::vector<double> weights);
  int action(std::span<const int> state) const override;
  double q_value(std::span<const int> state, int action) const;
  std::string name() const override { return "greedy"; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  const FactoredMdp* mdp_;
  BasisSet basis_;
  std::vector<BackprojectedTerm> backprojections_;
  std::vector<double> weights_;
};

class ConstantPolicy : public Policy {
 public:
  ConstantPolicy(int action, std::string label) : action_(action), label_(std::move(label)) {}
  int action(std::span<const int>) const override { return action_; }
  std::string name() const override { return label_; }

 private:
  int action_;
  std::string label_;
};

/// Always reboots the server, found as the action "reboot_<server name>".
/// Throws when no server is known or the model has no such action.
ConstantPolicy server_heuristic_policy(const FactoredMdp& mdp, std::optional<VarId> server);

enum class InitialState { AllUp, UniformRandom };
const char* to_string(InitialState s);
InitialState initial_state_from_string(const std::string& s);

struct RolloutConfig {
  long rollouts = 1000;
  int horizon = 300;
  std::uint64_t seed = 42;
  InitialState initial = InitialState::AllUp;
};

struct EvalReport {
  double mean = 0.0;
  double std_error = 0.0;
  double stdev = 0.0;
  long rollouts = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
  InitialState initial = InitialState::AllUp;
  double truncation_bound = 0.0;  // gamma^H * R_max / (1 - gamma)
};

/// Rollout r draws from its own mt19937_64 seeded by seed_seq{seed, r}, so
/// two policies evaluated with one config see the same uniform draws.
EvalReport rollout_eval(const FactoredMdp& mdp, const Policy& policy, const RolloutConfig& config = {});

/// Top value for every variable.
std::vector<int> all_up_state(const FactoredMdp& mdp);

/// V^pi on every state by iterating the policy's Bellman operator to a
/// sup-norm residual of `tolerance`.
std::vector<double> exact_policy_value(const FactoredMdp& mdp, const Policy& policy,
                                       double tolerance = 1e-9);

double max_reward(const FactoredMdp& mdp);

}  // namespace palp
