#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "palp/bench.hpp"
#include "palp/policy_eval.hpp"
#include "palp/solvers.hpp"

namespace palp {

enum class Method { Alp, Palp, SampledAlp, ServerHeuristic };
const char* to_string(Method m);
Method method_from_string(const std::string& s);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string model_path;  // either this ...
  std::string topology;    // ... or a generator spec such as "ring:6"
  double gamma = 0.95;     // generator only
  std::string basis = "singleton";      // preset name or file:<path>
  std::string partition = "heuristic";  // heuristic | single-space | <path>
  std::vector<Method> methods{Method::Alp, Method::Palp, Method::SampledAlp, Method::ServerHeuristic};
  int sampled_seeds = 20;
  long samples = 0;  // 0 means 100 n
  std::uint64_t seed = 42;
  RolloutConfig eval;
  SolveConfig solve;
};

/// Checks every field that can be checked without touching the model.
void validate_config(const ExperimentConfig& config);
std::string config_to_json_text(const ExperimentConfig& config);

/// The model plus benchmark metadata when a sidecar exists (or the model was generated).
struct ModelContext {
  NetworkInstance instance;
  bool has_metadata = false;
  const FactoredMdp& mdp() const { return instance.mdp; }
  std::optional<VarId> server() const;
};

ModelContext load_model_context(const ExperimentConfig& config);
BasisSet resolve_basis(const ModelContext& ctx, const std::string& spec);
PartitionMatrix resolve_partition(const CostNetwork& net, const std::string& spec);
long resolve_samples(const ExperimentConfig& config, const ModelContext& ctx);

struct MethodRun {
  Method method = Method::Alp;
  std::uint64_t seed = 0;  // sampled ALP only
  std::optional<SolveResult> solve;
  std::optional<EvalReport> eval;
};

SolveResult run_solver(const Problem& problem, Method method, const ExperimentConfig& config,
                       const ModelContext& ctx, std::uint64_t seed);
MethodRun run_method(const Problem& problem, Method method, const ExperimentConfig& config,
                     const ModelContext& ctx, std::uint64_t seed, bool evaluate);

std::string solve_result_to_json_text(const SolveResult& result, const Problem& problem, Method method,
                                      const ExperimentConfig& config);

inline constexpr int kCsvSchemaVersion = 1;

/// Per-method rows for every configured method, the PALP/ALP reward ratio
/// and sampled-ALP min/mean/max/stdev summary rows. Timing is the last column.
void write_compare_csv(std::ostream& out, const std::vector<MethodRun>& runs, const ModelContext& ctx,
                       const ExperimentConfig& config);
std::vector<MethodRun> run_compare(const Problem& problem, const ExperimentConfig& config,
                                   const ModelContext& ctx);

std::string eval_csv_header();
std::string eval_csv_row(const MethodRun& run, const ModelContext& ctx);

void write_weights_csv(std::ostream& out, const Problem& problem, const SolveResult& alp,
                       const SolveResult& palp);
void write_partition_csv(std::ostream& out, const PartitionMatrix& d, const CostNetwork& net);

/// Shortest round-trip decimal for CSV and JSON output.
std::string format_number(double x);

}  // namespace palp
