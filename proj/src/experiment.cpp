#include "palp/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "json_util.hpp"
#include "palp/model_io.hpp"

namespace palp {

const char* to_string(Method m) {
  switch (m) {
    case Method::Alp: return "alp";
    case Method::Palp: return "palp";
    case Method::SampledAlp: return "sampled-alp";
    case Method::ServerHeuristic: return "server-heuristic";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  for (Method m : {Method::Alp, Method::Palp, Method::SampledAlp, Method::ServerHeuristic})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown method '" + s + "' (expected alp, palp, sampled-alp or server-heuristic)");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x == 0.0 ? 0.0 : x);
  return std::string(buf, end);
}

namespace {

bool is_preset(const std::string& s) { return s == "singleton" || s == "singleton-pairwise"; }

}  // namespace

void validate_config(const ExperimentConfig& c) {
  if (c.model_path.empty() == c.topology.empty())
    throw ConfigError("give exactly one of a model file or a topology");
  if (!c.topology.empty()) {
    try {
      Topology::parse(c.topology);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  }
  if (!is_preset(c.basis) && c.basis.rfind("file:", 0) != 0)
    throw ConfigError("basis must be singleton, singleton-pairwise or file:<path>");
  if (c.partition.empty()) throw ConfigError("partition source is empty");
  if (c.methods.empty()) throw ConfigError("no methods selected");
  bool sampled = std::find(c.methods.begin(), c.methods.end(), Method::SampledAlp) != c.methods.end();
  if (sampled && c.sampled_seeds < 1) throw ConfigError("sampled-alp needs at least one seed");
  if (c.samples < 0) throw ConfigError("sample count must be non-negative");
  if (c.eval.rollouts < 1) throw ConfigError("rollouts must be at least 1");
  if (c.eval.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (c.solve.max_iterations < 1) throw ConfigError("max iterations must be at least 1");
}

std::string config_to_json_text(const ExperimentConfig& c) {
  using detail::json;
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  json doc{{"model", c.model_path},
           {"topology", c.topology},
           {"gamma", c.gamma},
           {"basis", c.basis},
           {"partition", c.partition},
           {"methods", methods},
           {"sampled_seeds", c.sampled_seeds},
           {"samples", c.samples},
           {"seed", c.seed},
           {"rollouts", c.eval.rollouts},
           {"horizon", c.eval.horizon},
           {"eval_seed", c.eval.seed},
           {"initial_state", to_string(c.eval.initial)},
           {"oracle", c.solve.oracle == OracleKind::Exhaustive ? "exhaustive" : "ve"},
           {"heuristic", c.solve.heuristic == EliminationHeuristic::MinFill ? "min-fill" : "min-degree"},
           {"violation_tolerance", c.solve.violation_tolerance},
           {"max_iterations", c.solve.max_iterations},
           {"weight_bound", c.solve.weight_bound}};
  return doc.dump();
}

std::optional<VarId> ModelContext::server() const {
  if (!has_metadata) return std::nullopt;
  return instance.server;
}

ModelContext load_model_context(const ExperimentConfig& config) {
  ModelContext ctx;
  if (!config.topology.empty()) {
    ctx.instance = generate(Topology::parse(config.topology), {}, config.gamma);
    ctx.has_metadata = true;
    return ctx;
  }
  std::filesystem::path path(config.model_path);
  if (std::filesystem::exists(metadata_path_for(path))) {
    ctx.instance = load_instance(path);
    ctx.has_metadata = true;
  } else {
    ctx.instance.mdp = load_model(path);
  }
  return ctx;
}

BasisSet resolve_basis(const ModelContext& ctx, const std::string& spec) {
  if (spec.rfind("file:", 0) == 0) return basis_from_json_text(ctx.mdp(), read_text_file(spec.substr(5)));
  if (!ctx.has_metadata) {
    if (spec == "singleton") return singleton_basis(ctx.mdp());
    throw ConfigError("basis preset '" + spec + "' needs benchmark metadata next to the model");
  }
  return basis_preset(spec, ctx.instance);
}

PartitionMatrix resolve_partition(const CostNetwork& net, const std::string& spec) {
  if (spec == "heuristic") return heuristic_partition(net);
  if (spec == "single-space") return single_space_partition(net);
  return partition_from_json_text(read_text_file(spec), net);
}

long resolve_samples(const ExperimentConfig& config, const ModelContext& ctx) {
  return config.samples > 0 ? config.samples : 100L * ctx.mdp().num_vars();
}

SolveResult run_solver(const Problem& problem, Method method, const ExperimentConfig& config,
                       const ModelContext& ctx, std::uint64_t seed) {
  switch (method) {
    case Method::Alp: return solve_alp(problem, config.solve);
    case Method::Palp:
      return solve_palp(problem, resolve_partition(problem.network(), config.partition), config.solve);
    case Method::SampledAlp:
      return solve_sampled_alp(problem, resolve_samples(config, ctx), seed, config.solve);
    case Method::ServerHeuristic: break;
  }
  throw ConfigError("server-heuristic is a fixed policy, not a solver");
}

MethodRun run_method(const Problem& problem, Method method, const ExperimentConfig& config,
                     const ModelContext& ctx, std::uint64_t seed, bool evaluate) {
  MethodRun run;
  run.method = method;
  run.seed = seed;
  if (method == Method::ServerHeuristic) {
    auto policy = server_heuristic_policy(ctx.mdp(), ctx.server());
    if (evaluate) run.eval = rollout_eval(ctx.mdp(), policy, config.eval);
    return run;
  }
  run.solve = run_solver(problem, method, config, ctx, seed);
  if (evaluate) {
    GreedyPolicy policy(ctx.mdp(), problem.basis(), problem.backprojections(), run.solve->weights);
    run.eval = rollout_eval(ctx.mdp(), policy, config.eval);
  }
  return run;
}

std::string solve_result_to_json_text(const SolveResult& r, const Problem& problem, Method method,
                                      const ExperimentConfig& config) {
  using detail::json;
  json weights = json::array();
  for (std::size_t i = 0; i < r.weights.size(); ++i) {
    const auto& b = problem.basis()[i];
    weights.push_back({{"id", b.id}, {"label", b.label}, {"scope", b.factor.scope()}, {"value", r.weights[i]}});
  }
  json doc{{"format", "palp-result"},
           {"version", 1},
           {"method", to_string(method)},
           {"termination", to_string(r.termination)},
           {"lp_status", to_string(r.lp_status)},
           {"objective", r.objective},
           {"iterations", r.iterations},
           {"cuts_per_space", r.cuts_per_space},
           {"seconds", r.seconds},
           {"weights", weights},
           {"space_constants", r.space_constants},
           {"seed", config.seed},
           {"config", json::parse(config_to_json_text(config))}};
  return doc.dump(1) + "\n";
}

namespace {

long total_cuts(const SolveResult& r) {
  long s = 0;
  for (long c : r.cuts_per_space) s += c;
  return s;
}

struct Row {
  std::string method, seed, objective, reward, stderr_, ratio, iterations, cuts, termination, seconds;
};

double sample_stdev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v), ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<MethodRun> run_compare(const Problem& problem, const ExperimentConfig& config,
                                   const ModelContext& ctx) {
  std::vector<MethodRun> runs;
  for (Method m : config.methods) {
    if (m == Method::SampledAlp) {
      for (int s = 0; s < config.sampled_seeds; ++s)
        runs.push_back(run_method(problem, m, config, ctx, config.seed + static_cast<std::uint64_t>(s), true));
    } else {
      runs.push_back(run_method(problem, m, config, ctx, 0, true));
    }
  }
  return runs;
}

void write_compare_csv(std::ostream& out, const std::vector<MethodRun>& runs, const ModelContext& ctx,
                       const ExperimentConfig& config) {
  std::optional<double> alp_reward;
  for (const auto& r : runs)
    if (r.method == Method::Alp && r.eval) alp_reward = r.eval->mean;
  auto ratio = [&](double reward) { return alp_reward ? format_number(reward / *alp_reward) : std::string(); };

  out << "# palp compare csv v" << kCsvSchemaVersion << "\n";
  out << "# config " << config_to_json_text(config) << "\n";
  out << "# n " << ctx.mdp().num_vars() << " actions " << ctx.mdp().num_actions() << "\n";
  out << "method,seed,n,objective,reward_mean,reward_stderr,ratio_to_alp,iterations,cuts,termination,"
         "solve_seconds\n";
  const std::string n = std::to_string(ctx.mdp().num_vars());
  std::vector<double> sampled_reward, sampled_objective;
  for (const auto& r : runs) {
    out << to_string(r.method) << ',' << (r.method == Method::SampledAlp ? std::to_string(r.seed) : "") << ','
        << n << ',' << (r.solve ? format_number(r.solve->objective) : "") << ','
        << (r.eval ? format_number(r.eval->mean) : "") << ',' << (r.eval ? format_number(r.eval->std_error) : "")
        << ',' << (r.eval ? ratio(r.eval->mean) : "") << ','
        << (r.solve ? std::to_string(r.solve->iterations) : "") << ','
        << (r.solve ? std::to_string(total_cuts(*r.solve)) : "") << ','
        << (r.solve ? to_string(r.solve->termination) : "") << ','
        << (r.solve ? format_number(r.solve->seconds) : "") << '\n';
    if (r.method == Method::SampledAlp && r.eval && r.solve) {
      sampled_reward.push_back(r.eval->mean);
      sampled_objective.push_back(r.solve->objective);
    }
  }
  if (!sampled_reward.empty()) {
    auto stat = [&](const char* name, double reward, double objective) {
      out << "sampled-alp:" << name << ",," << n << ',' << format_number(objective) << ','
          << format_number(reward) << ",," << ratio(reward) << ",,,,\n";
    };
    stat("min", *std::min_element(sampled_reward.begin(), sampled_reward.end()),
         *std::min_element(sampled_objective.begin(), sampled_objective.end()));
    stat("mean", mean(sampled_reward), mean(sampled_objective));
    stat("max", *std::max_element(sampled_reward.begin(), sampled_reward.end()),
         *std::max_element(sampled_objective.begin(), sampled_objective.end()));
    stat("stdev", sample_stdev(sampled_reward), sample_stdev(sampled_objective));
  }
}

std::string eval_csv_header() {
  return "method,n,reward_mean,reward_stderr,solve_seconds,cuts,objective\n";
}

std::string eval_csv_row(const MethodRun& r, const ModelContext& ctx) {
  std::ostringstream s;
  s << to_string(r.method) << ',' << ctx.mdp().num_vars() << ',' << (r.eval ? format_number(r.eval->mean) : "")
    << ',' << (r.eval ? format_number(r.eval->std_error) : "") << ','
    << (r.solve ? format_number(r.solve->seconds) : "") << ','
    << (r.solve ? std::to_string(total_cuts(*r.solve)) : "") << ','
    << (r.solve ? format_number(r.solve->objective) : "") << '\n';
  return s.str();
}

void write_weights_csv(std::ostream& out, const Problem& problem, const SolveResult& alp,
                       const SolveResult& palp) {
  out << "basis_id,label,scope,w_alp,w_palp\n";
  for (const auto& b : problem.basis()) {
    std::string scope;
    for (VarId v : b.factor.scope()) scope += (scope.empty() ? "" : " ") + std::to_string(v);
    auto i = static_cast<std::size_t>(b.id);
    out << b.id << ',' << b.label << ',' << scope << ',' << format_number(alp.weights[i]) << ','
        << format_number(palp.weights[i]) << '\n';
  }
}

void write_partition_csv(std::ostream& out, const PartitionMatrix& d, const CostNetwork& net) {
  out << "space";
  for (const auto& t : net.terms) out << ',' << (t.kind == TermKind::Basis ? "F" : "R") << t.source;
  out << '\n';
  auto dense = d.dense();
  for (std::size_t k = 0; k < dense.size(); ++k) {
    out << k;
    for (double x : dense[k]) out << ',' << format_number(x);
    out << '\n';
  }
}

}  // namespace palp
