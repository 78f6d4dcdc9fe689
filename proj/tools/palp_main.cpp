// palp: generate benchmark networks, solve them with ALP / PALP / sampled
// ALP, evaluate greedy policies and dump comparison data.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "palp/experiment.hpp"
#include "palp/model_io.hpp"

namespace {

using namespace palp;

constexpr int kExitNotConverged = 3;

struct Options {
  ExperimentConfig cfg;
  std::string oracle = "ve";
  std::string heuristic = "min-degree";
  std::string initial = "all-up";
  std::string method = "palp";
  std::string methods = "alp,palp,sampled-alp,server-heuristic";
  std::string out;
  std::string lp_export;
};

void add_model_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.cfg.model_path, "Model file (a .meta.json sidecar is read when present)");
  cmd->add_option("--topology", o.cfg.topology, "Generate in memory: ring:N, ring-of-rings:RxS, grid:RxC");
  cmd->add_option("--gamma", o.cfg.gamma, "Discount for --topology")->capture_default_str();
}

void add_solve_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--basis", o.cfg.basis, "singleton | singleton-pairwise | file:<path>")->capture_default_str();
  cmd->add_option("--partition", o.cfg.partition, "heuristic | single-space | <partition file>")
      ->capture_default_str();
  cmd->add_option("--oracle", o.oracle, "ve | exhaustive")->capture_default_str();
  cmd->add_option("--elimination", o.heuristic, "min-degree | min-fill")->capture_default_str();
  cmd->add_option("--max-iterations", o.cfg.solve.max_iterations, "Cutting-plane iteration cap")
      ->capture_default_str();
  cmd->add_option("--samples", o.cfg.samples, "Sampled-ALP constraint count (0 = 100 n)")->capture_default_str();
  cmd->add_option("--seed", o.cfg.seed, "Sampled-ALP base seed")->capture_default_str();
}

void add_eval_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--rollouts", o.cfg.eval.rollouts)->capture_default_str();
  cmd->add_option("--horizon", o.cfg.eval.horizon)->capture_default_str();
  cmd->add_option("--eval-seed", o.cfg.eval.seed)->capture_default_str();
  cmd->add_option("--initial", o.initial, "all-up | uniform")->capture_default_str();
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(method_from_string(item));
  return out;
}

void finalize(Options& o) {
  if (o.oracle == "ve")
    o.cfg.solve.oracle = OracleKind::VariableElimination;
  else if (o.oracle == "exhaustive")
    o.cfg.solve.oracle = OracleKind::Exhaustive;
  else
    throw ConfigError("unknown oracle '" + o.oracle + "'");
  if (o.heuristic == "min-degree")
    o.cfg.solve.heuristic = EliminationHeuristic::MinDegree;
  else if (o.heuristic == "min-fill")
    o.cfg.solve.heuristic = EliminationHeuristic::MinFill;
  else
    throw ConfigError("unknown elimination heuristic '" + o.heuristic + "'");
  o.cfg.eval.initial = initial_state_from_string(o.initial);
  validate_config(o.cfg);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

int cmd_generate(Options& o) {
  if (o.cfg.topology.empty()) throw ConfigError("generate needs --topology");
  if (o.out.empty()) throw ConfigError("generate needs --out");
  o.cfg.model_path.clear();
  finalize(o);
  NetworkInstance inst = generate(Topology::parse(o.cfg.topology), {}, o.cfg.gamma);
  save_instance(inst, o.out);
  Problem problem(inst.mdp, singleton_basis(inst.mdp));
  auto terms = all_terms(problem.network());
  auto order = elimination_order(problem.network(), terms, o.cfg.solve.heuristic);
  std::printf("wrote %s (+ %s)\n", o.out.c_str(), metadata_path_for(o.out).string().c_str());
  std::printf("n %d actions %d arrows %zu server %d full-constraint width %d\n", inst.mdp.num_vars(),
              inst.mdp.num_actions(), inst.arrows.size(), inst.server,
              induced_width(order, problem.network(), terms));
  return 0;
}

int cmd_solve(Options& o) {
  Method m = method_from_string(o.method);
  o.cfg.methods = {m};
  finalize(o);
  if (m == Method::ServerHeuristic) throw ConfigError("server-heuristic has nothing to solve");
  ModelContext ctx = load_model_context(o.cfg);
  Problem problem(ctx.mdp(), resolve_basis(ctx, o.cfg.basis));
  SolveResult r = run_solver(problem, m, o.cfg, ctx, o.cfg.seed);
  write_output(o.out, solve_result_to_json_text(r, problem, m, o.cfg));
  if (!o.lp_export.empty()) export_lp_text(r.lp, std::filesystem::path(o.lp_export));
  std::fprintf(stderr, "%s: %s, objective %s, %ld iterations, %.3f s\n", to_string(m), to_string(r.termination),
               format_number(r.objective).c_str(), r.iterations, r.seconds);
  return r.converged() ? 0 : kExitNotConverged;
}

int cmd_eval(Options& o) {
  Method m = method_from_string(o.method);
  o.cfg.methods = {m};
  finalize(o);
  ModelContext ctx = load_model_context(o.cfg);
  Problem problem(ctx.mdp(), resolve_basis(ctx, o.cfg.basis));
  MethodRun run = run_method(problem, m, o.cfg, ctx, o.cfg.seed, true);
  std::string row = "# config " + config_to_json_text(o.cfg) + "\n" + eval_csv_row(run, ctx);
  if (o.out.empty() || o.out == "-") {
    std::cout << eval_csv_header() << row;
  } else {
    bool fresh = !std::filesystem::exists(o.out) || std::filesystem::file_size(o.out) == 0;
    std::ofstream f(o.out, std::ios::app);
    if (!f) throw std::runtime_error("cannot open " + o.out);
    if (fresh) f << "# palp eval csv v" << kCsvSchemaVersion << "\n" << eval_csv_header();
    f << row;
  }
  return run.solve && !run.solve->converged() ? kExitNotConverged : 0;
}

int cmd_compare(Options& o) {
  o.cfg.methods = parse_methods(o.methods);
  finalize(o);
  ModelContext ctx = load_model_context(o.cfg);
  Problem problem(ctx.mdp(), resolve_basis(ctx, o.cfg.basis));
  auto runs = run_compare(problem, o.cfg, ctx);
  std::ostringstream csv;
  write_compare_csv(csv, runs, ctx, o.cfg);
  write_output(o.out, csv.str());
  return 0;
}

int cmd_weights_dump(Options& o) {
  o.cfg.methods = {Method::Alp, Method::Palp};
  finalize(o);
  ModelContext ctx = load_model_context(o.cfg);
  Problem problem(ctx.mdp(), resolve_basis(ctx, o.cfg.basis));
  SolveResult alp = solve_alp(problem, o.cfg.solve);
  SolveResult palp = solve_palp(problem, resolve_partition(problem.network(), o.cfg.partition), o.cfg.solve);
  std::ostringstream csv;
  csv << "# config " << config_to_json_text(o.cfg) << "\n";
  write_weights_csv(csv, problem, alp, palp);
  write_output(o.out, csv.str());
  return alp.converged() && palp.converged() ? 0 : kExitNotConverged;
}

int cmd_partition_dump(Options& o) {
  o.cfg.methods = {Method::Palp};
  finalize(o);
  ModelContext ctx = load_model_context(o.cfg);
  Problem problem(ctx.mdp(), resolve_basis(ctx, o.cfg.basis));
  std::ostringstream csv;
  csv << "# config " << config_to_json_text(o.cfg) << "\n";
  write_partition_csv(csv, resolve_partition(problem.network(), o.cfg.partition), problem.network());
  write_output(o.out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate and partitioned approximate linear programming for factored MDPs"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Write a network-administration benchmark model");
  gen->add_option("--topology", o.cfg.topology, "ring:N, ring-of-rings:RxS or grid:RxC")->required();
  gen->add_option("--gamma", o.cfg.gamma)->capture_default_str();
  gen->add_option("--out", o.out, "Model file; metadata goes to <stem>.meta.json")->required();

  auto* solve = app.add_subcommand("solve", "Solve and write a result file");
  add_model_options(solve, o);
  add_solve_options(solve, o);
  solve->add_option("--method", o.method, "alp | palp | sampled-alp")->capture_default_str();
  solve->add_option("--out", o.out, "Result file (default stdout)");
  solve->add_option("--lp-export", o.lp_export, "Write the final LP in plain-text form");

  auto* eval = app.add_subcommand("eval", "Solve, roll out the greedy policy and append a CSV row");
  add_model_options(eval, o);
  add_solve_options(eval, o);
  add_eval_options(eval, o);
  eval->add_option("--method", o.method, "alp | palp | sampled-alp | server-heuristic")->capture_default_str();
  eval->add_option("--csv", o.out, "CSV file to append to (default stdout)");

  auto* cmp = app.add_subcommand("compare", "Run every method on one instance");
  add_model_options(cmp, o);
  add_solve_options(cmp, o);
  add_eval_options(cmp, o);
  cmp->add_option("--methods", o.methods, "Comma-separated method list")->capture_default_str();
  cmp->add_option("--sampled-seeds", o.cfg.sampled_seeds, "Sampled-ALP runs (seeds seed..seed+S-1)")
      ->capture_default_str();
  cmp->add_option("--csv", o.out, "Output CSV (default stdout)");

  auto* wd = app.add_subcommand("weights-dump", "Per-basis ALP and PALP weights");
  add_model_options(wd, o);
  add_solve_options(wd, o);
  wd->add_option("--csv", o.out, "Output CSV (default stdout)");

  auto* pd = app.add_subcommand("partition-dump", "Dense partitioning matrix");
  add_model_options(pd, o);
  add_solve_options(pd, o);
  pd->add_option("--csv", o.out, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(o);
    if (solve->parsed()) return cmd_solve(o);
    if (eval->parsed()) return cmd_eval(o);
    if (cmp->parsed()) return cmd_compare(o);
    if (wd->parsed()) return cmd_weights_dump(o);
    if (pd->parsed()) return cmd_partition_dump(o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "palp: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "palp: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
