#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "palp/experiment.hpp"
#include "palp/model_io.hpp"

using namespace palp;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.topology = "ring:5";
  c.sampled_seeds = 3;
  c.eval.rollouts = 100;
  return c;
}

std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string compare_csv(const ExperimentConfig& config) {
  auto ctx = load_model_context(config);
  Problem p(ctx.mdp(), resolve_basis(ctx, config.basis));
  std::ostringstream out;
  write_compare_csv(out, run_compare(p, config, ctx), ctx, config);
  return out.str();
}

}  // namespace

TEST_CASE("config validation") {
  auto ok = small_config();
  CHECK_NOTHROW(validate_config(ok));
  auto bad = ok;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = ok;
  bad.eval.horizon = 0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = ok;
  bad.eval.rollouts = 0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = ok;
  bad.methods.clear();
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = ok;
  bad.topology.clear();
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = ok;
  bad.model_path = "x.json";
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = ok;
  bad.sampled_seeds = 0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  CHECK_THROWS(method_from_string("lasso"));
  for (auto m : {Method::Alp, Method::Palp, Method::SampledAlp, Method::ServerHeuristic})
    CHECK(method_from_string(to_string(m)) == m);
  auto j = nlohmann::json::parse(config_to_json_text(ok));
  CHECK(j["topology"] == "ring:5");
}

TEST_CASE("loading models") {
  auto dir = std::filesystem::temp_directory_path() / "palp_test_experiment";
  std::filesystem::create_directories(dir);
  auto path = (dir / "ring.json").string();
  auto inst = generate(Topology::ring(4));
  save_instance(inst, path);

  ExperimentConfig c = small_config();
  c.topology.clear();
  c.model_path = path;
  auto ctx = load_model_context(c);
  CHECK(ctx.has_metadata);
  CHECK(ctx.server() == 0);
  CHECK(ctx.mdp().num_vars() == 4);
  CHECK(resolve_samples(c, ctx) == 400);

  std::filesystem::remove(metadata_path_for(path));
  auto bare = load_model_context(c);
  CHECK_FALSE(bare.has_metadata);
  CHECK_FALSE(bare.server().has_value());
  CHECK_THROWS(resolve_basis(bare, "singleton-pairwise"));
  CHECK(resolve_basis(bare, "singleton").size() == 5);

  c.model_path = (dir / "missing.json").string();
  CHECK_THROWS(load_model_context(c));
  std::filesystem::remove_all(dir);
}

TEST_CASE("compare CSV layout") {
  auto config = small_config();
  auto csv = compare_csv(config);
  CHECK(csv.rfind("# palp compare csv v1\n", 0) == 0);
  auto rows = data_rows(csv);
  REQUIRE(!rows.empty());
  const auto& header = rows[0];
  CHECK(header.front() == "method");
  CHECK(header.back() == "solve_seconds");
  auto ratio_col = std::find(header.begin(), header.end(), "ratio_to_alp") - header.begin();
  REQUIRE(ratio_col < long(header.size()));
  std::set<std::string> groups;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].size() == header.size());
    auto name = rows[i][0].substr(0, rows[i][0].find(':'));
    groups.insert(name);
    if (rows[i][0] == "alp") CHECK(rows[i][ratio_col] == "1");
  }
  CHECK(groups == std::set<std::string>{"alp", "palp", "sampled-alp", "server-heuristic"});
  int sampled = 0;
  for (const auto& r : rows) sampled += r[0] == "sampled-alp";
  CHECK(sampled == 3);
  for (const char* s : {"sampled-alp:min", "sampled-alp:mean", "sampled-alp:max", "sampled-alp:stdev"})
    CHECK(std::any_of(rows.begin(), rows.end(), [&](const auto& r) { return r[0] == s; }));
}

TEST_CASE("single-space partition gives ratio 1") {
  auto config = small_config();
  config.partition = "single-space";
  config.methods = {Method::Alp, Method::Palp};
  auto rows = data_rows(compare_csv(config));
  auto ratio_col = std::find(rows[0].begin(), rows[0].end(), "ratio_to_alp") - rows[0].begin();
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][0] == "palp") CHECK(std::stod(rows[i][ratio_col]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("compare output is deterministic apart from timing") {
  auto config = small_config();
  auto a = data_rows(compare_csv(config)), b = data_rows(compare_csv(config));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i].pop_back();
    b[i].pop_back();
    CHECK(a[i] == b[i]);
  }
}

TEST_CASE("result and dump writers") {
  auto config = small_config();
  auto ctx = load_model_context(config);
  Problem p(ctx.mdp(), resolve_basis(ctx, "singleton"));
  auto alp = run_solver(p, Method::Alp, config, ctx, 0);
  auto palp = run_solver(p, Method::Palp, config, ctx, 0);
  auto j = nlohmann::json::parse(solve_result_to_json_text(palp, p, Method::Palp, config));
  CHECK(j["format"] == "palp-result");
  CHECK(j["weights"].size() == p.num_weights());
  CHECK_THROWS(run_solver(p, Method::ServerHeuristic, config, ctx, 0));

  std::ostringstream w;
  write_weights_csv(w, p, alp, palp);
  CHECK(data_rows(w.str()).size() == p.num_weights() + 1);

  std::ostringstream d;
  auto part = resolve_partition(p.network(), "heuristic");
  write_partition_csv(d, part, p.network());
  CHECK(data_rows(d.str()).size() == std::size_t(part.num_spaces()) + 1);

  auto run = run_method(p, Method::ServerHeuristic, config, ctx, 0, true);
  CHECK_FALSE(run.solve.has_value());
  REQUIRE(run.eval.has_value());
  CHECK(data_rows(eval_csv_row(run, ctx)).front().size() == data_rows(eval_csv_header()).front().size());
}

TEST_CASE("number formatting round-trips") {
  for (double x : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 1e-300, 123456789.125})
    CHECK(std::stod(format_number(x)) == x);
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-0.0) == "0");
}
