#include "palp/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace palp {

using detail::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string model_to_string(const FactoredMdp& mdp) {
  json doc;
  json vars = json::array();
  for (const auto& v : mdp.variables)
    vars.push_back({{"name", v.name}, {"domain_size", v.domain_size}});
  doc["variables"] = vars;
  doc["actions"] = mdp.actions;
  json cpds = json::array();
  for (const auto& c : mdp.cpds)
    cpds.push_back({{"child", c.child}, {"parents", c.parents}, {"tables_per_action", c.tables}});
  doc["cpds"] = cpds;
  json rewards = json::array();
  for (const auto& r : mdp.rewards) {
    json tables = json::array();
    for (const auto& f : r.tables) tables.push_back(f.table());
    rewards.push_back({{"scope", r.scope}, {"tables_per_action", tables}});
  }
  doc["rewards"] = rewards;
  doc["gamma"] = mdp.gamma;
  return doc.dump(1) + "\n";
}

FactoredMdp model_from_string(const std::string& text) {
  using namespace detail;
  json doc = parse_json(text, "model");
  FactoredMdp mdp;
  const std::string root = "model";

  const json& vars = array_field(doc, "variables", root);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::string p = at_index(root + ".variables", i);
    Variable v;
    v.id = static_cast<VarId>(i);
    v.name = as_string(field(vars[i], "name", p), p + ".name");
    v.domain_size = as_int(field(vars[i], "domain_size", p), p + ".domain_size");
    if (v.domain_size < 2) throw FormatError(p + ".domain_size: must be >= 2");
    mdp.variables.push_back(std::move(v));
  }

  const json& actions = array_field(doc, "actions", root);
  for (std::size_t i = 0; i < actions.size(); ++i)
    mdp.actions.push_back(as_string(actions[i], at_index(root + ".actions", i)));

  const json& cpds = array_field(doc, "cpds", root);
  for (std::size_t i = 0; i < cpds.size(); ++i) {
    std::string p = at_index(root + ".cpds", i);
    Cpd c;
    c.child = as_int(field(cpds[i], "child", p), p + ".child");
    c.parents = as_int_vector(field(cpds[i], "parents", p), p + ".parents");
    const json& tables = array_field(cpds[i], "tables_per_action", p);
    for (std::size_t a = 0; a < tables.size(); ++a)
      c.tables.push_back(as_double_vector(tables[a], at_index(p + ".tables_per_action", a)));
    mdp.cpds.push_back(std::move(c));
  }

  const int n = mdp.num_vars();
  const json& rewards = array_field(doc, "rewards", root);
  for (std::size_t j = 0; j < rewards.size(); ++j) {
    std::string p = at_index(root + ".rewards", j);
    RewardFactor r;
    r.scope = as_int_vector(field(rewards[j], "scope", p), p + ".scope");
    for (VarId v : r.scope)
      if (v < 0 || v >= n)
        throw FormatError(p + ".scope: variable " + std::to_string(v) + " out of range");
    const json& tables = array_field(rewards[j], "tables_per_action", p);
    for (std::size_t a = 0; a < tables.size(); ++a) {
      std::string tp = at_index(p + ".tables_per_action", a);
      try {
        r.tables.emplace_back(r.scope, mdp.dims_of(r.scope), as_double_vector(tables[a], tp));
      } catch (const std::invalid_argument& e) {
        throw FormatError(tp + ": " + e.what());
      }
    }
    mdp.rewards.push_back(std::move(r));
  }

  mdp.gamma = as_double(field(doc, "gamma", root), root + ".gamma");

  auto violations = validate(mdp);
  if (!violations.empty()) {
    std::string msg = "model: invalid after parsing:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw FormatError(msg);
  }
  return mdp;
}

void save_model(const FactoredMdp& mdp, const std::filesystem::path& path) {
  require_valid(mdp);
  write_text_file(path, model_to_string(mdp));
}

FactoredMdp load_model(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  try {
    return model_from_string(text);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace palp
