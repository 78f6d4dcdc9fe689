#include "palp/bench.hpp"

#include <algorithm>
#include <stdexcept>

#include "json_util.hpp"
#include "palp/model_io.hpp"

namespace palp {

namespace {

const char* kind_name(TopologyKind k) {
  switch (k) {
    case TopologyKind::Ring: return "ring";
    case TopologyKind::RingOfRings: return "ring-of-rings";
    case TopologyKind::Grid: return "grid";
  }
  return "?";
}

int parse_positive(const std::string& s, const std::string& spec) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw std::invalid_argument("bad topology '" + spec + "'");
  return v;
}

std::pair<int, int> parse_dims(const std::string& s, const std::string& spec) {
  auto x = s.find('x');
  if (x == std::string::npos) throw std::invalid_argument("bad topology '" + spec + "': expected AxB");
  return {parse_positive(s.substr(0, x), spec), parse_positive(s.substr(x + 1), spec)};
}

}  // namespace

Topology Topology::parse(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("bad topology '" + spec + "': expected kind:size");
  std::string kind = spec.substr(0, colon), size = spec.substr(colon + 1);
  Topology t;
  if (kind == "ring") {
    t = ring(parse_positive(size, spec));
  } else if (kind == "ring-of-rings") {
    auto [r, s] = parse_dims(size, spec);
    t = ring_of_rings(r, s);
  } else if (kind == "grid") {
    auto [r, c] = parse_dims(size, spec);
    t = grid(r, c);
  } else {
    throw std::invalid_argument("bad topology '" + spec + "': unknown kind '" + kind + "'");
  }
  t.require_valid();
  return t;
}

std::string Topology::to_string() const {
  std::string s = std::string(kind_name(kind)) + ":" + std::to_string(a);
  if (kind != TopologyKind::Ring) s += "x" + std::to_string(b);
  return s;
}

int Topology::num_computers() const { return kind == TopologyKind::Ring ? a : a * b; }

void Topology::require_valid() const {
  switch (kind) {
    case TopologyKind::Ring:
      if (a < 3) throw std::invalid_argument("ring needs at least 3 computers");
      return;
    case TopologyKind::RingOfRings:
      if (a < 2 || b < 3)
        throw std::invalid_argument("ring-of-rings needs at least 2 rings of at least 3 computers");
      return;
    case TopologyKind::Grid:
      if (a < 2 || b < 2) throw std::invalid_argument("grid sides must be at least 2");
      return;
  }
}

std::vector<Arrow> arrow_list(const Topology& t) {
  t.require_valid();
  std::vector<Arrow> arrows;
  switch (t.kind) {
    case TopologyKind::Ring:
      for (int i = 0; i < t.a; ++i) arrows.emplace_back(i, (i + 1) % t.a);
      break;
    case TopologyKind::RingOfRings:
      for (int r = 0; r < t.a; ++r)
        for (int k = 0; k < t.b; ++k) arrows.emplace_back(r * t.b + k, r * t.b + (k + 1) % t.b);
      for (int r = 0; r < t.a; ++r) arrows.emplace_back(r * t.b, ((r + 1) % t.a) * t.b);
      break;
    case TopologyKind::Grid:
      for (int r = 0; r < t.a; ++r)
        for (int c = 0; c < t.b; ++c) {
          int id = r * t.b + c;
          if (c + 1 < t.b) arrows.emplace_back(id, id + 1);
          if (r + 1 < t.a) arrows.emplace_back(id, id + t.b);
        }
      break;
  }
  return arrows;
}

NetworkInstance generate(const Topology& topology, const DynamicsParams& dyn, double gamma) {
  topology.require_valid();
  NetworkInstance inst;
  inst.topology = topology;
  inst.dynamics = dyn;
  inst.server = topology.server();
  inst.arrows = arrow_list(topology);

  const int n = topology.num_computers();
  FactoredMdp& mdp = inst.mdp;
  mdp.gamma = gamma;
  for (int i = 0; i < n; ++i) mdp.variables.push_back({i, "c" + std::to_string(i), 2});
  for (int i = 0; i < n; ++i) mdp.actions.push_back("reboot_c" + std::to_string(i));
  mdp.actions.push_back("noop");

  std::vector<std::vector<VarId>> in(static_cast<std::size_t>(n));
  for (auto [from, to] : inst.arrows) in[static_cast<std::size_t>(to)].push_back(from);

  for (int i = 0; i < n; ++i) {
    Cpd cpd;
    cpd.child = i;
    cpd.parents = in[static_cast<std::size_t>(i)];
    cpd.parents.push_back(i);
    std::sort(cpd.parents.begin(), cpd.parents.end());
    cpd.parents.erase(std::unique(cpd.parents.begin(), cpd.parents.end()), cpd.parents.end());
    const auto& neighbors = in[static_cast<std::size_t>(i)];
    std::vector<int> dims(cpd.parents.size(), 2);
    std::vector<int> state(static_cast<std::size_t>(n), 0);
    for (int a = 0; a <= n; ++a) {
      std::vector<double> table;
      for_each_assignment(cpd.parents, dims, state, [&] {
        double up;
        if (a == i) {
          up = dyn.reboot_success;
        } else if (state[static_cast<std::size_t>(i)] == 1) {
          double failed = 0.0;
          for (VarId u : neighbors) failed += state[static_cast<std::size_t>(u)] == 0 ? 1.0 : 0.0;
          double frac = neighbors.empty() ? 0.0 : failed / static_cast<double>(neighbors.size());
          up = dyn.up_base - dyn.neighbor_penalty * frac;
        } else {
          up = 0.0;
        }
        table.push_back(1.0 - up);
        table.push_back(up);
      });
      cpd.tables.push_back(std::move(table));
    }
    mdp.cpds.push_back(std::move(cpd));
  }

  for (int i = 0; i < n; ++i) {
    double scale = i == inst.server ? 2.0 : 1.0;
    RewardFactor rf;
    rf.scope = {i};
    for (int a = 0; a <= n; ++a) rf.tables.emplace_back(rf.scope, std::vector<int>{2}, std::vector<double>{0.0, scale});
    mdp.rewards.push_back(std::move(rf));
  }
  return inst;
}

BasisSet basis_preset(const std::string& name, const NetworkInstance& inst) {
  BasisSet basis = singleton_basis(inst.mdp);
  if (name == "singleton") return basis;
  if (name == "singleton-pairwise") {
    if (inst.topology.kind == TopologyKind::Grid)
      throw std::invalid_argument("singleton-pairwise basis is defined for ring layouts only");
    add_pairwise_bases(inst.mdp, inst.arrows, basis);
    return basis;
  }
  throw std::invalid_argument("unknown basis preset '" + name + "'");
}

std::string metadata_to_json_text(const NetworkInstance& inst) {
  using detail::json;
  json arrows = json::array();
  for (auto [from, to] : inst.arrows) arrows.push_back({from, to});
  json doc{{"topology", inst.topology.to_string()},
           {"server", inst.server},
           {"arrows", arrows},
           {"dynamics",
            {{"reboot_success", inst.dynamics.reboot_success},
             {"up_base", inst.dynamics.up_base},
             {"neighbor_penalty", inst.dynamics.neighbor_penalty}}},
           {"gamma", inst.mdp.gamma}};
  return doc.dump(1) + "\n";
}

NetworkInstance instance_from_metadata(FactoredMdp mdp, const std::string& text) {
  using namespace detail;
  json doc = parse_json(text, "metadata");
  NetworkInstance inst;
  try {
    inst.topology = Topology::parse(as_string(field(doc, "topology", "metadata"), "metadata.topology"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("metadata.topology: ") + e.what());
  }
  inst.server = as_int(field(doc, "server", "metadata"), "metadata.server");
  if (inst.server < 0 || inst.server >= mdp.num_vars())
    throw FormatError("metadata.server: out of range");
  const json& arrows = array_field(doc, "arrows", "metadata");
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    auto pair = as_int_vector(arrows[i], at_index("metadata.arrows", i));
    if (pair.size() != 2) throw FormatError(at_index("metadata.arrows", i) + ": expected [from, to]");
    inst.arrows.emplace_back(pair[0], pair[1]);
  }
  const json& dyn = field(doc, "dynamics", "metadata");
  inst.dynamics.reboot_success = as_double(field(dyn, "reboot_success", "metadata.dynamics"), "metadata.dynamics.reboot_success");
  inst.dynamics.up_base = as_double(field(dyn, "up_base", "metadata.dynamics"), "metadata.dynamics.up_base");
  inst.dynamics.neighbor_penalty = as_double(field(dyn, "neighbor_penalty", "metadata.dynamics"), "metadata.dynamics.neighbor_penalty");
  inst.mdp = std::move(mdp);
  return inst;
}

std::filesystem::path metadata_path_for(const std::filesystem::path& model_path) {
  std::filesystem::path p = model_path;
  p.replace_extension(".meta.json");
  return p;
}

void save_instance(const NetworkInstance& inst, const std::filesystem::path& model_path) {
  save_model(inst.mdp, model_path);
  write_text_file(metadata_path_for(model_path), metadata_to_json_text(inst));
}

NetworkInstance load_instance(const std::filesystem::path& model_path) {
  FactoredMdp mdp = load_model(model_path);
  auto meta = metadata_path_for(model_path);
  try {
    return instance_from_metadata(std::move(mdp), read_text_file(meta));
  } catch (const FormatError& e) {
    throw FormatError(meta.string() + ": " + e.what());
  }
}

}  // namespace palp
