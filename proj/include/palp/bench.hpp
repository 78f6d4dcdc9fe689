#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "palp/basis.hpp"
#include "palp/mdp.hpp"

namespace palp {

enum class TopologyKind { Ring, RingOfRings, Grid };

/// Network layout for the network-administration benchmark.
///
///   ring:n            computers 0..n-1, arrows i -> i+1 (mod n)
///   ring-of-rings:RxS R inner directed rings of S computers; computer r*S
///                     of each inner ring also sits on an outer directed
///                     cycle r*S -> ((r+1) mod R)*S
///   grid:RxC          cell (r,c) = r*C + c, arrows to the right and down
///
/// The server is computer 0 in every layout.
struct Topology {
  TopologyKind kind = TopologyKind::Ring;
  int a = 6;  // ring size | ring count | grid rows
  int b = 0;  // unused    | ring size  | grid cols

  static Topology ring(int n) { return {TopologyKind::Ring, n, 0}; }
  static Topology ring_of_rings(int rings, int ring_size) {
    return {TopologyKind::RingOfRings, rings, ring_size};
  }
  static Topology grid(int rows, int cols) { return {TopologyKind::Grid, rows, cols}; }

  /// Parses "ring:6", "ring-of-rings:4x3", "grid:3x3".
  static Topology parse(const std::string& spec);
  std::string to_string() const;

  int num_computers() const;
  int server() const { return 0; }
  void require_valid() const;
};

using Arrow = std::pair<VarId, VarId>;

std::vector<Arrow> arrow_list(const Topology& topology);

/// Crash dynamics. Rebooting computer i brings it up with probability
/// `reboot_success`. Otherwise a running computer stays up with probability
/// up_base - neighbor_penalty * (failed in-neighbours / in-neighbours) and a
/// crashed one stays down.
struct DynamicsParams {
  double reboot_success = 0.95;
  double up_base = 0.9;
  double neighbor_penalty = 0.3;
};

struct NetworkInstance {
  FactoredMdp mdp;
  Topology topology;
  DynamicsParams dynamics;
  VarId server = 0;
  std::vector<Arrow> arrows;
};

/// One binary variable per computer (1 = up), actions reboot_<i> for each
/// computer followed by noop, rewards x_i (2 x_i for the server).
NetworkInstance generate(const Topology& topology, const DynamicsParams& dynamics = {},
                         double gamma = 0.95);

/// "singleton" or "singleton-pairwise"; the pairwise preset adds x_i x_j
/// per arrow and exists for ring and ring-of-rings layouts only.
BasisSet basis_preset(const std::string& name, const NetworkInstance& instance);

/// Sidecar document with topology, server, arrows, dynamics and gamma.
std::string metadata_to_json_text(const NetworkInstance& instance);
/// Restores the instance metadata around an already loaded model.
NetworkInstance instance_from_metadata(FactoredMdp mdp, const std::string& text);

std::filesystem::path metadata_path_for(const std::filesystem::path& model_path);

void save_instance(const NetworkInstance& instance, const std::filesystem::path& model_path);
NetworkInstance load_instance(const std::filesystem::path& model_path);

}  // namespace palp
