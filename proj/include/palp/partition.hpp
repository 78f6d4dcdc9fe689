#pragma once

#include <string>
#include <utility>
#include <vector>

#include "palp/cost_network.hpp"

namespace palp {

/// Sparse K x T partitioning matrix D. Row k lists the (term, d_{k,term})
/// pairs of constraint space k; zeros are not stored.
struct PartitionMatrix {
  int term_count = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;

  int num_spaces() const { return static_cast<int>(rows.size()); }
  std::vector<std::vector<double>> dense() const;
};

constexpr double kPartitionTolerance = 1e-12;

/// One candidate space per basis term: the term and its cost-network
/// neighbours. Candidates whose term set is contained in another candidate
/// are dropped (identical sets keep the lower anchor), and each column is
/// spread evenly over the surviving spaces that contain it.
PartitionMatrix heuristic_partition(const CostNetwork& net);

/// K = 1, every coefficient 1: the partitioned program reduces to plain ALP.
PartitionMatrix single_space_partition(const CostNetwork& net);

/// Positivity, unit column sums and coverage; empty iff D is valid.
std::vector<std::string> validate_partition(const PartitionMatrix& d, const CostNetwork& net);

struct ConstraintSpace {
  int id = 0;
  std::vector<std::pair<int, double>> members;  // (term index, coefficient), by term index
  std::vector<VarId> scope;                     // union of member scopes, sorted
};

/// Throws std::invalid_argument when D does not validate against the network.
std::vector<ConstraintSpace> build_spaces(const PartitionMatrix& d, const CostNetwork& net);

/// {"spaces": [[[term, coeff], ...], ...]}; loading validates against `net`
/// and throws FormatError on any violation.
std::string partition_to_json_text(const PartitionMatrix& d);
PartitionMatrix partition_from_json_text(const std::string& text, const CostNetwork& net);

}  // namespace palp
