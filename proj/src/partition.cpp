#include "palp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json_util.hpp"

namespace palp {

std::vector<std::vector<double>> PartitionMatrix::dense() const {
  std::vector<std::vector<double>> out(rows.size(),
                                       std::vector<double>(static_cast<std::size_t>(term_count)));
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (auto [i, d] : rows[k]) out[k][static_cast<std::size_t>(i)] += d;
  return out;
}

PartitionMatrix heuristic_partition(const CostNetwork& net) {
  std::vector<std::vector<int>> candidates;
  for (int k = 0; k < net.size(); ++k) {
    if (net.terms[static_cast<std::size_t>(k)].kind != TermKind::Basis) continue;
    std::vector<int> c = net.adjacency[static_cast<std::size_t>(k)];
    c.push_back(k);
    std::sort(c.begin(), c.end());
    candidates.push_back(std::move(c));
  }
  if (candidates.empty())
    throw std::invalid_argument("heuristic_partition: network has no basis terms");

  std::vector<std::vector<int>> kept;
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    bool dropped = false;
    for (std::size_t b = 0; b < candidates.size() && !dropped; ++b) {
      if (a == b) continue;
      const auto& ca = candidates[a];
      const auto& cb = candidates[b];
      if (!std::includes(cb.begin(), cb.end(), ca.begin(), ca.end())) continue;
      // Proper subsets always go; of two equal sets the later anchor goes.
      dropped = ca.size() < cb.size() || b < a;
    }
    if (!dropped) kept.push_back(candidates[a]);
  }

  std::vector<int> count(static_cast<std::size_t>(net.size()), 0);
  for (const auto& c : kept)
    for (int i : c) ++count[static_cast<std::size_t>(i)];

  PartitionMatrix d;
  d.term_count = net.size();
  for (const auto& c : kept) {
    std::vector<std::pair<int, double>> row;
    for (int i : c) row.emplace_back(i, 1.0 / count[static_cast<std::size_t>(i)]);
    d.rows.push_back(std::move(row));
  }
  return d;
}

PartitionMatrix single_space_partition(const CostNetwork& net) {
  PartitionMatrix d;
  d.term_count = net.size();
  std::vector<std::pair<int, double>> row;
  for (int i = 0; i < net.size(); ++i) row.emplace_back(i, 1.0);
  d.rows.push_back(std::move(row));
  return d;
}

std::vector<std::string> validate_partition(const PartitionMatrix& d, const CostNetwork& net) {
  std::vector<std::string> out;
  if (d.term_count != net.size())
    out.push_back("term count " + std::to_string(d.term_count) + " does not match network size " +
                  std::to_string(net.size()));
  if (d.rows.empty()) out.push_back("no constraint spaces");
  std::vector<double> colsum(static_cast<std::size_t>(net.size()), 0.0);
  std::vector<int> hits(static_cast<std::size_t>(net.size()), 0);
  for (std::size_t k = 0; k < d.rows.size(); ++k) {
    std::vector<int> seen;
    for (auto [i, v] : d.rows[k]) {
      std::string where = "space " + std::to_string(k) + " term " + std::to_string(i);
      if (i < 0 || i >= net.size()) {
        out.push_back(where + ": term index out of range");
        continue;
      }
      if (std::find(seen.begin(), seen.end(), i) != seen.end())
        out.push_back(where + ": listed twice");
      seen.push_back(i);
      if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << where << ": coefficient " << v << " is not positive";
        out.push_back(os.str());
        continue;
      }
      colsum[static_cast<std::size_t>(i)] += v;
      ++hits[static_cast<std::size_t>(i)];
    }
  }
  for (int i = 0; i < net.size(); ++i) {
    auto ui = static_cast<std::size_t>(i);
    if (hits[ui] == 0) {
      out.push_back("term " + std::to_string(i) + ": not covered by any space");
    } else if (std::abs(colsum[ui] - 1.0) > kPartitionTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "term " << i << ": column sums to " << colsum[ui] << ", expected 1";
      out.push_back(os.str());
    }
  }
  return out;
}

std::vector<ConstraintSpace> build_spaces(const PartitionMatrix& d, const CostNetwork& net) {
  auto violations = validate_partition(d, net);
  if (!violations.empty()) {
    std::string msg = "invalid partitioning matrix:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }
  std::vector<ConstraintSpace> spaces;
  for (std::size_t k = 0; k < d.rows.size(); ++k) {
    ConstraintSpace s;
    s.id = static_cast<int>(k);
    s.members = d.rows[k];
    std::sort(s.members.begin(), s.members.end());
    for (auto [i, v] : s.members) s.scope = scope_union(s.scope, net.terms[static_cast<std::size_t>(i)].scope);
    spaces.push_back(std::move(s));
  }
  return spaces;
}

std::string partition_to_json_text(const PartitionMatrix& d) {
  using detail::json;
  json spaces = json::array();
  for (const auto& row : d.rows) {
    json r = json::array();
    for (auto [i, v] : row) r.push_back({i, v});
    spaces.push_back(r);
  }
  return json{{"spaces", spaces}}.dump() + "\n";
}

PartitionMatrix partition_from_json_text(const std::string& text, const CostNetwork& net) {
  using namespace detail;
  json doc = parse_json(text, "partition");
  const json& spaces = array_field(doc, "spaces", "partition");
  PartitionMatrix d;
  d.term_count = net.size();
  for (std::size_t k = 0; k < spaces.size(); ++k) {
    std::string p = at_index("partition.spaces", k);
    require_array(spaces[k], p);
    std::vector<std::pair<int, double>> row;
    for (std::size_t e = 0; e < spaces[k].size(); ++e) {
      std::string ep = at_index(p, e);
      const json& pair = spaces[k][e];
      if (!pair.is_array() || pair.size() != 2) throw FormatError(ep + ": expected [term, coeff]");
      row.emplace_back(as_int(pair[0], ep + "[0]"), as_double(pair[1], ep + "[1]"));
    }
    d.rows.push_back(std::move(row));
  }
  auto violations = validate_partition(d, net);
  if (!violations.empty()) {
    std::string msg = "partition: invalid matrix:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw FormatError(msg);
  }
  return d;
}

}  // namespace palp
