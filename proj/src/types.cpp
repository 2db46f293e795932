#include "lcsb/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lcsb/errors.hpp"

namespace lcsb {

std::uint64_t SearchSpaceSpec::num_architectures() const {
  std::uint64_t n = 1;
  const auto ops = static_cast<std::uint64_t>(num_ops());
  for (int e = 0; e < num_edges(); ++e) {
    if (n > std::numeric_limits<std::uint64_t>::max() / ops)
      throw ConfigError("search space too large to enumerate");
    n *= ops;
  }
  return n;
}

void SearchSpaceSpec::validate() const {
  if (op_names.empty()) throw ConfigError("search space needs at least one operation");
  if (e_max < 2) throw ConfigError("search space needs e_max >= 2");
  if (node_count < 2) throw ConfigError("search space needs at least two nodes");
  if (edge_list.empty()) throw ConfigError("search space needs at least one edge");

  std::vector<int> in_deg(node_count, 0), out_deg(node_count, 0);
  for (auto [u, v] : edge_list) {
    if (u < 0 || v < 0 || u >= node_count || v >= node_count)
      throw ConfigError("edge endpoint out of range");
    if (u >= v) throw ConfigError("edges must go from lower to higher node index (DAG)");
    ++out_deg[u];
    ++in_deg[v];
  }
  // single input node (index 0), single output node (last index)
  if (in_deg[0] != 0 || out_deg[0] == 0)
    throw ConfigError("node 0 must be the unique input node");
  if (out_deg[node_count - 1] != 0 || in_deg[node_count - 1] == 0)
    throw ConfigError("last node must be the unique output node");
  for (int i = 1; i + 1 < node_count; ++i)
    if (in_deg[i] == 0 || out_deg[i] == 0)
      throw ConfigError("interior node " + std::to_string(i) + " is disconnected");
}

bool CurveDataset::has_costs() const {
  return !records.empty() &&
         std::all_of(records.begin(), records.end(),
                     [](const CurveRecord& r) { return r.has_cost(); });
}

void CurveDataset::validate() const {
  space.validate();
  for (const auto& rec : records) {
    validate_architecture(rec.arch, space);
    if (static_cast<int>(rec.curve.size()) != space.e_max)
      throw DataError("curve length does not match space e_max");
    for (double v : rec.curve)
      if (!(v >= 0.0 && v <= 1.0)) throw DataError("curve value outside [0,1]");
  }
}

void validate_architecture(const Architecture& arch, const SearchSpaceSpec& space) {
  if (static_cast<int>(arch.op_choice_per_edge.size()) != space.num_edges())
    throw ConfigError("architecture has wrong number of edge choices");
  for (int c : arch.op_choice_per_edge)
    if (c < 0 || c >= space.num_ops())
      throw ConfigError("op index " + std::to_string(c) + " out of range");
}

std::uint64_t arch_index(const Architecture& arch, const SearchSpaceSpec& space) {
  validate_architecture(arch, space);
  std::uint64_t idx = 0;
  const auto ops = static_cast<std::uint64_t>(space.num_ops());
  for (int c : arch.op_choice_per_edge) idx = idx * ops + static_cast<std::uint64_t>(c);
  return idx;
}

Architecture arch_from_index(std::uint64_t index, const SearchSpaceSpec& space) {
  const auto ops = static_cast<std::uint64_t>(space.num_ops());
  Architecture arch;
  arch.op_choice_per_edge.assign(space.num_edges(), 0);
  for (int e = space.num_edges() - 1; e >= 0; --e) {
    arch.op_choice_per_edge[e] = static_cast<int>(index % ops);
    index /= ops;
  }
  if (index != 0) throw ConfigError("architecture index out of range for space");
  return arch;
}

Encoding encode(const Architecture& arch, const SearchSpaceSpec& space) {
  validate_architecture(arch, space);
  Encoding enc;
  enc.bits.assign(static_cast<std::size_t>(space.encoding_width()), 0.0);
  const int ops = space.num_ops();
  for (int e = 0; e < space.num_edges(); ++e)
    enc.bits[static_cast<std::size_t>(e) * ops + arch.op_choice_per_edge[e]] = 1.0;
  return enc;
}

LearningCurve mean_curve(const std::vector<LearningCurve>& curves) {
  if (curves.empty()) throw ConfigError("mean_curve needs at least one curve");
  const std::size_t len = curves.front().size();
  LearningCurve out(len, 0.0);
  for (const auto& c : curves) {
    if (c.size() != len) throw ConfigError("mean_curve needs equal-length curves");
    for (std::size_t i = 0; i < len; ++i) out[i] += c[i];
  }
  const double inv = 1.0 / static_cast<double>(curves.size());
  for (double& v : out) v *= inv;
  return out;
}

std::vector<double> curve_prefix(const LearningCurve& curve, int epoch) {
  if (epoch < 1 || epoch > static_cast<int>(curve.size()))
    throw ConfigError("prefix epoch out of range");
  return {curve.begin(), curve.begin() + epoch};
}

}  // namespace lcsb
