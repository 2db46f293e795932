#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lcsb {

// Per-epoch validation accuracies, every value in [0, 1]. Epochs are
// 1-indexed in all interfaces; storage is 0-indexed.
using LearningCurve = std::vector<double>;

// A cell search space: a fixed DAG with one operation choice per edge.
struct SearchSpaceSpec {
  int node_count = 0;
  std::vector<std::pair<int, int>> edge_list;
  std::vector<std::string> op_names;
  int e_max = 0;
  std::string id;

  int num_edges() const { return static_cast<int>(edge_list.size()); }
  int num_ops() const { return static_cast<int>(op_names.size()); }
  int encoding_width() const { return num_edges() * num_ops(); }

  // ops^edges; throws if the count overflows 64 bits.
  std::uint64_t num_architectures() const;

  // Checks DAG shape (single source, single sink, topological edges),
  // nonempty op set, e_max >= 2.
  void validate() const;
};

struct Architecture {
  std::vector<int> op_choice_per_edge;
  bool operator==(const Architecture&) const = default;
};

// Flat feature vector: a one-hot block per edge, optionally followed by
// real-valued auxiliary features in [0, 1].
struct Encoding {
  std::vector<double> bits;
  int aux_count = 0;

  int onehot_width() const { return static_cast<int>(bits.size()) - aux_count; }
  bool operator==(const Encoding&) const = default;
};

struct CurveRecord {
  Architecture arch;
  Encoding encoding;
  std::int64_t seed = 0;
  LearningCurve curve;
  double epoch_cost_seconds = -1.0;  // < 0 means absent

  bool has_cost() const { return epoch_cost_seconds >= 0.0; }
};

struct CurveDataset {
  SearchSpaceSpec space;
  std::vector<CurveRecord> records;

  bool has_costs() const;
  void validate() const;
};

void validate_architecture(const Architecture& arch, const SearchSpaceSpec& space);

// Mixed-radix bijection between architectures and [0, ops^edges).
std::uint64_t arch_index(const Architecture& arch, const SearchSpaceSpec& space);
Architecture arch_from_index(std::uint64_t index, const SearchSpaceSpec& space);

Encoding encode(const Architecture& arch, const SearchSpaceSpec& space);
LearningCurve mean_curve(const std::vector<LearningCurve>& curves);
std::vector<double> curve_prefix(const LearningCurve& curve, int epoch);

}  // namespace lcsb
