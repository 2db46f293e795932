#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>

#include "lcsb/types.hpp"

namespace lcsb {

// .lcds dataset files: one JSON header line describing the space and schema,
// then one comma-separated record per line (op indices, seed, accuracies,
// optional per-epoch cost). UTF-8, LF line endings, accuracies printed with
// round-trip-exact formatting.
void write_dataset(const std::filesystem::path& path, const CurveDataset& dataset);
CurveDataset read_dataset(const std::filesystem::path& path);

// Splits BY ARCHITECTURE: all seeds of one architecture land on one side.
// |test archs| = round(test_fraction * archs), round-half-even.
std::pair<CurveDataset, CurveDataset> split_dataset(const CurveDataset& dataset,
                                                    double test_fraction,
                                                    std::uint64_t seed);

}  // namespace lcsb
