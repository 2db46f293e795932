#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lcsb/lowrank.hpp"
#include "lcsb/noise.hpp"
#include "lcsb/regress.hpp"
#include "lcsb/types.hpp"

namespace lcsb {

// Extra features appended to the one-hot encoding before the mu-model.
struct Augmentation {
  enum class Kind { none, anchor_epochs, first_n_epochs };
  Kind kind = Kind::none;
  std::vector<int> anchors;  // 1-indexed epochs, for anchor_epochs
  int first_n = 0;           // for first_n_epochs

  int feature_count() const;
  // epochs of training a query must pay for before the surrogate can answer
  int required_epochs() const;
  std::vector<double> features_from_curve(const LearningCurve& curve) const;
  void validate(int e_max) const;

  bool operator==(const Augmentation&) const = default;
};

struct SurrogateConfig {
  int k = 0;        // 0 = auto via select_rank
  int k_max = kDefaultRankCap;
  bool allow_rank_fallback = false;  // auto without multi-seed data: fall back to k=6
  RegressorConfig mu;
  NoiseKind noise_kind = NoiseKind::stddev;
  RegressorConfig window_sigma = default_window_sigma_config();
  Augmentation augmentation;
  std::string version = "1";
  std::uint64_t rng_seed = 0;

  void validate(int e_max) const;
};

struct FitReport {
  int selected_k = 0;
  int train_records = 0;
  int train_archs = 0;
  double mean_epoch_cost = 1.0;
  std::vector<std::uint64_t> train_arch_ids;  // sorted
};

// Compression basis + mu-model + noise model behind one query surface.
// Immutable after fit/load; queries are pure functions of their arguments.
class SurrogateModel {
 public:
  SearchSpaceSpec space;
  SvdBasis basis;
  FittedRegressor mu;
  NoiseModel noise;
  SurrogateConfig config;
  FitReport report;

  LearningCurve query_mean(const Architecture& arch,
                           std::span<const double> aug_values = {}) const;

  // Full noisy curve; fixed given (arch, seed), so prefixes of different
  // lengths agree on their overlap.
  LearningCurve query_noisy_full(const Architecture& arch, std::uint64_t seed,
                                 std::span<const double> aug_values = {}) const;

  std::vector<double> query_noisy(const Architecture& arch, std::uint64_t seed,
                                  int up_to_epoch,
                                  std::span<const double> aug_values = {}) const;

  std::vector<double> mu_features(const Architecture& arch,
                                  std::span<const double> aug_values) const;
};

SurrogateModel fit_surrogate(const CurveDataset& train, const SurrogateConfig& config);

// Single-file container: JSON metadata header, length-prefixed numeric
// sections, CRC-32 trailer. Extension .lcsm.
void save_surrogate(const SurrogateModel& model, const std::filesystem::path& path);
SurrogateModel load_surrogate(const std::filesystem::path& path);

}  // namespace lcsb
