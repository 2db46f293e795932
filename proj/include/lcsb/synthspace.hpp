#pragma once

#include <cstdint>
#include <vector>

#include "lcsb/rng.hpp"
#include "lcsb/types.hpp"

namespace lcsb {

// The built-in cell space: 4 nodes, 6 edges, 5 ops, 100 epochs,
// 5^6 = 15625 architectures.
SearchSpaceSpec default_space();

struct SyntheticOracleConfig {
  SearchSpaceSpec space = default_space();
  double noise_scale = 0.02;       // in (0, 0.1]; 0 allowed for noiseless fixtures
  double base_epoch_cost = 10.0;   // seconds per epoch for the all-cheapest arch
  std::uint64_t master_seed = 0;
};

// Seeded ground-truth learning-curve distribution over a cell space. Mean
// curves follow a saturating power law a(t) = a_f - (a_f - a_0) * t^-c whose
// parameters are a deterministic function of the architecture, so the curve
// matrix is approximately low rank by construction. Noise is white Gaussian
// with a per-epoch std that decays over training.
class SyntheticOracle {
 public:
  explicit SyntheticOracle(SyntheticOracleConfig config);

  const SearchSpaceSpec& space() const { return config_.space; }
  const SyntheticOracleConfig& config() const { return config_; }

  LearningCurve mean_curve(const Architecture& arch) const;
  LearningCurve sample_curve(const Architecture& arch, std::uint64_t seed) const;
  double epoch_cost(const Architecture& arch) const;

  double noise_std(int epoch) const;  // sigma(t), epoch 1-indexed
  double final_mean(const Architecture& arch) const;
  double best_final_mean() const { return best_final_mean_; }

 private:
  struct CurveParams {
    double a_final;
    double a_start;
    double exponent;
  };
  CurveParams curve_params(const Architecture& arch) const;

  SyntheticOracleConfig config_;
  std::vector<double> op_quality_;       // edge-major [edge * ops + op]
  std::vector<double> shape_weights_;    // same layout
  std::vector<double> op_cost_;          // per op, min is exactly 0
  struct Interaction {
    int edge_a, op_a, edge_b, op_b;
    double weight;
  };
  std::vector<Interaction> interactions_;
  double best_final_mean_ = 0.0;
};

Architecture random_architecture(const SearchSpaceSpec& space, Rng& rng);
Architecture random_architecture(const SearchSpaceSpec& space, std::uint64_t seed);

// All architectures differing from arch in exactly one edge's op.
std::vector<Architecture> neighbors(const SearchSpaceSpec& space, const Architecture& arch);

Architecture mutate(const SearchSpaceSpec& space, const Architecture& arch, Rng& rng);
Architecture mutate(const SearchSpaceSpec& space, const Architecture& arch, std::uint64_t seed);

// n_arch distinct architectures sampled without replacement, seeds_per_arch
// noisy curves each, per-epoch costs attached.
CurveDataset generate_dataset(const SyntheticOracle& oracle, int n_arch, int seeds_per_arch,
                              std::uint64_t rng_seed);

}  // namespace lcsb
