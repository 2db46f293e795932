#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcsb/types.hpp"

namespace lcsb {

enum class RegressorBackend { gbt, mlp, kridge };

std::string backend_name(RegressorBackend b);
RegressorBackend backend_from_name(const std::string& name);

struct GbtParams {
  int n_trees = 100;
  int max_depth = 6;
  double learning_rate = 0.1;
  int min_samples_leaf = 5;
};

struct MlpParams {
  int hidden = 64;
  double learning_rate = 0.001;
  int epochs = 200;
  int batch = 32;
};

struct KridgeParams {
  double ridge = 1e-3;
  double length_scale = 0.0;  // 0 = median pairwise distance heuristic
};

struct RegressorConfig {
  RegressorBackend backend = RegressorBackend::gbt;
  GbtParams gbt;
  MlpParams mlp;
  KridgeParams kridge;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Least-squares gradient boosting with exact greedy splits. Split ties break
// toward the lowest feature index, then the lowest threshold.
class GbtModel {
 public:
  struct Node {
    int feature = -1;  // -1 = leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  struct Tree {
    std::vector<Node> nodes;
  };

  static GbtModel fit(const GbtParams& params, const std::vector<std::vector<double>>& x,
                      const std::vector<double>& y);

  double predict(std::span<const double> x) const;
  double predict_staged(std::span<const double> x, int n_rounds) const;

  // Total squared-error reduction per feature, normalized to sum 1
  // (all zeros if no split was ever made).
  std::vector<double> feature_importance() const;

  double base = 0.0;
  double learning_rate = 0.1;
  std::vector<Tree> trees;
  std::vector<double> split_gain;  // per feature, unnormalized
  int n_features = 0;
};

// ---------------------------------------------------------------------------
// One hidden layer of rectified units, trained with plain SGD on the squared
// loss. Parameters live in one flat vector [w1, b1, w2, b2].
class MlpModel {
 public:
  static MlpModel fit(const MlpParams& params, const std::vector<std::vector<double>>& x,
                      const std::vector<double>& y, std::uint64_t seed);
  static MlpModel zeros(int n_features, int hidden);

  double predict(std::span<const double> x) const;

  // Mean squared loss over the batch plus its gradient w.r.t. every weight.
  double loss_and_grad(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                       std::vector<double>& grad) const;

  std::vector<double> params_flat;
  int n_features = 0;
  int hidden = 0;
};

// ---------------------------------------------------------------------------
// Radial-basis kernel ridge regression; naturally multi-output (one linear
// solve per output against a shared Cholesky factor).
class KridgeModel {
 public:
  static KridgeModel fit(const KridgeParams& params, const std::vector<std::vector<double>>& x,
                         const std::vector<std::vector<double>>& y);

  std::vector<double> predict(std::span<const double> x) const;

  // max over outputs of ||(K + ridge I) alpha - y||_2, for diagnostics
  double solve_residual_norm() const;

  std::vector<std::vector<double>> train_x;
  std::vector<std::vector<double>> alphas;  // one per output
  double length_scale = 1.0;
  double ridge = 1e-3;
  int n_outputs = 0;

 private:
  std::vector<std::vector<double>> train_y_;  // kept for the residual check
};

double median_pairwise_distance(const std::vector<std::vector<double>>& x);

// ---------------------------------------------------------------------------
// Multi-output facade: one independent single-output model per output
// coordinate (kridge handles all outputs natively).
class FittedRegressor {
 public:
  static FittedRegressor fit(const RegressorConfig& config,
                             const std::vector<std::vector<double>>& x,
                             const std::vector<std::vector<double>>& y);
  static FittedRegressor fit(const RegressorConfig& config, const std::vector<Encoding>& x,
                             const std::vector<std::vector<double>>& y);

  std::vector<double> predict(const std::vector<double>& x) const;
  std::vector<double> feature_importance() const;

  RegressorBackend backend() const { return backend_; }
  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }

  RegressorBackend backend_ = RegressorBackend::gbt;
  int input_dim_ = 0;
  int output_dim_ = 0;
  std::vector<GbtModel> gbt_models;
  std::vector<MlpModel> mlp_models;
  std::optional<KridgeModel> kridge_model;
};

}  // namespace lcsb
