#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lcsb/lowrank.hpp"
#include "lcsb/regress.hpp"
#include "lcsb/types.hpp"

namespace lcsb {

enum class NoiseKind { stddev, gkde, window };

std::string noise_kind_name(NoiseKind k);
NoiseKind noise_kind_from_name(const std::string& name);

// Residuals of curves against their own rank-k reconstruction.
struct ResidualSet {
  std::vector<std::vector<double>> residuals;  // N x e_max
  std::vector<Encoding> encodings;
  int e_max = 0;
};

ResidualSet extract_residuals(const CurveDataset& dataset, const SvdBasis& basis);

// Three residual-distribution models:
//   stddev  - per-epoch sigma_j = sqrt(sum_i eps_ij^2 / (N-1)), zero-centered
//   gkde    - stored residual rows resampled with a per-epoch Gaussian
//             perturbation, Scott bandwidth h_j = sigma_j * N^(-1/(e_max+4))
//   window  - regressor predicting per-epoch sigma from
//             (encoding + predicted coefficients); targets are sample stds
//             over a size-10 window, clamped at curve boundaries
// Samples are winsorized at three predicted standard deviations.
struct NoiseModel {
  NoiseKind kind = NoiseKind::stddev;
  int e_max = 0;
  std::vector<double> sigma;                    // stddev kind (also gkde's sigma_j)
  std::vector<std::vector<double>> kde_rows;    // gkde
  std::vector<double> kde_bandwidth;            // gkde
  std::optional<FittedRegressor> window_model;  // window

  // Per-epoch std of the sampling distribution given the feature vector
  // (encoding + predicted coefficients); kinds (i) and (ii) ignore it.
  std::vector<double> predicted_sigma(const std::vector<double>& features) const;

  std::vector<double> sample(const std::vector<double>& features, std::uint64_t seed) const;
};

constexpr double kBandwidthFloor = 1e-6;
constexpr int kNoiseWindowSize = 10;

NoiseModel fit_noise(NoiseKind kind, const ResidualSet& residuals);

RegressorConfig default_window_sigma_config();

// Window kind; `features` rows pair with residual rows.
NoiseModel fit_noise_window(const ResidualSet& residuals,
                            const std::vector<std::vector<double>>& features,
                            const RegressorConfig& config = default_window_sigma_config());

}  // namespace lcsb
