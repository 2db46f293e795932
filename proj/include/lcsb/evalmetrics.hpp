#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcsb/surrogate.hpp"
#include "lcsb/types.hpp"

namespace lcsb {

// Rank correlation (P - Q) / (P + Q) over strictly concordant and discordant
// pairs; ties are excluded from both counts. Throws when every pair is tied.
double kendall_tau(std::span<const double> pred, std::span<const double> truth);

double r_squared(std::span<const double> pred, std::span<const double> truth);

// KL divergence D(y || y_hat) between two diagonal-Gaussian fits, normalized
// by curve length. Sample means and unbiased sample variances per epoch;
// variances floored at 1e-8 on both sides. Needs >= 2 samples per side.
double kl_divergence(const std::vector<LearningCurve>& true_curves,
                     const std::vector<LearningCurve>& pred_curves);

constexpr double kVarianceFloor = 1e-8;

// Smallest observed value x such that strictly fewer than 5% of the curves
// have max(y) - y[last] > x.
double spike_threshold(const std::vector<LearningCurve>& real_curves);

double spike_rate(const std::vector<LearningCurve>& curves, double x);

struct EvalReport {
  double avg_r2 = 0.0, final_r2 = 0.0;
  double avg_kt = 0.0, final_kt = 0.0;
  std::optional<double> avg_kl, final_kl;  // absent when the test set is single-seed
  double spike_threshold_x = 0.0;
  double spike_rate_real = 0.0;
  double spike_rate_surrogate = 0.0;
  int n_test = 0;
  int seeds_per_arch = 0;
};

// Supplies augmentation feature values for a test architecture; empty
// function means no augmentation.
using AugSource = std::function<std::vector<double>(const Architecture&)>;

struct EvalOptions {
  int surrogate_seeds = 10;
  std::uint64_t seed = 0;
};

EvalReport evaluate_surrogate(const SurrogateModel& model, const CurveDataset& test,
                              const AugSource& aug_source = {},
                              const EvalOptions& options = {});

// Ground-truth reference rows: rank metrics of a mean over m held-out seeds
// against the mean of the remaining seeds.
struct KSeedRow {
  int m = 0;
  double avg_r2 = 0.0, final_r2 = 0.0;
  double avg_kt = 0.0, final_kt = 0.0;
};

std::vector<KSeedRow> kseed_baselines(const CurveDataset& test, int max_m = 4);

std::string eval_report_csv(const EvalReport& report, const std::vector<KSeedRow>& baselines);
std::string eval_report_json(const EvalReport& report, const std::vector<KSeedRow>& baselines);

}  // namespace lcsb
