#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "lcsb/regress.hpp"
#include "lcsb/types.hpp"

namespace lcsb {

// Saturating parametric curve families used for extrapolation:
//   pow3       a - b * t^-c
//   log_power  a / (1 + (t/b)^-c)
//   exp3       a - b * exp(-c t)
//   janoschek  a - (a - b) * exp(-c t^d)
enum class CurveFamily { pow3, log_power, exp3, janoschek };

constexpr std::array<CurveFamily, 4> kAllFamilies = {
    CurveFamily::pow3, CurveFamily::log_power, CurveFamily::exp3, CurveFamily::janoschek};

std::string family_name(CurveFamily f);
int family_param_count(CurveFamily f);
double family_eval(CurveFamily f, std::span<const double> params, double t);

struct ParametricFit {
  CurveFamily family = CurveFamily::pow3;
  std::array<double, 4> params{};
  double rmse = 0.0;
  bool diverged = false;  // all starts failed; callers fall back to the last value
};

// Bounded least-squares fit: 8 deterministic Halton starts refined with
// Levenberg-Marquardt, parameters clamped to their boxes.
ParametricFit fit_parametric(std::span<const double> prefix, CurveFamily family);

struct WpmResult {
  double prediction = 0.0;                 // clipped to [0,1]
  std::array<double, 4> weights{};         // nonnegative, sum to 1
  std::array<double, 4> family_preds{};
};

WpmResult extrapolate_wpm_detail(std::span<const double> prefix, int e_max);
double extrapolate_wpm(std::span<const double> prefix, int e_max);

struct ExtrapolationRecord {
  Encoding encoding;
  std::vector<double> prefix;
  double final_accuracy = 0.0;
};

// Model-based extrapolator: kernel ridge on
// (encoding + prefix + summary statistics of the prefix).
class ModelExtrapolator {
 public:
  static ModelExtrapolator fit(const std::vector<ExtrapolationRecord>& history);

  double predict(const Encoding& encoding, std::span<const double> prefix) const;
  int prefix_length() const { return prefix_length_; }

  static std::vector<double> features(const Encoding& encoding, std::span<const double> prefix);

  FittedRegressor model_;
  int prefix_length_ = 0;
};

constexpr int kMinExtrapolationRecords = 10;

}  // namespace lcsb
