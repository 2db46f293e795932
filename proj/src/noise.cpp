#include "lcsb/noise.hpp"

#include <algorithm>
#include <cmath>

#include "lcsb/errors.hpp"
#include "lcsb/rng.hpp"

namespace lcsb {

std::string noise_kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::stddev: return "std";
    case NoiseKind::gkde: return "gkde";
    case NoiseKind::window: return "window";
  }
  throw ConfigError("unknown noise kind");
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "std") return NoiseKind::stddev;
  if (name == "gkde") return NoiseKind::gkde;
  if (name == "window") return NoiseKind::window;
  throw ConfigError("unknown noise kind: " + name);
}

ResidualSet extract_residuals(const CurveDataset& dataset, const SvdBasis& basis) {
  if (dataset.space.e_max != basis.e_max)
    throw ConfigError("extract_residuals: basis e_max does not match dataset");
  ResidualSet out;
  out.e_max = basis.e_max;
  out.residuals.reserve(dataset.records.size());
  out.encodings.reserve(dataset.records.size());
  for (const auto& rec : dataset.records) {
    const LearningCurve recon = decompress(compress(rec.curve, basis), basis);
    std::vector<double> res(rec.curve.size());
    for (std::size_t i = 0; i < res.size(); ++i) res[i] = rec.curve[i] - recon[i];
    out.residuals.push_back(std::move(res));
    out.encodings.push_back(rec.encoding);
  }
  return out;
}

namespace {

// zero-centered per-epoch sigma, as printed: sqrt(sum eps^2 / (N-1))
std::vector<double> zero_centered_sigma(const ResidualSet& rs) {
  const std::size_t n = rs.residuals.size();
  std::vector<double> sigma(static_cast<std::size_t>(rs.e_max), 0.0);
  for (const auto& row : rs.residuals)
    for (int j = 0; j < rs.e_max; ++j)
      sigma[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)] * row[static_cast<std::size_t>(j)];
  for (double& s : sigma) s = std::sqrt(s / static_cast<double>(n - 1));
  return sigma;
}

double winsorize(double v, double bound) {
  return std::min(bound, std::max(-bound, v));
}

}  // namespace

NoiseModel fit_noise(NoiseKind kind, const ResidualSet& residuals) {
  if (residuals.residuals.size() < 2) throw ConfigError("fit_noise needs >= 2 residual rows");
  if (kind == NoiseKind::window)
    throw ConfigError("window noise needs features; use fit_noise_window");

  NoiseModel model;
  model.kind = kind;
  model.e_max = residuals.e_max;
  model.sigma = zero_centered_sigma(residuals);

  if (kind == NoiseKind::gkde) {
    model.kde_rows = residuals.residuals;
    const double n = static_cast<double>(residuals.residuals.size());
    const double scott = std::pow(n, -1.0 / (residuals.e_max + 4.0));
    model.kde_bandwidth.resize(model.sigma.size());
    for (std::size_t j = 0; j < model.sigma.size(); ++j)
      model.kde_bandwidth[j] = std::max(kBandwidthFloor, model.sigma[j] * scott);
  }
  return model;
}

RegressorConfig default_window_sigma_config() {
  RegressorConfig cfg;
  cfg.backend = RegressorBackend::gbt;
  cfg.gbt.n_trees = 50;
  cfg.gbt.max_depth = 3;
  return cfg;
}

NoiseModel fit_noise_window(const ResidualSet& residuals,
                            const std::vector<std::vector<double>>& features,
                            const RegressorConfig& config) {
  if (residuals.residuals.size() < 2) throw ConfigError("fit_noise needs >= 2 residual rows");
  if (features.size() != residuals.residuals.size())
    throw ConfigError("fit_noise_window: features do not pair with residual rows");

  const int e_max = residuals.e_max;
  const int half_lo = kNoiseWindowSize / 2 - 1;  // 4 before
  const int half_hi = kNoiseWindowSize / 2 + 1;  // 5 after (exclusive bound)

  std::vector<std::vector<double>> targets(residuals.residuals.size());
  for (std::size_t i = 0; i < residuals.residuals.size(); ++i) {
    const auto& row = residuals.residuals[i];
    auto& t = targets[i];
    t.resize(static_cast<std::size_t>(e_max));
    for (int j = 0; j < e_max; ++j) {
      const int lo = std::max(0, j - half_lo);
      const int hi = std::min(e_max, j + half_hi);
      const int m = hi - lo;
      double mean = 0.0;
      for (int kk = lo; kk < hi; ++kk) mean += row[static_cast<std::size_t>(kk)];
      mean /= m;
      double var = 0.0;
      for (int kk = lo; kk < hi; ++kk) {
        const double d = row[static_cast<std::size_t>(kk)] - mean;
        var += d * d;
      }
      t[static_cast<std::size_t>(j)] = m > 1 ? std::sqrt(var / (m - 1)) : 0.0;
    }
  }

  NoiseModel model;
  model.kind = NoiseKind::window;
  model.e_max = e_max;
  model.sigma = zero_centered_sigma(residuals);
  model.window_model = FittedRegressor::fit(config, features, targets);
  return model;
}

std::vector<double> NoiseModel::predicted_sigma(const std::vector<double>& features) const {
  switch (kind) {
    case NoiseKind::stddev:
      return sigma;
    case NoiseKind::gkde: {
      std::vector<double> out(sigma.size());
      for (std::size_t j = 0; j < sigma.size(); ++j)
        out[j] = std::sqrt(sigma[j] * sigma[j] + kde_bandwidth[j] * kde_bandwidth[j]);
      return out;
    }
    case NoiseKind::window: {
      if (!window_model) throw DataError("window noise model is not fitted");
      std::vector<double> out = window_model->predict(features);
      for (double& v : out) v = std::max(0.0, v);
      return out;
    }
  }
  throw ConfigError("unknown noise kind");
}

std::vector<double> NoiseModel::sample(const std::vector<double>& features,
                                       std::uint64_t seed) const {
  Rng rng(stream_seed(seed, "noise.sample"));
  std::vector<double> eps(static_cast<std::size_t>(e_max), 0.0);

  switch (kind) {
    case NoiseKind::stddev: {
      for (int j = 0; j < e_max; ++j) {
        const double s = sigma[static_cast<std::size_t>(j)];
        eps[static_cast<std::size_t>(j)] = winsorize(rng.normal(0.0, s), 3.0 * s);
      }
      break;
    }
    case NoiseKind::gkde: {
      const auto& row = kde_rows[rng.uniform_int(static_cast<int>(kde_rows.size()))];
      for (int j = 0; j < e_max; ++j) {
        const double h = kde_bandwidth[static_cast<std::size_t>(j)];
        const double s = sigma[static_cast<std::size_t>(j)];
        const double bound = 3.0 * std::sqrt(s * s + h * h);
        eps[static_cast<std::size_t>(j)] =
            winsorize(row[static_cast<std::size_t>(j)] + rng.normal(0.0, h), bound);
      }
      break;
    }
    case NoiseKind::window: {
      const std::vector<double> s = predicted_sigma(features);
      for (int j = 0; j < e_max; ++j) {
        const double sj = s[static_cast<std::size_t>(j)];
        eps[static_cast<std::size_t>(j)] = winsorize(rng.normal(0.0, sj), 3.0 * sj);
      }
      break;
    }
  }
  return eps;
}

}  // namespace lcsb
