#include "lcsb/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lcsb/errors.hpp"
#include "lcsb/rng.hpp"

namespace lcsb {

int Augmentation::feature_count() const {
  switch (kind) {
    case Kind::none: return 0;
    case Kind::anchor_epochs: return static_cast<int>(anchors.size());
    case Kind::first_n_epochs: return first_n;
  }
  throw ConfigError("unknown augmentation kind");
}

int Augmentation::required_epochs() const {
  switch (kind) {
    case Kind::none: return 0;
    case Kind::anchor_epochs:
      return anchors.empty() ? 0 : *std::max_element(anchors.begin(), anchors.end());
    case Kind::first_n_epochs: return first_n;
  }
  throw ConfigError("unknown augmentation kind");
}

std::vector<double> Augmentation::features_from_curve(const LearningCurve& curve) const {
  std::vector<double> out;
  switch (kind) {
    case Kind::none: break;
    case Kind::anchor_epochs:
      for (int e : anchors) out.push_back(curve.at(static_cast<std::size_t>(e - 1)));
      break;
    case Kind::first_n_epochs:
      out.assign(curve.begin(), curve.begin() + first_n);
      break;
  }
  return out;
}

void Augmentation::validate(int e_max) const {
  if (kind == Kind::anchor_epochs) {
    if (anchors.empty()) throw ConfigError("anchor_epochs augmentation needs epochs");
    for (int e : anchors)
      if (e < 1 || e > e_max) throw ConfigError("anchor epoch out of [1, e_max]");
  }
  if (kind == Kind::first_n_epochs && (first_n < 1 || first_n > e_max))
    throw ConfigError("first_n_epochs must be in [1, e_max]");
}

void SurrogateConfig::validate(int e_max) const {
  if (k < 0) throw ConfigError("k must be positive or 0 (auto)");
  if (k > e_max) throw ConfigError("k exceeds e_max");
  if (k_max < 1) throw ConfigError("k_max must be positive");
  if (version.empty()) throw ConfigError("version string must be non-empty");
  mu.validate();
  window_sigma.validate();
  augmentation.validate(e_max);
}

namespace {

LearningCurve clip_curve(LearningCurve c) {
  for (double& v : c) v = std::min(1.0, std::max(0.0, v));
  return c;
}

}  // namespace

std::vector<double> SurrogateModel::mu_features(const Architecture& arch,
                                                std::span<const double> aug_values) const {
  const int want = config.augmentation.feature_count();
  if (static_cast<int>(aug_values.size()) != want)
    throw ConfigError("query needs " + std::to_string(want) + " augmentation values, got " +
                      std::to_string(aug_values.size()));
  for (double v : aug_values)
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("augmentation values must be in [0,1]");
  std::vector<double> features = encode(arch, space).bits;
  features.insert(features.end(), aug_values.begin(), aug_values.end());
  return features;
}

LearningCurve SurrogateModel::query_mean(const Architecture& arch,
                                         std::span<const double> aug_values) const {
  const std::vector<double> features = mu_features(arch, aug_values);
  return decompress(mu.predict(features), basis);  // decompress clips
}

LearningCurve SurrogateModel::query_noisy_full(const Architecture& arch, std::uint64_t seed,
                                               std::span<const double> aug_values) const {
  const std::vector<double> features = mu_features(arch, aug_values);
  const std::vector<double> coeffs = mu.predict(features);
  LearningCurve curve = decompress(coeffs, basis);

  std::vector<double> sigma_features = features;
  sigma_features.insert(sigma_features.end(), coeffs.begin(), coeffs.end());
  const std::uint64_t noise_seed =
      mix_seed(mix_seed(config.rng_seed, arch_index(arch, space)), seed);
  const std::vector<double> eps = noise.sample(sigma_features, noise_seed);
  for (std::size_t j = 0; j < curve.size(); ++j) curve[j] += eps[j];
  return clip_curve(std::move(curve));
}

std::vector<double> SurrogateModel::query_noisy(const Architecture& arch, std::uint64_t seed,
                                                int up_to_epoch,
                                                std::span<const double> aug_values) const {
  if (up_to_epoch < 1 || up_to_epoch > space.e_max)
    throw ConfigError("up_to_epoch out of [1, e_max]");
  const LearningCurve full = query_noisy_full(arch, seed, aug_values);
  return curve_prefix(full, up_to_epoch);
}

SurrogateModel fit_surrogate(const CurveDataset& train, const SurrogateConfig& config) {
  train.validate();
  if (train.records.empty()) throw ConfigError("fit_surrogate needs training records");
  config.validate(train.space.e_max);
  if (config.augmentation.required_epochs() > train.space.e_max)
    throw ConfigError("augmentation requires epochs beyond e_max");

  std::vector<LearningCurve> curves;
  curves.reserve(train.records.size());
  for (const auto& rec : train.records) curves.push_back(rec.curve);

  // rank: explicit, or select_rank on the multi-seed subset
  int k = config.k;
  if (k == 0) {
    std::map<std::uint64_t, std::vector<LearningCurve>> by_arch;
    for (const auto& rec : train.records)
      by_arch[arch_index(rec.arch, train.space)].push_back(rec.curve);
    std::vector<std::vector<LearningCurve>> val_groups;
    for (auto& [id, group] : by_arch)
      if (group.size() >= 2) val_groups.push_back(std::move(group));
    if (val_groups.empty()) {
      if (!config.allow_rank_fallback)
        throw ConfigError(
            "k=auto needs architectures with repeated seeds in the training set");
      k = kFallbackRank;
    } else {
      k = select_rank(curves, val_groups, config.k_max);
    }
  }
  k = std::min<int>(k, std::min<int>(static_cast<int>(curves.size()), train.space.e_max));

  SurrogateModel model;
  model.space = train.space;
  model.config = config;
  model.basis = truncated_svd(curves, k);

  // mu-model on (encoding + augmentation features) -> compressed curves
  std::vector<std::vector<double>> features;
  std::vector<std::vector<double>> labels;
  features.reserve(train.records.size());
  labels.reserve(train.records.size());
  for (const auto& rec : train.records) {
    std::vector<double> f = rec.encoding.bits;
    const auto aug = config.augmentation.features_from_curve(rec.curve);
    f.insert(f.end(), aug.begin(), aug.end());
    features.push_back(std::move(f));
    labels.push_back(compress(rec.curve, model.basis));
  }
  RegressorConfig mu_cfg = config.mu;
  mu_cfg.rng_seed = mix_seed(config.rng_seed, stream_seed(0, "surrogate.mu"));
  model.mu = FittedRegressor::fit(mu_cfg, features, labels);

  const ResidualSet residuals = extract_residuals(train, model.basis);
  if (config.noise_kind == NoiseKind::window) {
    std::vector<std::vector<double>> sigma_features;
    sigma_features.reserve(features.size());
    for (const auto& f : features) {
      std::vector<double> sf = f;
      const std::vector<double> coeffs = model.mu.predict(f);
      sf.insert(sf.end(), coeffs.begin(), coeffs.end());
      sigma_features.push_back(std::move(sf));
    }
    RegressorConfig w_cfg = config.window_sigma;
    w_cfg.rng_seed = mix_seed(config.rng_seed, stream_seed(0, "surrogate.sigma"));
    model.noise = fit_noise_window(residuals, sigma_features, w_cfg);
  } else {
    model.noise = fit_noise(config.noise_kind, residuals);
  }

  // fit report
  model.report.selected_k = k;
  model.report.train_records = static_cast<int>(train.records.size());
  std::vector<std::uint64_t> ids;
  double cost_sum = 0.0;
  int cost_n = 0;
  for (const auto& rec : train.records) {
    ids.push_back(arch_index(rec.arch, train.space));
    if (rec.has_cost()) {
      cost_sum += rec.epoch_cost_seconds;
      ++cost_n;
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  model.report.train_archs = static_cast<int>(ids.size());
  model.report.train_arch_ids = std::move(ids);
  model.report.mean_epoch_cost = cost_n > 0 ? cost_sum / cost_n : 1.0;
  return model;
}

}  // namespace lcsb
