#include "lcsb/benchmark.hpp"

#include <cmath>

#include "lcsb/errors.hpp"
#include "lcsb/rng.hpp"

namespace lcsb {

OracleBenchmark::OracleBenchmark(std::shared_ptr<const SyntheticOracle> oracle)
    : oracle_(std::move(oracle)) {
  if (!oracle_) throw ConfigError("OracleBenchmark needs an oracle");
}

SurrogateBenchmark::SurrogateBenchmark(std::shared_ptr<const SurrogateModel> model,
                                       std::shared_ptr<const SyntheticOracle> paired_oracle)
    : model_(std::move(model)), oracle_(std::move(paired_oracle)) {
  if (!model_) throw ConfigError("SurrogateBenchmark needs a model");
  if (model_->config.augmentation.feature_count() > 0 && !oracle_)
    throw ConfigError(
        "surrogate uses augmentation; pair it with a synthetic oracle to supply anchors");
  if (oracle_ && oracle_->space().num_architectures() != model_->space.num_architectures())
    throw ConfigError("paired oracle space does not match the surrogate space");

  const std::uint64_t n = model_->space.num_architectures();
  if (n <= (1ULL << 22)) {
    double best = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const Architecture arch = arch_from_index(i, model_->space);
      best = std::max(best, model_->query_mean(arch, aug_values(arch)).back());
    }
    best_final_ = best;
  }
}

std::vector<double> SurrogateBenchmark::aug_values(const Architecture& arch) const {
  const Augmentation& aug = model_->config.augmentation;
  if (aug.feature_count() == 0) return {};
  // anchors are a noisy sample from the oracle, fixed per architecture
  const LearningCurve sample =
      oracle_->sample_curve(arch, stream_seed(arch_index(arch, model_->space), "benchmark.aug"));
  return aug.features_from_curve(sample);
}

double SurrogateBenchmark::epoch_cost(const Architecture& arch) const {
  (void)arch;
  return model_->report.mean_epoch_cost;
}

LearningCurve SurrogateBenchmark::full_curve(const Architecture& arch,
                                             std::uint64_t curve_seed) const {
  return model_->query_noisy_full(arch, curve_seed, aug_values(arch));
}

double SurrogateBenchmark::true_final_mean(const Architecture& arch) const {
  if (!oracle_) return std::numeric_limits<double>::quiet_NaN();
  return oracle_->final_mean(arch);
}

double SurrogateBenchmark::true_best_final() const {
  if (!oracle_) return std::numeric_limits<double>::quiet_NaN();
  return oracle_->best_final_mean();
}

}  // namespace lcsb
