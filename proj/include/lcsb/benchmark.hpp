#pragma once

#include <cstdint>
#include <limits>
#include <memory>

#include "lcsb/surrogate.hpp"
#include "lcsb/synthspace.hpp"
#include "lcsb/types.hpp"

namespace lcsb {

// One query contract over either the synthetic oracle or a fitted surrogate:
// a fixed noisy curve per (architecture, curve seed) plus per-epoch cost.
class Benchmark {
 public:
  virtual ~Benchmark() = default;

  virtual const SearchSpaceSpec& space() const = 0;
  virtual double epoch_cost(const Architecture& arch) const = 0;
  virtual LearningCurve full_curve(const Architecture& arch, std::uint64_t curve_seed) const = 0;

  // Epochs a query must pay for up front (surrogates with augmentation).
  virtual int aug_epochs() const { return 0; }

  // Best achievable mean final accuracy under this benchmark's own model.
  virtual double best_final() const { return std::numeric_limits<double>::quiet_NaN(); }

  // Ground-truth mean final accuracy of one architecture, when a generating
  // oracle is known; NaN otherwise.
  virtual double true_final_mean(const Architecture& arch) const {
    (void)arch;
    return std::numeric_limits<double>::quiet_NaN();
  }
  virtual double true_best_final() const { return std::numeric_limits<double>::quiet_NaN(); }
};

class OracleBenchmark final : public Benchmark {
 public:
  explicit OracleBenchmark(std::shared_ptr<const SyntheticOracle> oracle);

  const SearchSpaceSpec& space() const override { return oracle_->space(); }
  double epoch_cost(const Architecture& arch) const override { return oracle_->epoch_cost(arch); }
  LearningCurve full_curve(const Architecture& arch, std::uint64_t curve_seed) const override {
    return oracle_->sample_curve(arch, curve_seed);
  }
  double best_final() const override { return oracle_->best_final_mean(); }
  double true_final_mean(const Architecture& arch) const override {
    return oracle_->final_mean(arch);
  }
  double true_best_final() const override { return oracle_->best_final_mean(); }

 private:
  std::shared_ptr<const SyntheticOracle> oracle_;
};

// Searches a fitted surrogate. When the surrogate uses augmentation an
// oracle must be paired to supply the anchor accuracies (and queries charge
// the augmentation epochs). A paired oracle also provides ground truth for
// regret reporting.
class SurrogateBenchmark final : public Benchmark {
 public:
  SurrogateBenchmark(std::shared_ptr<const SurrogateModel> model,
                     std::shared_ptr<const SyntheticOracle> paired_oracle = nullptr);

  const SearchSpaceSpec& space() const override { return model_->space; }
  double epoch_cost(const Architecture& arch) const override;
  LearningCurve full_curve(const Architecture& arch, std::uint64_t curve_seed) const override;
  int aug_epochs() const override { return model_->config.augmentation.required_epochs(); }
  double best_final() const override { return best_final_; }
  double true_final_mean(const Architecture& arch) const override;
  double true_best_final() const override;

  const SurrogateModel& model() const { return *model_; }

 private:
  std::vector<double> aug_values(const Architecture& arch) const;

  std::shared_ptr<const SurrogateModel> model_;
  std::shared_ptr<const SyntheticOracle> oracle_;
  double best_final_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace lcsb
