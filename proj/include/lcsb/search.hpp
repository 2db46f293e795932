#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lcsb/benchmark.hpp"
#include "lcsb/lce.hpp"
#include "lcsb/rng.hpp"
#include "lcsb/types.hpp"

namespace lcsb {

struct HistoryEvent {
  double sim_time = 0.0;  // clock after the charge
  Architecture arch;
  int epochs_trained = 0;
  std::vector<double> observed;  // curve prefix up to epochs_trained
};

struct BestPoint {
  double sim_time = 0.0;
  double best_val_acc = 0.0;  // best observed final accuracy so far
  double true_acc = 0.0;      // oracle mean final of the incumbent; NaN if unknown
};

struct RunHistory {
  std::vector<HistoryEvent> events;
  std::vector<BestPoint> best_trajectory;
  double budget_seconds = 0.0;
  double total_charged = 0.0;
  double benchmark_best_final = 0.0;  // NaN when unknown
  double true_best_final = 0.0;       // NaN when unknown
  bool no_completed_architectures = true;

  double best_final_val() const;
};

// Per-trial simulated clock plus the fixed-curve cache that makes re-queries
// of one architecture resume instead of retrain.
class TrialExecutor {
 public:
  TrialExecutor(const Benchmark& bench, double budget_seconds, std::uint64_t trial_seed);

  // Observed prefix after training arch up to `epoch`; nullopt when the
  // required charge would exceed the budget (nothing is charged then).
  std::optional<std::vector<double>> train_to(const Architecture& arch, int epoch);

  double delta_cost(const Architecture& arch, int epoch) const;
  bool can_afford(const Architecture& arch, int epoch) const;

  double sim_time() const { return sim_time_; }
  const Benchmark& benchmark() const { return bench_; }
  RunHistory take_history();

 private:
  struct ArchState {
    LearningCurve curve;
    int trained = 0;
    bool materialized = false;
  };
  ArchState& state_for(const Architecture& arch, std::uint64_t id);

  const Benchmark& bench_;
  double budget_;
  std::uint64_t trial_seed_;
  double sim_time_ = 0.0;
  std::unordered_map<std::uint64_t, ArchState> archs_;
  RunHistory history_;
  double best_val_ = -1.0;
};

// ---------------------------------------------------------------------------
// Candidate-generation policies of the single-fidelity template: each call
// proposes architectures to train to e_max, then observes the results.

class SearchPolicy {
 public:
  virtual ~SearchPolicy() = default;
  virtual std::vector<Architecture> gen_candidates(Rng& rng) = 0;
  virtual void observe(const Architecture& arch, double final_acc) = 0;
};

class RsPolicy final : public SearchPolicy {
 public:
  explicit RsPolicy(const SearchSpaceSpec& space) : space_(space) {}
  std::vector<Architecture> gen_candidates(Rng& rng) override;
  void observe(const Architecture&, double) override {}

 private:
  const SearchSpaceSpec& space_;
};

class LsPolicy final : public SearchPolicy {
 public:
  explicit LsPolicy(const SearchSpaceSpec& space) : space_(space) {}
  std::vector<Architecture> gen_candidates(Rng& rng) override;
  void observe(const Architecture& arch, double final_acc) override;

 private:
  const SearchSpaceSpec& space_;
  std::unordered_set<std::uint64_t> evaluated_;
  std::optional<Architecture> incumbent_;
  double incumbent_acc_ = -1.0;
};

class ReaPolicy final : public SearchPolicy {
 public:
  ReaPolicy(const SearchSpaceSpec& space, int population_size, int sample_size,
            int batch_size = 1)
      : space_(space),
        population_size_(population_size),
        sample_size_(sample_size),
        batch_size_(batch_size) {}
  std::vector<Architecture> gen_candidates(Rng& rng) override;
  void observe(const Architecture& arch, double final_acc) override;

  int population_count() const { return static_cast<int>(population_.size()); }
  std::uint64_t oldest_id(const SearchSpaceSpec& space) const;

 private:
  Architecture tournament_child(Rng& rng) const;

  const SearchSpaceSpec& space_;
  int population_size_;
  int sample_size_;
  int batch_size_;
  std::deque<std::pair<Architecture, double>> population_;
};

struct BananasParams {
  int warmup = 10;
  int k = 20;
  int ensemble = 3;
  int top_parents = 4;
  int mutations_per_parent = 10;  // two per edit distance 1..5
  bool pseudo_labels = false;     // screened-out LCE candidates feed the predictor
};

class BananasPolicy final : public SearchPolicy {
 public:
  BananasPolicy(const SearchSpaceSpec& space, const BananasParams& params,
                std::uint64_t ensemble_seed)
      : space_(space), params_(params), ensemble_seed_(ensemble_seed) {}
  std::vector<Architecture> gen_candidates(Rng& rng) override;
  void observe(const Architecture& arch, double final_acc) override;
  void observe_pseudo(const Architecture& arch, double predicted_final);

  // predictions of the current ensemble on one encoding (diagnostics/tests)
  std::vector<double> ensemble_predictions(const Encoding& enc) const;

 private:
  void refit_ensemble();

  const SearchSpaceSpec& space_;
  BananasParams params_;
  std::uint64_t ensemble_seed_;
  int refit_counter_ = 0;
  std::vector<std::pair<Architecture, double>> evaluated_;
  std::vector<std::pair<Architecture, double>> pseudo_;
  std::unordered_set<std::uint64_t> trained_ids_;
  std::vector<MlpModel> ensemble_;
};

// ---------------------------------------------------------------------------

struct LceOptions {
  std::string kind = "model";  // "wpm" or "model"
  int e_few = 0;               // 0 = 20% of e_max
  double keep_fraction = 0.2;
  int rea_batch = 10;  // candidates per REA iteration under the wrapper
  bool bananas_pseudo_labels = false;
};

struct SearchConfig {
  std::string algorithm;  // rs | ls | rea | bananas | hb | bohb
  double budget_seconds = 0.0;
  std::uint64_t trial_seed = 0;
  std::optional<LceOptions> lce;

  int rea_population = 20;
  int rea_sample = 10;
  BananasParams bananas;
  double hb_eta = 3.0;
  int hb_rmin = 1;
  double bohb_random_fraction = 0.1;
  double bohb_top_fraction = 0.15;
  int bohb_samples = 24;

  void validate() const;
  std::string label() const;  // algorithm plus lce suffix
};

RunHistory run_search(const SearchConfig& config, const Benchmark& bench);

// ---------------------------------------------------------------------------
// Multi-fidelity pieces, exposed for direct testing.

// (n, r) per bracket, s = s_max .. 0
std::vector<std::pair<int, int>> hyperband_brackets(int e_max, double eta, int r_min);

using RungObservations = std::map<int, std::vector<std::pair<Encoding, double>>>;

struct BohbParams {
  double random_fraction = 0.1;
  double top_fraction = 0.15;
  int samples = 24;
};

Architecture bohb_propose(const RungObservations& rungs, const SearchSpaceSpec& space,
                          const BohbParams& params, Rng& rng);

// One successive-halving bracket; returns false when the budget ran out.
bool successive_halving(int n_configs, int min_epochs, double eta, TrialExecutor& exec,
                        Rng& rng, RungObservations* rungs, const BohbParams* bohb);

}  // namespace lcsb
