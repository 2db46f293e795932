#include "lcsb/search.hpp"

#include <algorithm>
#include <cmath>

#include "lcsb/errors.hpp"
#include "lcsb/synthspace.hpp"

namespace lcsb {

double RunHistory::best_final_val() const {
  return best_trajectory.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : best_trajectory.back().best_val_acc;
}

TrialExecutor::TrialExecutor(const Benchmark& bench, double budget_seconds,
                             std::uint64_t trial_seed)
    : bench_(bench), budget_(budget_seconds), trial_seed_(trial_seed) {
  if (budget_ <= 0.0) throw ConfigError("budget must be positive");
  history_.budget_seconds = budget_;
  history_.benchmark_best_final = bench.best_final();
  history_.true_best_final = bench.true_best_final();
}

TrialExecutor::ArchState& TrialExecutor::state_for(const Architecture& arch, std::uint64_t id) {
  ArchState& st = archs_[id];
  if (!st.materialized) {
    // fixed per (trial, arch): resuming at a higher epoch extends the same curve
    st.curve = bench_.full_curve(arch, mix_seed(trial_seed_, id));
    st.materialized = true;
  }
  return st;
}

double TrialExecutor::delta_cost(const Architecture& arch, int epoch) const {
  const std::uint64_t id = arch_index(arch, bench_.space());
  const auto it = archs_.find(id);
  const int trained = it == archs_.end() ? 0 : it->second.trained;
  int target = epoch;
  if (trained == 0 && bench_.aug_epochs() > 0) target = std::max(target, bench_.aug_epochs());
  const int delta = std::max(0, target - trained);
  return delta * bench_.epoch_cost(arch);
}

bool TrialExecutor::can_afford(const Architecture& arch, int epoch) const {
  return sim_time_ + delta_cost(arch, epoch) <= budget_;
}

std::optional<std::vector<double>> TrialExecutor::train_to(const Architecture& arch, int epoch) {
  if (epoch < 1 || epoch > bench_.space().e_max)
    throw ConfigError("train_to: epoch out of [1, e_max]");
  const std::uint64_t id = arch_index(arch, bench_.space());
  const double cost = delta_cost(arch, epoch);
  if (sim_time_ + cost > budget_) return std::nullopt;

  ArchState& st = state_for(arch, id);
  if (epoch > st.trained) {
    sim_time_ += cost;
    history_.total_charged += cost;
    int target = epoch;
    if (st.trained == 0 && bench_.aug_epochs() > 0)
      target = std::max(target, bench_.aug_epochs());
    st.trained = target;

    HistoryEvent ev;
    ev.sim_time = sim_time_;
    ev.arch = arch;
    ev.epochs_trained = epoch;
    ev.observed = curve_prefix(st.curve, epoch);
    history_.events.push_back(std::move(ev));

    if (epoch == bench_.space().e_max) {
      history_.no_completed_architectures = false;
      const double final_acc = st.curve.back();
      if (final_acc > best_val_) {
        best_val_ = final_acc;
        history_.best_trajectory.push_back(
            {sim_time_, final_acc, bench_.true_final_mean(arch)});
      }
    }
  }
  return curve_prefix(st.curve, epoch);
}

RunHistory TrialExecutor::take_history() { return std::move(history_); }

// ---------------------------------------------------------------------------

std::vector<Architecture> RsPolicy::gen_candidates(Rng& rng) {
  return {random_architecture(space_, rng)};
}

std::vector<Architecture> LsPolicy::gen_candidates(Rng& rng) {
  if (!incumbent_) return {random_architecture(space_, rng)};

  std::vector<Architecture> out;
  for (const auto& n : neighbors(space_, *incumbent_))
    if (!evaluated_.contains(arch_index(n, space_))) out.push_back(n);
  if (!out.empty()) return out;

  // local optimum: restart from a fresh (not yet evaluated) architecture
  for (int attempt = 0; attempt < 256; ++attempt) {
    Architecture a = random_architecture(space_, rng);
    if (!evaluated_.contains(arch_index(a, space_))) return {a};
  }
  return {random_architecture(space_, rng)};
}

void LsPolicy::observe(const Architecture& arch, double final_acc) {
  evaluated_.insert(arch_index(arch, space_));
  if (!incumbent_ || final_acc > incumbent_acc_) {
    incumbent_ = arch;
    incumbent_acc_ = final_acc;
  }
}

Architecture ReaPolicy::tournament_child(Rng& rng) const {
  // sample_size members without replacement; mutate the best (ties: oldest)
  std::vector<int> idx(population_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  const int s = std::min<int>(sample_size_, static_cast<int>(idx.size()));
  for (int i = 0; i < s; ++i) {
    const int j = i + rng.uniform_int(static_cast<int>(idx.size()) - i);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  int best = idx[0];
  for (int i = 1; i < s; ++i) {
    const int cand = idx[static_cast<std::size_t>(i)];
    if (population_[static_cast<std::size_t>(cand)].second >
        population_[static_cast<std::size_t>(best)].second)
      best = cand;
    else if (population_[static_cast<std::size_t>(cand)].second ==
                 population_[static_cast<std::size_t>(best)].second &&
             cand < best)
      best = cand;
  }
  return mutate(space_, population_[static_cast<std::size_t>(best)].first, rng);
}

std::vector<Architecture> ReaPolicy::gen_candidates(Rng& rng) {
  if (static_cast<int>(population_.size()) < population_size_)
    return {random_architecture(space_, rng)};
  std::vector<Architecture> out;
  out.reserve(static_cast<std::size_t>(batch_size_));
  for (int b = 0; b < batch_size_; ++b) out.push_back(tournament_child(rng));
  return out;
}

void ReaPolicy::observe(const Architecture& arch, double final_acc) {
  population_.emplace_back(arch, final_acc);
  if (static_cast<int>(population_.size()) > population_size_) population_.pop_front();
}

std::uint64_t ReaPolicy::oldest_id(const SearchSpaceSpec& space) const {
  if (population_.empty()) throw DataError("rea population is empty");
  return arch_index(population_.front().first, space);
}

void BananasPolicy::refit_ensemble() {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (const auto& [arch, acc] : evaluated_) {
    x.push_back(encode(arch, space_).bits);
    y.push_back(acc);
  }
  if (params_.pseudo_labels)
    for (const auto& [arch, acc] : pseudo_) {
      x.push_back(encode(arch, space_).bits);
      y.push_back(acc);
    }
  ensemble_.clear();
  MlpParams mlp;  // module defaults: 64 hidden units, lr 0.001, 200 epochs
  for (int m = 0; m < params_.ensemble; ++m)
    ensemble_.push_back(MlpModel::fit(
        mlp, x, y, mix_seed(ensemble_seed_, mix_seed(refit_counter_, m))));
  ++refit_counter_;
}

std::vector<double> BananasPolicy::ensemble_predictions(const Encoding& enc) const {
  std::vector<double> out;
  for (const auto& m : ensemble_) out.push_back(m.predict(enc.bits));
  return out;
}

std::vector<Architecture> BananasPolicy::gen_candidates(Rng& rng) {
  if (static_cast<int>(evaluated_.size()) < params_.warmup)
    return {random_architecture(space_, rng)};

  refit_ensemble();

  // parents: top archs by observed accuracy (ties: earlier evaluation)
  std::vector<std::size_t> order(evaluated_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return evaluated_[a].second > evaluated_[b].second;
  });
  const int parents = std::min<int>(params_.top_parents, static_cast<int>(order.size()));

  // pool: per parent, two mutants per edit distance 1..5
  std::vector<Architecture> pool;
  std::unordered_set<std::uint64_t> seen;
  for (int p = 0; p < parents; ++p) {
    const Architecture& parent = evaluated_[order[static_cast<std::size_t>(p)]].first;
    const int per_distance = std::max(1, params_.mutations_per_parent / 5);
    for (int dist = 1; dist <= 5; ++dist)
      for (int rep = 0; rep < per_distance; ++rep) {
        Architecture m = parent;
        for (int step = 0; step < dist; ++step) m = mutate(space_, m, rng);
        const std::uint64_t id = arch_index(m, space_);
        if (trained_ids_.contains(id) || !seen.insert(id).second) continue;
        pool.push_back(std::move(m));
      }
  }
  if (pool.empty()) return {random_architecture(space_, rng)};

  // independent Thompson sampling over the ensemble
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const int member = rng.uniform_int(static_cast<int>(ensemble_.size()));
    const double pred = ensemble_[static_cast<std::size_t>(member)].predict(
        encode(pool[i], space_).bits);
    scored.emplace_back(pred, i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<Architecture> out;
  const int k = std::min<int>(params_.k, static_cast<int>(scored.size()));
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(pool[scored[static_cast<std::size_t>(i)].second]);
  return out;
}

void BananasPolicy::observe(const Architecture& arch, double final_acc) {
  evaluated_.emplace_back(arch, final_acc);
  trained_ids_.insert(arch_index(arch, space_));
}

void BananasPolicy::observe_pseudo(const Architecture& arch, double predicted_final) {
  pseudo_.emplace_back(arch, predicted_final);
}

// ---------------------------------------------------------------------------

void SearchConfig::validate() const {
  static const std::vector<std::string> known = {"rs", "ls", "rea", "bananas", "hb", "bohb"};
  if (std::find(known.begin(), known.end(), algorithm) == known.end())
    throw ConfigError("unknown algorithm: " + algorithm);
  if (budget_seconds <= 0.0) throw ConfigError("budget_seconds must be positive");
  if (lce) {
    if (algorithm != "ls" && algorithm != "rea" && algorithm != "bananas")
      throw ConfigError("lce wrapper supports ls, rea, and bananas only");
    if (lce->kind != "wpm" && lce->kind != "model")
      throw ConfigError("lce kind must be 'wpm' or 'model'");
    if (lce->keep_fraction <= 0.0 || lce->keep_fraction > 1.0)
      throw ConfigError("lce keep_fraction must be in (0, 1]");
    if (lce->rea_batch < 1) throw ConfigError("lce rea_batch must be >= 1");
  }
  if (rea_population < 1 || rea_sample < 1) throw ConfigError("rea parameters must be positive");
  if (hb_eta < 2.0) throw ConfigError("hb eta must be >= 2");
  if (hb_rmin < 1) throw ConfigError("hb r_min must be >= 1");
}

std::string SearchConfig::label() const {
  if (!lce) return algorithm;
  return algorithm + "-lce-" + lce->kind;
}

namespace {

std::unique_ptr<SearchPolicy> make_policy(const SearchConfig& cfg, const SearchSpaceSpec& space,
                                          std::uint64_t trial_seed, int lce_batch) {
  if (cfg.algorithm == "rs") return std::make_unique<RsPolicy>(space);
  if (cfg.algorithm == "ls") return std::make_unique<LsPolicy>(space);
  if (cfg.algorithm == "rea")
    return std::make_unique<ReaPolicy>(space, cfg.rea_population, cfg.rea_sample, lce_batch);
  if (cfg.algorithm == "bananas") {
    BananasParams p = cfg.bananas;
    if (cfg.lce) p.pseudo_labels = cfg.lce->bananas_pseudo_labels;
    return std::make_unique<BananasPolicy>(space, p, stream_seed(trial_seed, "ensemble"));
  }
  throw ConfigError("no single-fidelity policy for " + cfg.algorithm);
}

RunHistory run_single_fidelity(const SearchConfig& cfg, const Benchmark& bench) {
  TrialExecutor exec(bench, cfg.budget_seconds, cfg.trial_seed);
  Rng cand_rng(stream_seed(cfg.trial_seed, "cand"));
  auto policy = make_policy(cfg, bench.space(), cfg.trial_seed, 1);
  const int e_max = bench.space().e_max;

  while (true) {
    const std::vector<Architecture> cands = policy->gen_candidates(cand_rng);
    for (const auto& arch : cands) {
      const auto prefix = exec.train_to(arch, e_max);
      if (!prefix) return exec.take_history();
      policy->observe(arch, prefix->back());
    }
  }
}

RunHistory run_bandit(const SearchConfig& cfg, const Benchmark& bench) {
  TrialExecutor exec(bench, cfg.budget_seconds, cfg.trial_seed);
  Rng rng(stream_seed(cfg.trial_seed, "cand"));
  const bool is_bohb = cfg.algorithm == "bohb";
  RungObservations rungs;
  BohbParams bohb{cfg.bohb_random_fraction, cfg.bohb_top_fraction, cfg.bohb_samples};

  const auto brackets = hyperband_brackets(bench.space().e_max, cfg.hb_eta, cfg.hb_rmin);
  while (true) {
    for (const auto& [n, r] : brackets) {
      if (!successive_halving(n, r, cfg.hb_eta, exec, rng, is_bohb ? &rungs : nullptr,
                              is_bohb ? &bohb : nullptr))
        return exec.take_history();
    }
  }
}

}  // namespace

RunHistory run_lce_wrapped(const SearchConfig& cfg, const Benchmark& bench);  // lcewrap.cpp

RunHistory run_search(const SearchConfig& cfg, const Benchmark& bench) {
  cfg.validate();
  if (cfg.lce) return run_lce_wrapped(cfg, bench);
  if (cfg.algorithm == "hb" || cfg.algorithm == "bohb") return run_bandit(cfg, bench);
  return run_single_fidelity(cfg, bench);
}

}  // namespace lcsb
