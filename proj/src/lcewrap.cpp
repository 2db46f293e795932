#include <algorithm>
#include <cmath>
#include <memory>

#include "lcsb/errors.hpp"
#include "lcsb/search.hpp"

namespace lcsb {

namespace {

std::unique_ptr<SearchPolicy> make_base_policy(const SearchConfig& cfg,
                                               const SearchSpaceSpec& space) {
  if (cfg.algorithm == "ls") return std::make_unique<LsPolicy>(space);
  if (cfg.algorithm == "rea")
    return std::make_unique<ReaPolicy>(space, cfg.rea_population, cfg.rea_sample,
                                       cfg.lce->rea_batch);
  if (cfg.algorithm == "bananas") {
    BananasParams p = cfg.bananas;
    p.pseudo_labels = cfg.lce->bananas_pseudo_labels;
    return std::make_unique<BananasPolicy>(space, p, stream_seed(cfg.trial_seed, "ensemble"));
  }
  throw ConfigError("lce wrapper supports ls, rea, and bananas only");
}

}  // namespace

RunHistory run_lce_wrapped(const SearchConfig& cfg, const Benchmark& bench) {
  const SearchSpaceSpec& space = bench.space();
  const LceOptions& opts = *cfg.lce;
  const int e_max = space.e_max;
  int e_few = opts.e_few > 0 ? opts.e_few
                             : std::max(1, static_cast<int>(std::llround(0.2 * e_max)));
  if (e_few >= e_max) throw ConfigError("lce e_few must be below e_max");

  TrialExecutor exec(bench, cfg.budget_seconds, cfg.trial_seed);
  Rng cand_rng(stream_seed(cfg.trial_seed, "cand"));
  auto policy = make_base_policy(cfg, space);
  auto* bananas = dynamic_cast<BananasPolicy*>(policy.get());

  // completed (encoding, prefix at e_few, final) triples for the model
  // extrapolator, refit every iteration once 10 exist
  std::vector<ExtrapolationRecord> completed;

  while (true) {
    const std::vector<Architecture> cands = policy->gen_candidates(cand_rng);

    struct Screened {
      Architecture arch;
      std::vector<double> prefix;
      double predicted = 0.0;
    };
    std::vector<Screened> screened;
    screened.reserve(cands.size());
    for (const auto& arch : cands) {
      auto prefix = exec.train_to(arch, e_few);
      if (!prefix) return exec.take_history();
      screened.push_back({arch, std::move(*prefix), 0.0});
    }

    const bool use_model = opts.kind == "model" &&
                           static_cast<int>(completed.size()) >= kMinExtrapolationRecords;
    std::optional<ModelExtrapolator> extrapolator;
    if (use_model) extrapolator = ModelExtrapolator::fit(completed);
    for (auto& s : screened) {
      s.predicted = use_model
                        ? extrapolator->predict(encode(s.arch, space), s.prefix)
                        : extrapolate_wpm(s.prefix, e_max);
    }

    // promote the best-predicted fraction of the candidate list; winners are
    // resumed in candidate order so keep_fraction=1 replays the base exactly
    std::vector<std::size_t> order(screened.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return screened[a].predicted > screened[b].predicted;
    });
    const auto top_n = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(opts.keep_fraction * static_cast<double>(screened.size()))));
    std::vector<bool> promoted(screened.size(), false);
    for (std::size_t i = 0; i < top_n && i < order.size(); ++i) promoted[order[i]] = true;

    for (std::size_t i = 0; i < screened.size(); ++i) {
      const Screened& s = screened[i];
      if (promoted[i]) {
        const auto full = exec.train_to(s.arch, e_max);
        if (!full) return exec.take_history();
        policy->observe(s.arch, full->back());
        completed.push_back({encode(s.arch, space), s.prefix, full->back()});
      } else if (bananas && opts.bananas_pseudo_labels) {
        bananas->observe_pseudo(s.arch, s.predicted);
      }
    }
  }
}

}  // namespace lcsb
