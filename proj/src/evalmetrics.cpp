#include "lcsb/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <json.hpp>

#include "lcsb/errors.hpp"
#include "lcsb/rng.hpp"
#include "lcsb/textio.hpp"

namespace lcsb {

namespace {

// merge sort counting strict inversions of v (pairs i<j with v[i] > v[j])
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                               std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {  // strict: equal values are not inversions
      count += mid - i;
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return count;
}

std::uint64_t tied_pairs(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::uint64_t total = 0;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const std::uint64_t g = j - i;
    total += g * (g - 1) / 2;
    i = j;
  }
  return total;
}

}  // namespace

double kendall_tau(std::span<const double> pred, std::span<const double> truth) {
  const std::size_t n = pred.size();
  if (n != truth.size()) throw ConfigError("kendall_tau: length mismatch");
  if (n < 2) throw ConfigError("kendall_tau needs at least two values");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pred[a] != pred[b]) return pred[a] < pred[b];
    return truth[a] < truth[b];
  });

  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = truth[order[i]];
  std::vector<double> buf(n);
  const std::uint64_t q = count_inversions(t, buf, 0, n);

  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t tp = tied_pairs({pred.begin(), pred.end()});
  const std::uint64_t tt = tied_pairs({truth.begin(), truth.end()});
  std::uint64_t tb = 0;
  {
    std::vector<std::pair<double, double>> both(n);
    for (std::size_t i = 0; i < n; ++i) both[i] = {pred[i], truth[i]};
    std::sort(both.begin(), both.end());
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j < n && both[j] == both[i]) ++j;
      const std::uint64_t g = j - i;
      tb += g * (g - 1) / 2;
      i = j;
    }
  }

  const std::uint64_t untied = total - tp - tt + tb;  // = P + Q
  if (untied == 0) throw DataError("kendall_tau: every pair is tied");
  const std::uint64_t p = untied - q;
  return (static_cast<double>(p) - static_cast<double>(q)) / static_cast<double>(untied);
}

double r_squared(std::span<const double> pred, std::span<const double> truth) {
  const std::size_t n = pred.size();
  if (n != truth.size()) throw ConfigError("r_squared: length mismatch");
  if (n < 2) throw ConfigError("r_squared needs at least two values");
  const double mean = std::accumulate(truth.begin(), truth.end(), 0.0) / static_cast<double>(n);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (ss_tot == 0.0) throw DataError("r_squared: constant truth values");
  return 1.0 - ss_res / ss_tot;
}

namespace {

void moments(const std::vector<LearningCurve>& curves, std::vector<double>& mean,
             std::vector<double>& var) {
  const std::size_t n = curves.size();
  const std::size_t len = curves.front().size();
  mean.assign(len, 0.0);
  var.assign(len, 0.0);
  for (const auto& c : curves) {
    if (c.size() != len) throw ConfigError("kl_divergence: curve length mismatch");
    for (std::size_t j = 0; j < len; ++j) mean[j] += c[j];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (const auto& c : curves)
    for (std::size_t j = 0; j < len; ++j) var[j] += (c[j] - mean[j]) * (c[j] - mean[j]);
  for (double& v : var) v = std::max(kVarianceFloor, v / static_cast<double>(n - 1));
}

}  // namespace

double kl_divergence(const std::vector<LearningCurve>& true_curves,
                     const std::vector<LearningCurve>& pred_curves) {
  if (true_curves.size() < 2 || pred_curves.size() < 2)
    throw ConfigError("kl_divergence needs >= 2 curves on each side");
  std::vector<double> mt, vt, mp, vp;
  moments(true_curves, mt, vt);
  moments(pred_curves, mp, vp);
  if (mt.size() != mp.size()) throw ConfigError("kl_divergence: curve length mismatch");

  const auto e_max = static_cast<double>(mt.size());
  double log_det = 0.0, mahalanobis = 0.0, trace = 0.0;
  for (std::size_t j = 0; j < mt.size(); ++j) {
    log_det += std::log(vp[j] / vt[j]);
    mahalanobis += (mt[j] - mp[j]) * (mt[j] - mp[j]) / vp[j];
    trace += vt[j] / vp[j];
  }
  return (log_det - e_max + mahalanobis + trace) / (2.0 * e_max);
}

namespace {

double spike_stat(const LearningCurve& c) {
  return *std::max_element(c.begin(), c.end()) - c.back();
}

}  // namespace

double spike_threshold(const std::vector<LearningCurve>& real_curves) {
  if (real_curves.size() < 20) throw ConfigError("spike_threshold needs >= 20 curves");
  std::vector<double> stats;
  stats.reserve(real_curves.size());
  for (const auto& c : real_curves) stats.push_back(spike_stat(c));
  std::sort(stats.begin(), stats.end());

  const double limit = 0.05 * static_cast<double>(stats.size());
  // smallest observed value with strictly fewer than 5% of curves above it
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (i + 1 < stats.size() && stats[i + 1] == stats[i]) continue;
    const auto above = static_cast<double>(stats.size() - (i + 1));
    if (above < limit) return stats[i];
  }
  return stats.back();
}

double spike_rate(const std::vector<LearningCurve>& curves, double x) {
  if (x < 0.0) throw ConfigError("spike_rate needs x >= 0");
  if (curves.empty()) return 0.0;
  std::size_t count = 0;
  for (const auto& c : curves)
    if (spike_stat(c) > x) ++count;
  return static_cast<double>(count) / static_cast<double>(curves.size());
}

namespace {

struct ArchGroup {
  Architecture arch;
  std::vector<LearningCurve> curves;
};

std::vector<ArchGroup> group_by_arch(const CurveDataset& ds) {
  std::vector<ArchGroup> groups;
  std::map<std::uint64_t, std::size_t> index;
  for (const auto& rec : ds.records) {
    const std::uint64_t id = arch_index(rec.arch, ds.space);
    auto it = index.find(id);
    if (it == index.end()) {
      index.emplace(id, groups.size());
      groups.push_back({rec.arch, {rec.curve}});
    } else {
      groups[it->second].curves.push_back(rec.curve);
    }
  }
  return groups;
}

struct EpochMetrics {
  double avg_r2, final_r2, avg_kt, final_kt;
};

// per-epoch R2/KT between two curve families indexed by architecture
EpochMetrics per_epoch_metrics(const std::vector<LearningCurve>& pred,
                               const std::vector<LearningCurve>& truth) {
  const std::size_t e_max = pred.front().size();
  const std::size_t n = pred.size();
  std::vector<double> p(n), t(n);
  double sum_r2 = 0.0, sum_kt = 0.0;
  EpochMetrics out{};
  for (std::size_t j = 0; j < e_max; ++j) {
    for (std::size_t a = 0; a < n; ++a) {
      p[a] = pred[a][j];
      t[a] = truth[a][j];
    }
    const double r2 = r_squared(p, t);
    const double kt = kendall_tau(p, t);
    sum_r2 += r2;
    sum_kt += kt;
    if (j + 1 == e_max) {
      out.final_r2 = r2;
      out.final_kt = kt;
    }
  }
  out.avg_r2 = sum_r2 / static_cast<double>(e_max);
  out.avg_kt = sum_kt / static_cast<double>(e_max);
  return out;
}

}  // namespace

EvalReport evaluate_surrogate(const SurrogateModel& model, const CurveDataset& test,
                              const AugSource& aug_source, const EvalOptions& options) {
  test.validate();
  const auto groups = group_by_arch(test);
  if (groups.empty()) throw ConfigError("evaluate_surrogate: empty test set");

  std::size_t min_seeds = groups.front().curves.size();
  for (const auto& g : groups) min_seeds = std::min(min_seeds, g.curves.size());

  const bool needs_aug = model.config.augmentation.feature_count() > 0;
  if (needs_aug && !aug_source)
    throw ConfigError("surrogate uses augmentation; an augmentation source is required");

  std::vector<LearningCurve> pred_means, truth_means;
  std::vector<std::vector<double>> augs;
  pred_means.reserve(groups.size());
  for (const auto& g : groups) {
    std::vector<double> aug;
    if (needs_aug) aug = aug_source(g.arch);
    pred_means.push_back(model.query_mean(g.arch, aug));
    truth_means.push_back(mean_curve(g.curves));
    augs.push_back(std::move(aug));
  }

  const EpochMetrics em = per_epoch_metrics(pred_means, truth_means);

  EvalReport report;
  report.avg_r2 = em.avg_r2;
  report.final_r2 = em.final_r2;
  report.avg_kt = em.avg_kt;
  report.final_kt = em.final_kt;
  report.n_test = static_cast<int>(groups.size());
  report.seeds_per_arch = static_cast<int>(min_seeds);

  // noisy surrogate curves (used for KL and the spike rate)
  std::vector<std::vector<LearningCurve>> surrogate_sets(groups.size());
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (int s = 0; s < options.surrogate_seeds; ++s)
      surrogate_sets[a].push_back(model.query_noisy_full(
          groups[a].arch, mix_seed(options.seed, static_cast<std::uint64_t>(s)), augs[a]));
  }

  if (min_seeds >= 2) {
    double sum_kl = 0.0, sum_final_kl = 0.0;
    for (std::size_t a = 0; a < groups.size(); ++a) {
      sum_kl += kl_divergence(groups[a].curves, surrogate_sets[a]);
      std::vector<LearningCurve> t_last, p_last;
      for (const auto& c : groups[a].curves) t_last.push_back({c.back()});
      for (const auto& c : surrogate_sets[a]) p_last.push_back({c.back()});
      sum_final_kl += kl_divergence(t_last, p_last);
    }
    report.avg_kl = sum_kl / static_cast<double>(groups.size());
    report.final_kl = sum_final_kl / static_cast<double>(groups.size());
  }

  std::vector<LearningCurve> real_curves, surrogate_curves;
  for (const auto& g : groups)
    real_curves.insert(real_curves.end(), g.curves.begin(), g.curves.end());
  for (const auto& set : surrogate_sets)
    surrogate_curves.insert(surrogate_curves.end(), set.begin(), set.end());
  report.spike_threshold_x = spike_threshold(real_curves);
  report.spike_rate_real = spike_rate(real_curves, report.spike_threshold_x);
  report.spike_rate_surrogate = spike_rate(surrogate_curves, report.spike_threshold_x);
  return report;
}

std::vector<KSeedRow> kseed_baselines(const CurveDataset& test, int max_m) {
  const auto groups = group_by_arch(test);
  std::size_t min_seeds = groups.empty() ? 0 : groups.front().curves.size();
  for (const auto& g : groups) min_seeds = std::min(min_seeds, g.curves.size());
  if (min_seeds < 2) return {};

  std::vector<KSeedRow> rows;
  const int cap = std::min<int>(max_m, static_cast<int>(min_seeds) - 1);
  for (int m = 1; m <= cap; ++m) {
    std::vector<LearningCurve> pred, truth;
    for (const auto& g : groups) {
      pred.push_back(
          mean_curve({g.curves.begin(), g.curves.begin() + m}));
      truth.push_back(
          mean_curve({g.curves.begin() + m, g.curves.end()}));
    }
    const EpochMetrics em = per_epoch_metrics(pred, truth);
    rows.push_back({m, em.avg_r2, em.final_r2, em.avg_kt, em.final_kt});
  }
  return rows;
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("-");
}

}  // namespace

std::string eval_report_csv(const EvalReport& r, const std::vector<KSeedRow>& baselines) {
  std::string out =
      "benchmark,Avg. R\xC2\xB2,Final R\xC2\xB2,Avg. KT,Final KT,Avg. KL,Final KL\n";
  out += "surrogate," + format_double(r.avg_r2) + ',' + format_double(r.final_r2) + ',' +
         format_double(r.avg_kt) + ',' + format_double(r.final_kt) + ',' + fmt_opt(r.avg_kl) +
         ',' + fmt_opt(r.final_kl) + '\n';
  for (const auto& b : baselines) {
    out += "ground_truth_mean_of_" + std::to_string(b.m) + ',' + format_double(b.avg_r2) + ',' +
           format_double(b.final_r2) + ',' + format_double(b.avg_kt) + ',' +
           format_double(b.final_kt) + ",-,-\n";
  }
  out += '\n';
  out += "spike_threshold," + format_double(r.spike_threshold_x) + '\n';
  out += "spike_rate_real," + format_double(r.spike_rate_real) + '\n';
  out += "spike_rate_surrogate," + format_double(r.spike_rate_surrogate) + '\n';
  out += "n_test," + std::to_string(r.n_test) + '\n';
  out += "seeds_per_arch," + std::to_string(r.seeds_per_arch) + '\n';
  return out;
}

std::string eval_report_json(const EvalReport& r, const std::vector<KSeedRow>& baselines) {
  nlohmann::json j;
  j["surrogate"] = {
      {"avg_r2", r.avg_r2},   {"final_r2", r.final_r2}, {"avg_kt", r.avg_kt},
      {"final_kt", r.final_kt},
  };
  if (r.avg_kl) j["surrogate"]["avg_kl"] = *r.avg_kl;
  if (r.final_kl) j["surrogate"]["final_kl"] = *r.final_kl;
  j["spike"] = {{"threshold", r.spike_threshold_x},
                {"rate_real", r.spike_rate_real},
                {"rate_surrogate", r.spike_rate_surrogate}};
  j["n_test"] = r.n_test;
  j["seeds_per_arch"] = r.seeds_per_arch;
  j["ground_truth_baselines"] = nlohmann::json::array();
  for (const auto& b : baselines)
    j["ground_truth_baselines"].push_back({{"seeds", b.m},
                                           {"avg_r2", b.avg_r2},
                                           {"final_r2", b.final_r2},
                                           {"avg_kt", b.avg_kt},
                                           {"final_kt", b.final_kt}});
  return j.dump(2) + "\n";
}

}  // namespace lcsb
