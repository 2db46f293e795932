#include <algorithm>
#include <cmath>

#include "lcsb/errors.hpp"
#include "lcsb/search.hpp"
#include "lcsb/synthspace.hpp"

namespace lcsb {

std::vector<std::pair<int, int>> hyperband_brackets(int e_max, double eta, int r_min) {
  if (eta < 2.0) throw ConfigError("eta must be >= 2");
  if (r_min < 1 || r_min > e_max) throw ConfigError("r_min out of range");
  const int s_max = static_cast<int>(
      std::floor(std::log(static_cast<double>(e_max) / r_min) / std::log(eta) + 1e-12));
  std::vector<std::pair<int, int>> out;
  for (int s = s_max; s >= 0; --s) {
    const double pow_eta = std::pow(eta, s);
    const int n = static_cast<int>(
        std::ceil(static_cast<double>(s_max + 1) / (s + 1) * pow_eta - 1e-12));
    const int r = std::max(r_min, static_cast<int>(std::floor(e_max / pow_eta + 1e-12)));
    out.emplace_back(n, r);
  }
  return out;
}

namespace {

double log_kde_density(const std::vector<std::vector<double>>& centers,
                       const std::vector<double>& bandwidth, const std::vector<double>& x) {
  constexpr double kLogInvSqrt2Pi = -0.9189385332046727;
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(centers.size());
  for (const auto& c : centers) {
    double lp = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double z = (x[d] - c[d]) / bandwidth[d];
      lp += kLogInvSqrt2Pi - std::log(bandwidth[d]) - 0.5 * z * z;
    }
    terms.push_back(lp);
    max_term = std::max(max_term, lp);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  return max_term + std::log(sum / static_cast<double>(centers.size()));
}

std::vector<double> kde_bandwidths(const std::vector<std::vector<double>>& rows) {
  const std::size_t d = rows.front().size();
  const double m = static_cast<double>(rows.size());
  const double scott = std::pow(m, -1.0 / (static_cast<double>(d) + 4.0));
  std::vector<double> bw(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r[j];
    mean /= m;
    double var = 0.0;
    for (const auto& r : rows) var += (r[j] - mean) * (r[j] - mean);
    const double sd = rows.size() > 1 ? std::sqrt(var / (m - 1.0)) : 0.0;
    bw[j] = std::max(1e-3, sd * scott);
  }
  return bw;
}

// round each edge block of a continuous vector to the nearest one-hot
Architecture round_to_architecture(const std::vector<double>& x, const SearchSpaceSpec& space) {
  Architecture arch;
  arch.op_choice_per_edge.resize(static_cast<std::size_t>(space.num_edges()));
  const int ops = space.num_ops();
  for (int e = 0; e < space.num_edges(); ++e) {
    int best = 0;
    double best_v = x[static_cast<std::size_t>(e) * ops];
    for (int o = 1; o < ops; ++o) {
      const double v = x[static_cast<std::size_t>(e) * ops + o];
      if (v > best_v) {
        best_v = v;
        best = o;
      }
    }
    arch.op_choice_per_edge[static_cast<std::size_t>(e)] = best;
  }
  return arch;
}

}  // namespace

Architecture bohb_propose(const RungObservations& rungs, const SearchSpaceSpec& space,
                          const BohbParams& params, Rng& rng) {
  const int d = space.encoding_width();

  // highest fidelity with at least d+2 observations
  const std::vector<std::pair<Encoding, double>>* obs = nullptr;
  for (auto it = rungs.rbegin(); it != rungs.rend(); ++it) {
    if (static_cast<int>(it->second.size()) >= d + 2) {
      obs = &it->second;
      break;
    }
  }
  if (!obs) return random_architecture(space, rng);
  if (rng.uniform01() < params.random_fraction) return random_architecture(space, rng);

  std::vector<std::size_t> order(obs->size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return (*obs)[a].second > (*obs)[b].second;
  });
  const auto n_good = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(params.top_fraction * obs->size())));

  std::vector<std::vector<double>> good, bad;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_good ? good : bad).push_back((*obs)[order[i]].first.bits);
  if (bad.empty()) return random_architecture(space, rng);

  const std::vector<double> bw_good = kde_bandwidths(good);
  const std::vector<double> bw_bad = kde_bandwidths(bad);

  double best_score = -std::numeric_limits<double>::infinity();
  Architecture best = random_architecture(space, rng);  // placeholder, always replaced
  for (int s = 0; s < params.samples; ++s) {
    const auto& center = good[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(good.size())))];
    std::vector<double> x(center.size());
    for (std::size_t j = 0; j < x.size(); ++j)
      x[j] = std::clamp(center[j] + rng.normal(0.0, bw_good[j]), 0.0, 1.0);
    const Architecture arch = round_to_architecture(x, space);
    const std::vector<double> bits = encode(arch, space).bits;
    const double score =
        log_kde_density(good, bw_good, bits) - log_kde_density(bad, bw_bad, bits);
    if (score > best_score) {
      best_score = score;
      best = arch;
    }
  }
  return best;
}

bool successive_halving(int n_configs, int min_epochs, double eta, TrialExecutor& exec, Rng& rng,
                        RungObservations* rungs, const BohbParams* bohb) {
  const SearchSpaceSpec& space = exec.benchmark().space();
  if (eta < 2.0) throw ConfigError("eta must be >= 2");
  if (n_configs < 1) throw ConfigError("successive_halving needs n >= 1");

  // propose the starting set (distinct within the bracket)
  std::vector<Architecture> current;
  std::unordered_set<std::uint64_t> seen;
  for (int i = 0; i < n_configs; ++i) {
    Architecture a = bohb && rungs ? bohb_propose(*rungs, space, *bohb, rng)
                                   : random_architecture(space, rng);
    for (int attempt = 0; attempt < 64 && seen.contains(arch_index(a, space)); ++attempt)
      a = random_architecture(space, rng);
    seen.insert(arch_index(a, space));
    current.push_back(std::move(a));
  }

  int fidelity = std::min(min_epochs, space.e_max);
  while (true) {
    std::vector<std::pair<double, std::size_t>> scored;  // (acc at fidelity, eval order)
    for (std::size_t i = 0; i < current.size(); ++i) {
      const auto prefix = exec.train_to(current[i], fidelity);
      if (!prefix) return false;
      scored.emplace_back(prefix->back(), i);
      if (rungs)
        (*rungs)[fidelity].emplace_back(encode(current[i], space), prefix->back());
    }
    if (fidelity >= space.e_max) return true;

    // keep the top floor(n/eta), ties to earlier evaluation order
    const int keep = std::max(1, static_cast<int>(std::floor(
                                     static_cast<double>(current.size()) / eta)));
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Architecture> survivors;
    survivors.reserve(static_cast<std::size_t>(keep));
    for (int i = 0; i < keep; ++i)
      survivors.push_back(current[scored[static_cast<std::size_t>(i)].second]);
    current = std::move(survivors);
    fidelity = std::min(static_cast<int>(std::llround(fidelity * eta)), space.e_max);
  }
}

}  // namespace lcsb
