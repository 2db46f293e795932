#include "lcsb/lce.hpp"

#include <algorithm>
#include <cmath>

#include "lcsb/errors.hpp"
#include "lcsb/linalg.hpp"

namespace lcsb {

std::string family_name(CurveFamily f) {
  switch (f) {
    case CurveFamily::pow3: return "pow3";
    case CurveFamily::log_power: return "log_power";
    case CurveFamily::exp3: return "exp3";
    case CurveFamily::janoschek: return "janoschek";
  }
  throw ConfigError("unknown curve family");
}

int family_param_count(CurveFamily f) {
  return f == CurveFamily::janoschek ? 4 : 3;
}

double family_eval(CurveFamily f, std::span<const double> p, double t) {
  switch (f) {
    case CurveFamily::pow3: return p[0] - p[1] * std::pow(t, -p[2]);
    case CurveFamily::log_power: return p[0] / (1.0 + std::pow(t / p[1], -p[2]));
    case CurveFamily::exp3: return p[0] - p[1] * std::exp(-p[2] * t);
    case CurveFamily::janoschek:
      return p[0] - (p[0] - p[1]) * std::exp(-p[2] * std::pow(t, p[3]));
  }
  throw ConfigError("unknown curve family");
}

namespace {

struct Bounds {
  std::array<double, 4> lo;
  std::array<double, 4> hi;
  std::array<bool, 4> log_scale;
};

Bounds family_bounds(CurveFamily f) {
  Bounds b;
  b.lo = {0.0, 1e-3, 1e-2, 1e-2};
  b.hi = {1.0, 100.0, 5.0, 5.0};
  b.log_scale = {false, true, true, true};
  (void)f;
  return b;
}

// Halton low-discrepancy point, bases 2/3/5/7
double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

double cost_of(CurveFamily family, std::span<const double> params,
               std::span<const double> prefix) {
  double ss = 0.0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const double r = family_eval(family, params, static_cast<double>(i + 1)) - prefix[i];
    if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
    ss += r * r;
  }
  return ss;
}

// Levenberg-Marquardt with numeric Jacobian and box projection.
bool lm_refine(CurveFamily family, std::span<const double> prefix, const Bounds& bounds,
               std::array<double, 4>& params, double& cost) {
  const int p = family_param_count(family);
  const auto n = prefix.size();
  cost = cost_of(family, params, prefix);
  if (!std::isfinite(cost)) return false;

  double lambda = 1e-3;
  std::vector<double> jac(n * static_cast<std::size_t>(p));
  std::vector<double> resid(n);

  for (int iter = 0; iter < 100; ++iter) {
    for (std::size_t i = 0; i < n; ++i)
      resid[i] = family_eval(family, params, static_cast<double>(i + 1)) - prefix[i];

    for (int k = 0; k < p; ++k) {
      const double h = std::max(1e-7, 1e-6 * std::abs(params[static_cast<std::size_t>(k)]));
      std::array<double, 4> plus = params, minus = params;
      plus[static_cast<std::size_t>(k)] =
          std::min(bounds.hi[static_cast<std::size_t>(k)], params[static_cast<std::size_t>(k)] + h);
      minus[static_cast<std::size_t>(k)] =
          std::max(bounds.lo[static_cast<std::size_t>(k)], params[static_cast<std::size_t>(k)] - h);
      const double dh = plus[static_cast<std::size_t>(k)] - minus[static_cast<std::size_t>(k)];
      if (dh <= 0.0) {
        for (std::size_t i = 0; i < n; ++i) jac[i * p + static_cast<std::size_t>(k)] = 0.0;
        continue;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1);
        jac[i * p + static_cast<std::size_t>(k)] =
            (family_eval(family, plus, t) - family_eval(family, minus, t)) / dh;
      }
    }

    // normal equations with Marquardt damping
    std::vector<double> jtj(static_cast<std::size_t>(p) * p, 0.0);
    std::vector<double> jtr(static_cast<std::size_t>(p), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (int a = 0; a < p; ++a) {
        jtr[static_cast<std::size_t>(a)] += jac[i * p + static_cast<std::size_t>(a)] * resid[i];
        for (int b = a; b < p; ++b)
          jtj[static_cast<std::size_t>(a) * p + b] +=
              jac[i * p + static_cast<std::size_t>(a)] * jac[i * p + static_cast<std::size_t>(b)];
      }
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < a; ++b)
        jtj[static_cast<std::size_t>(a) * p + b] = jtj[static_cast<std::size_t>(b) * p + a];

    bool stepped = false;
    for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
      std::vector<double> damped = jtj;
      for (int a = 0; a < p; ++a) {
        double d = damped[static_cast<std::size_t>(a) * p + a];
        damped[static_cast<std::size_t>(a) * p + a] = d + lambda * std::max(d, 1e-12);
      }
      std::array<double, 4> trial = params;
      try {
        cholesky_factor(damped, p);
        std::vector<double> rhs(jtr.begin(), jtr.end());
        const std::vector<double> delta = cholesky_solve(damped, p, rhs);
        for (int a = 0; a < p; ++a)
          trial[static_cast<std::size_t>(a)] =
              std::clamp(params[static_cast<std::size_t>(a)] - delta[static_cast<std::size_t>(a)],
                         bounds.lo[static_cast<std::size_t>(a)],
                         bounds.hi[static_cast<std::size_t>(a)]);
      } catch (const DataError&) {
        lambda *= 10.0;
        continue;
      }
      const double trial_cost = cost_of(family, trial, prefix);
      if (trial_cost < cost) {
        double moved = 0.0;
        for (int a = 0; a < p; ++a)
          moved += std::abs(trial[static_cast<std::size_t>(a)] - params[static_cast<std::size_t>(a)]);
        params = trial;
        const double gain = cost - trial_cost;
        cost = trial_cost;
        lambda = std::max(1e-12, lambda / 3.0);
        stepped = true;
        if (gain < 1e-14 && moved < 1e-10) return true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e12) return true;
      }
    }
    if (!stepped) return true;
  }
  return true;
}

}  // namespace

ParametricFit fit_parametric(std::span<const double> prefix, CurveFamily family) {
  const int p = family_param_count(family);
  if (static_cast<int>(prefix.size()) < p + 1)
    throw ConfigError("fit_parametric: prefix shorter than parameter count + 1");

  const Bounds bounds = family_bounds(family);
  ParametricFit best;
  best.family = family;
  best.diverged = true;
  double best_cost = std::numeric_limits<double>::infinity();

  for (int start = 0; start < 8; ++start) {
    std::array<double, 4> params{};
    constexpr int bases[4] = {2, 3, 5, 7};
    for (int k = 0; k < p; ++k) {
      const double u = halton(start + 1, bases[k]);
      const double lo = bounds.lo[static_cast<std::size_t>(k)];
      const double hi = bounds.hi[static_cast<std::size_t>(k)];
      params[static_cast<std::size_t>(k)] =
          bounds.log_scale[static_cast<std::size_t>(k)]
              ? std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)))
              : lo + u * (hi - lo);
    }
    double cost = 0.0;
    if (!lm_refine(family, prefix, bounds, params, cost)) continue;
    if (std::isfinite(cost) && cost < best_cost) {
      best_cost = cost;
      best.params = params;
      best.diverged = false;
    }
  }

  if (!best.diverged)
    best.rmse = std::sqrt(best_cost / static_cast<double>(prefix.size()));
  return best;
}

WpmResult extrapolate_wpm_detail(std::span<const double> prefix, int e_max) {
  if (prefix.size() < 5) throw ConfigError("extrapolate_wpm needs a prefix of length >= 5");

  WpmResult out;
  std::array<ParametricFit, 4> fits;
  std::vector<double> rmses;
  for (std::size_t i = 0; i < kAllFamilies.size(); ++i) {
    fits[i] = fit_parametric(prefix, kAllFamilies[i]);
    if (!fits[i].diverged) {
      const double pred = family_eval(kAllFamilies[i], fits[i].params, e_max);
      if (std::isfinite(pred)) {
        out.family_preds[i] = pred;
        rmses.push_back(fits[i].rmse);
        continue;
      }
    }
    fits[i].diverged = true;
  }

  if (rmses.empty()) {  // fallback: extend the curve flat
    out.prediction = std::clamp(prefix.back(), 0.0, 1.0);
    return out;
  }

  // likelihood-proxy ensemble weights: w ~ exp(-rmse^2 n / (2 s^2)),
  // s = median rmse over the surviving families
  std::vector<double> sorted = rmses;
  std::sort(sorted.begin(), sorted.end());
  double s;
  if (sorted.size() % 2 == 1)
    s = sorted[sorted.size() / 2];
  else
    s = 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  s = std::max(s, 1e-9);

  const double n = static_cast<double>(prefix.size());
  std::array<double, 4> logw{};
  double max_logw = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kAllFamilies.size(); ++i) {
    if (fits[i].diverged) continue;
    logw[i] = -fits[i].rmse * fits[i].rmse * n / (2.0 * s * s);
    max_logw = std::max(max_logw, logw[i]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < kAllFamilies.size(); ++i) {
    if (fits[i].diverged) continue;
    out.weights[i] = std::exp(logw[i] - max_logw);
    total += out.weights[i];
  }
  double pred = 0.0;
  for (std::size_t i = 0; i < kAllFamilies.size(); ++i) {
    out.weights[i] /= total;
    pred += out.weights[i] * out.family_preds[i];
  }
  out.prediction = std::clamp(pred, 0.0, 1.0);
  return out;
}

double extrapolate_wpm(std::span<const double> prefix, int e_max) {
  return extrapolate_wpm_detail(prefix, e_max).prediction;
}

std::vector<double> ModelExtrapolator::features(const Encoding& encoding,
                                                std::span<const double> prefix) {
  std::vector<double> f = encoding.bits;
  f.insert(f.end(), prefix.begin(), prefix.end());
  const double last = prefix.back();
  const double best = *std::max_element(prefix.begin(), prefix.end());
  const std::size_t tail = std::min<std::size_t>(5, prefix.size());
  double tail_mean = 0.0;
  for (std::size_t i = prefix.size() - tail; i < prefix.size(); ++i) tail_mean += prefix[i];
  tail_mean /= static_cast<double>(tail);
  const double diff_mean =
      prefix.size() > 1
          ? (prefix.back() - prefix.front()) / static_cast<double>(prefix.size() - 1)
          : 0.0;
  f.push_back(last);
  f.push_back(best);
  f.push_back(tail_mean);
  f.push_back(diff_mean);
  return f;
}

ModelExtrapolator ModelExtrapolator::fit(const std::vector<ExtrapolationRecord>& history) {
  if (static_cast<int>(history.size()) < kMinExtrapolationRecords)
    throw ConfigError("model extrapolator needs at least " +
                      std::to_string(kMinExtrapolationRecords) + " records");
  const std::size_t plen = history.front().prefix.size();
  if (plen == 0) throw ConfigError("model extrapolator needs nonempty prefixes");

  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> y;
  for (const auto& rec : history) {
    if (rec.prefix.size() != plen)
      throw ConfigError("model extrapolator needs equal-length prefixes");
    x.push_back(features(rec.encoding, rec.prefix));
    y.push_back({rec.final_accuracy});
  }

  RegressorConfig cfg;
  cfg.backend = RegressorBackend::kridge;
  ModelExtrapolator out;
  out.model_ = FittedRegressor::fit(cfg, x, y);
  out.prefix_length_ = static_cast<int>(plen);
  return out;
}

double ModelExtrapolator::predict(const Encoding& encoding,
                                  std::span<const double> prefix) const {
  if (static_cast<int>(prefix.size()) != prefix_length_)
    throw ConfigError("model extrapolator: prefix length does not match training");
  const double raw = model_.predict(features(encoding, prefix))[0];
  return std::clamp(raw, 0.0, 1.0);
}

}  // namespace lcsb
