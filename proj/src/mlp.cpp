#include <algorithm>
#include <cmath>
#include <numeric>

#include "lcsb/errors.hpp"
#include "lcsb/regress.hpp"
#include "lcsb/rng.hpp"

namespace lcsb {

// Flat layout: [w1 (hidden x features), b1 (hidden), w2 (hidden), b2 (1)]
namespace {

struct View {
  double* w1;
  double* b1;
  double* w2;
  double* b2;
};

View view(std::vector<double>& p, int d, int h) {
  return {p.data(), p.data() + static_cast<std::size_t>(h) * d,
          p.data() + static_cast<std::size_t>(h) * d + h,
          p.data() + static_cast<std::size_t>(h) * d + 2 * h};
}

}  // namespace

MlpModel MlpModel::zeros(int n_features, int hidden) {
  MlpModel m;
  m.n_features = n_features;
  m.hidden = hidden;
  m.params_flat.assign(static_cast<std::size_t>(hidden) * n_features + 2 * hidden + 1, 0.0);
  return m;
}

double MlpModel::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_features)
    throw ConfigError("mlp predict: wrong input dimension");
  auto& p = const_cast<std::vector<double>&>(params_flat);
  const View v = view(p, n_features, hidden);
  double out = v.b2[0];
  for (int j = 0; j < hidden; ++j) {
    double a = v.b1[j];
    const double* w = v.w1 + static_cast<std::size_t>(j) * n_features;
    for (int i = 0; i < n_features; ++i) a += w[i] * x[static_cast<std::size_t>(i)];
    if (a > 0.0) out += v.w2[j] * a;
  }
  return out;
}

double MlpModel::loss_and_grad(const std::vector<std::vector<double>>& x,
                               const std::vector<double>& y, std::vector<double>& grad) const {
  const int n = static_cast<int>(x.size());
  auto& p = const_cast<std::vector<double>&>(params_flat);
  const View v = view(p, n_features, hidden);
  grad.assign(params_flat.size(), 0.0);
  View g = view(grad, n_features, hidden);

  std::vector<double> act(static_cast<std::size_t>(hidden));
  double loss = 0.0;
  for (int s = 0; s < n; ++s) {
    const auto& xs = x[static_cast<std::size_t>(s)];
    double out = v.b2[0];
    for (int j = 0; j < hidden; ++j) {
      double a = v.b1[j];
      const double* w = v.w1 + static_cast<std::size_t>(j) * n_features;
      for (int i = 0; i < n_features; ++i) a += w[i] * xs[static_cast<std::size_t>(i)];
      act[static_cast<std::size_t>(j)] = a > 0.0 ? a : 0.0;
      out += v.w2[j] * act[static_cast<std::size_t>(j)];
    }
    const double err = out - y[static_cast<std::size_t>(s)];
    loss += err * err;

    const double dout = 2.0 * err / n;
    g.b2[0] += dout;
    for (int j = 0; j < hidden; ++j) {
      const double aj = act[static_cast<std::size_t>(j)];
      g.w2[j] += dout * aj;
      if (aj > 0.0) {
        const double da = dout * v.w2[j];
        g.b1[j] += da;
        double* gw = g.w1 + static_cast<std::size_t>(j) * n_features;
        for (int i = 0; i < n_features; ++i) gw[i] += da * xs[static_cast<std::size_t>(i)];
      }
    }
  }
  return loss / n;
}

MlpModel MlpModel::fit(const MlpParams& params, const std::vector<std::vector<double>>& x,
                       const std::vector<double>& y, std::uint64_t seed) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw ConfigError("mlp fit needs at least two samples");
  const int d = static_cast<int>(x.front().size());

  MlpModel m = zeros(d, params.hidden);
  Rng rng(stream_seed(seed, "mlp.init"));
  const double limit1 = std::sqrt(6.0 / (d + params.hidden));
  const double limit2 = std::sqrt(6.0 / (params.hidden + 1));
  View v = view(m.params_flat, d, params.hidden);
  for (int j = 0; j < params.hidden; ++j) {
    double* w = v.w1 + static_cast<std::size_t>(j) * d;
    for (int i = 0; i < d; ++i) w[i] = rng.uniform(-limit1, limit1);
    v.w2[j] = rng.uniform(-limit2, limit2);
  }
  v.b2[0] = std::accumulate(y.begin(), y.end(), 0.0) / n;

  Rng shuffle_rng(stream_seed(seed, "mlp.shuffle"));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  std::vector<std::vector<double>> bx;
  std::vector<double> by, grad;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (int start = 0; start < n; start += params.batch) {
      const int end = std::min(n, start + params.batch);
      bx.clear();
      by.clear();
      for (int s = start; s < end; ++s) {
        bx.push_back(x[static_cast<std::size_t>(order[static_cast<std::size_t>(s)])]);
        by.push_back(y[static_cast<std::size_t>(order[static_cast<std::size_t>(s)])]);
      }
      m.loss_and_grad(bx, by, grad);
      for (std::size_t i = 0; i < grad.size(); ++i)
        m.params_flat[i] -= params.learning_rate * grad[i];
    }
  }
  return m;
}

}  // namespace lcsb
