#include <algorithm>
#include <cmath>
#include <numeric>

#include "lcsb/errors.hpp"
#include "lcsb/regress.hpp"

namespace lcsb {

namespace {

struct BuildContext {
  const std::vector<std::vector<double>>& cols;  // feature-major
  const std::vector<double>& grad;
  const GbtParams& params;
  GbtModel::Tree& tree;
  std::vector<double>& split_gain;
};

// `sorted` holds, per feature, the node's sample indices ordered by that
// feature's value. Returns the node id.
int build_node(BuildContext& ctx, std::vector<std::vector<int>>& sorted, int depth) {
  const std::vector<int>& any = sorted[0];
  const int n = static_cast<int>(any.size());
  double sum = 0.0;
  for (int i : any) sum += ctx.grad[static_cast<std::size_t>(i)];

  const int node_id = static_cast<int>(ctx.tree.nodes.size());
  ctx.tree.nodes.push_back({});
  ctx.tree.nodes[static_cast<std::size_t>(node_id)].value = sum / n;

  const int min_leaf = ctx.params.min_samples_leaf;
  if (depth >= ctx.params.max_depth || n < 2 * min_leaf) return node_id;

  const double parent_score = sum * sum / n;
  double best_gain = 1e-12;
  int best_feature = -1;
  double best_threshold = 0.0;

  const int n_features = static_cast<int>(ctx.cols.size());
  for (int f = 0; f < n_features; ++f) {
    const std::vector<int>& idx = sorted[static_cast<std::size_t>(f)];
    const std::vector<double>& col = ctx.cols[static_cast<std::size_t>(f)];
    double sum_left = 0.0;
    for (int pos = 0; pos + 1 < n; ++pos) {
      const int i = idx[static_cast<std::size_t>(pos)];
      sum_left += ctx.grad[static_cast<std::size_t>(i)];
      const double v = col[static_cast<std::size_t>(i)];
      const double v_next = col[static_cast<std::size_t>(idx[static_cast<std::size_t>(pos + 1)])];
      if (v == v_next) continue;
      const int n_left = pos + 1;
      const int n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      const double sum_right = sum - sum_left;
      const double gain =
          sum_left * sum_left / n_left + sum_right * sum_right / n_right - parent_score;
      if (gain > best_gain) {  // strict: ties keep lowest feature, lowest threshold
        best_gain = gain;
        best_feature = f;
        best_threshold = v + 0.5 * (v_next - v);
      }
    }
  }

  if (best_feature < 0) return node_id;
  ctx.split_gain[static_cast<std::size_t>(best_feature)] += best_gain;

  const std::vector<double>& split_col = ctx.cols[static_cast<std::size_t>(best_feature)];
  std::vector<std::vector<int>> left_sorted(sorted.size()), right_sorted(sorted.size());
  for (std::size_t f = 0; f < sorted.size(); ++f) {
    left_sorted[f].reserve(static_cast<std::size_t>(n));
    right_sorted[f].reserve(static_cast<std::size_t>(n));
    for (int i : sorted[f]) {
      if (split_col[static_cast<std::size_t>(i)] <= best_threshold)
        left_sorted[f].push_back(i);
      else
        right_sorted[f].push_back(i);
    }
  }
  sorted.clear();
  sorted.shrink_to_fit();

  const int left_id = build_node(ctx, left_sorted, depth + 1);
  left_sorted.clear();
  const int right_id = build_node(ctx, right_sorted, depth + 1);

  auto& node = ctx.tree.nodes[static_cast<std::size_t>(node_id)];
  node.feature = best_feature;
  node.threshold = best_threshold;
  node.left = left_id;
  node.right = right_id;
  return node_id;
}

double tree_predict(const GbtModel::Tree& tree, std::span<const double> x) {
  int node = 0;
  while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
    node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
  }
  return tree.nodes[static_cast<std::size_t>(node)].value;
}

}  // namespace

GbtModel GbtModel::fit(const GbtParams& params, const std::vector<std::vector<double>>& x,
                       const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw ConfigError("gbt fit needs at least two samples");
  const int n_features = static_cast<int>(x.front().size());

  GbtModel model;
  model.n_features = n_features;
  model.learning_rate = params.learning_rate;
  model.split_gain.assign(static_cast<std::size_t>(n_features), 0.0);
  model.base = std::accumulate(y.begin(), y.end(), 0.0) / n;

  // feature-major copy and per-feature sort order (ties by sample index)
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(n_features),
                                        std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int f = 0; f < n_features; ++f)
      cols[static_cast<std::size_t>(f)][static_cast<std::size_t>(i)] =
          x[static_cast<std::size_t>(i)][static_cast<std::size_t>(f)];

  std::vector<std::vector<int>> root_sorted(static_cast<std::size_t>(n_features));
  for (int f = 0; f < n_features; ++f) {
    auto& idx = root_sorted[static_cast<std::size_t>(f)];
    idx.resize(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    const auto& col = cols[static_cast<std::size_t>(f)];
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return col[static_cast<std::size_t>(a)] < col[static_cast<std::size_t>(b)];
    });
  }

  std::vector<double> residual(static_cast<std::size_t>(n));
  std::vector<double> pred(static_cast<std::size_t>(n), model.base);
  model.trees.reserve(static_cast<std::size_t>(params.n_trees));

  for (int round = 0; round < params.n_trees; ++round) {
    for (int i = 0; i < n; ++i)
      residual[static_cast<std::size_t>(i)] =
          y[static_cast<std::size_t>(i)] - pred[static_cast<std::size_t>(i)];

    model.trees.push_back({});
    BuildContext ctx{cols, residual, params, model.trees.back(), model.split_gain};
    std::vector<std::vector<int>> sorted = root_sorted;
    build_node(ctx, sorted, 0);

    const Tree& tree = model.trees.back();
    for (int i = 0; i < n; ++i)
      pred[static_cast<std::size_t>(i)] +=
          params.learning_rate * tree_predict(tree, x[static_cast<std::size_t>(i)]);
  }
  return model;
}

double GbtModel::predict(std::span<const double> x) const {
  return predict_staged(x, static_cast<int>(trees.size()));
}

double GbtModel::predict_staged(std::span<const double> x, int n_rounds) const {
  double out = base;
  const int cap = std::min<int>(n_rounds, static_cast<int>(trees.size()));
  // trees store raw leaf means; the learning rate is applied here
  for (int t = 0; t < cap; ++t)
    out += learning_rate * tree_predict(trees[static_cast<std::size_t>(t)], x);
  return out;
}

std::vector<double> GbtModel::feature_importance() const {
  std::vector<double> out = split_gain;
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  if (total > 0.0)
    for (double& v : out) v /= total;
  return out;
}

}  // namespace lcsb
