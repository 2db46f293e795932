#include "lcsb/synthspace.hpp"

#include <algorithm>
#include <cmath>

#include "lcsb/errors.hpp"

namespace lcsb {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

}  // namespace

SearchSpaceSpec default_space() {
  SearchSpaceSpec s;
  s.node_count = 4;
  s.edge_list = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  s.op_names = {"none", "skip", "conv1x1", "conv3x3", "avgpool"};
  s.e_max = 100;
  s.id = "synth-6e5o-e100";
  return s;
}

SyntheticOracle::SyntheticOracle(SyntheticOracleConfig config) : config_(std::move(config)) {
  config_.space.validate();
  if (config_.noise_scale < 0.0 || config_.noise_scale > 0.1)
    throw ConfigError("noise_scale must be in [0, 0.1]");
  if (config_.base_epoch_cost <= 0.0) throw ConfigError("base_epoch_cost must be positive");

  const int edges = config_.space.num_edges();
  const int ops = config_.space.num_ops();

  Rng quality_rng(stream_seed(config_.master_seed, "oracle.quality"));
  op_quality_.resize(static_cast<std::size_t>(edges) * ops);
  for (auto& w : op_quality_) w = quality_rng.normal(0.0, 0.5);

  Rng shape_rng(stream_seed(config_.master_seed, "oracle.shape"));
  shape_weights_.resize(op_quality_.size());
  for (auto& w : shape_weights_) w = shape_rng.normal(0.0, 0.5);

  // Sparse pairwise terms (10% density) keep the mean-curve task from being
  // linear in the one-hot encoding.
  Rng inter_rng(stream_seed(config_.master_seed, "oracle.interactions"));
  for (int ea = 0; ea < edges; ++ea)
    for (int eb = ea + 1; eb < edges; ++eb)
      for (int oa = 0; oa < ops; ++oa)
        for (int ob = 0; ob < ops; ++ob) {
          const double keep = inter_rng.uniform01();
          const double w = inter_rng.normal(0.0, 0.35);
          if (keep < 0.10) interactions_.push_back({ea, oa, eb, ob, w});
        }

  Rng cost_rng(stream_seed(config_.master_seed, "oracle.cost"));
  op_cost_.resize(static_cast<std::size_t>(ops));
  for (auto& c : op_cost_) c = cost_rng.uniform01();
  const double min_cost = *std::min_element(op_cost_.begin(), op_cost_.end());
  for (auto& c : op_cost_) c -= min_cost;  // cheapest op has proxy weight exactly 0

  const std::uint64_t n = config_.space.num_architectures();
  if (n > (1ULL << 22))
    throw ConfigError("synthetic space too large; keep ops^edges under 2^22");
  double best = 0.0;
  for (std::uint64_t i = 0; i < n; ++i)
    best = std::max(best, final_mean(arch_from_index(i, config_.space)));
  best_final_mean_ = best;
}

SyntheticOracle::CurveParams SyntheticOracle::curve_params(const Architecture& arch) const {
  validate_architecture(arch, config_.space);
  const int ops = config_.space.num_ops();
  double score = 0.0, shape = 0.0;
  for (int e = 0; e < config_.space.num_edges(); ++e) {
    const int o = arch.op_choice_per_edge[e];
    score += op_quality_[static_cast<std::size_t>(e) * ops + o];
    shape += shape_weights_[static_cast<std::size_t>(e) * ops + o];
  }
  for (const auto& it : interactions_)
    if (arch.op_choice_per_edge[it.edge_a] == it.op_a &&
        arch.op_choice_per_edge[it.edge_b] == it.op_b)
      score += it.weight;

  // Clamps keep every final mean accuracy inside [0.05, 0.95] for the
  // default 100-epoch space.
  score = clamp(score, -2.6, 2.9);
  shape = clamp(shape, -3.0, 3.0);

  CurveParams p;
  p.a_final = sigmoid(score);
  p.a_start = 0.1 * p.a_final;
  p.exponent = 0.3 + 1.2 * sigmoid(shape);
  return p;
}

LearningCurve SyntheticOracle::mean_curve(const Architecture& arch) const {
  const CurveParams p = curve_params(arch);
  LearningCurve curve(static_cast<std::size_t>(config_.space.e_max));
  for (int t = 1; t <= config_.space.e_max; ++t)
    curve[t - 1] = p.a_final - (p.a_final - p.a_start) * std::pow(t, -p.exponent);
  return curve;
}

double SyntheticOracle::noise_std(int epoch) const {
  return config_.noise_scale *
         (0.3 + 0.7 * std::exp(-3.0 * epoch / config_.space.e_max));
}

LearningCurve SyntheticOracle::sample_curve(const Architecture& arch, std::uint64_t seed) const {
  LearningCurve curve = mean_curve(arch);
  if (config_.noise_scale == 0.0) return curve;
  Rng rng(mix_seed(stream_seed(config_.master_seed, "oracle.noise"),
                   mix_seed(arch_index(arch, config_.space), seed)));
  for (int t = 1; t <= config_.space.e_max; ++t) {
    curve[t - 1] = clamp(curve[t - 1] + rng.normal(0.0, noise_std(t)), 0.0, 1.0);
  }
  return curve;
}

double SyntheticOracle::epoch_cost(const Architecture& arch) const {
  validate_architecture(arch, config_.space);
  double proxy = 0.0;
  for (int c : arch.op_choice_per_edge) proxy += op_cost_[static_cast<std::size_t>(c)];
  proxy /= config_.space.num_edges();
  return config_.base_epoch_cost * (1.0 + proxy);
}

double SyntheticOracle::final_mean(const Architecture& arch) const {
  const CurveParams p = curve_params(arch);
  return p.a_final - (p.a_final - p.a_start) * std::pow(config_.space.e_max, -p.exponent);
}

Architecture random_architecture(const SearchSpaceSpec& space, Rng& rng) {
  Architecture arch;
  arch.op_choice_per_edge.resize(static_cast<std::size_t>(space.num_edges()));
  for (auto& c : arch.op_choice_per_edge) c = rng.uniform_int(space.num_ops());
  return arch;
}

Architecture random_architecture(const SearchSpaceSpec& space, std::uint64_t seed) {
  Rng rng(stream_seed(seed, "random_architecture"));
  return random_architecture(space, rng);
}

std::vector<Architecture> neighbors(const SearchSpaceSpec& space, const Architecture& arch) {
  validate_architecture(arch, space);
  std::vector<Architecture> out;
  out.reserve(static_cast<std::size_t>(space.num_edges()) * (space.num_ops() - 1));
  for (int e = 0; e < space.num_edges(); ++e)
    for (int o = 0; o < space.num_ops(); ++o) {
      if (o == arch.op_choice_per_edge[e]) continue;
      Architecture n = arch;
      n.op_choice_per_edge[e] = o;
      out.push_back(std::move(n));
    }
  return out;
}

Architecture mutate(const SearchSpaceSpec& space, const Architecture& arch, Rng& rng) {
  validate_architecture(arch, space);
  if (space.num_ops() < 2) throw ConfigError("mutate needs at least two ops");
  Architecture out = arch;
  const int e = rng.uniform_int(space.num_edges());
  int o = rng.uniform_int(space.num_ops() - 1);
  if (o >= arch.op_choice_per_edge[e]) ++o;  // skip the current op
  out.op_choice_per_edge[e] = o;
  return out;
}

Architecture mutate(const SearchSpaceSpec& space, const Architecture& arch, std::uint64_t seed) {
  Rng rng(stream_seed(seed, "mutate"));
  return mutate(space, arch, rng);
}

CurveDataset generate_dataset(const SyntheticOracle& oracle, int n_arch, int seeds_per_arch,
                              std::uint64_t rng_seed) {
  const SearchSpaceSpec& space = oracle.space();
  const std::uint64_t space_size = space.num_architectures();
  if (n_arch <= 0 || seeds_per_arch <= 0)
    throw ConfigError("n_arch and seeds_per_arch must be positive");
  if (static_cast<std::uint64_t>(n_arch) > space_size)
    throw ConfigError("n_arch exceeds the number of architectures in the space");

  // Sampling without replacement via an order-shuffled index sequence.
  std::vector<std::uint64_t> indices(space_size);
  for (std::uint64_t i = 0; i < space_size; ++i) indices[i] = i;
  Rng rng(stream_seed(rng_seed, "generate_dataset"));
  rng.shuffle(indices);

  CurveDataset ds;
  ds.space = space;
  ds.records.reserve(static_cast<std::size_t>(n_arch) * seeds_per_arch);
  for (int a = 0; a < n_arch; ++a) {
    const Architecture arch = arch_from_index(indices[static_cast<std::size_t>(a)], space);
    const Encoding enc = encode(arch, space);
    const double cost = oracle.epoch_cost(arch);
    for (int s = 0; s < seeds_per_arch; ++s) {
      CurveRecord rec;
      rec.arch = arch;
      rec.encoding = enc;
      rec.seed = s;
      rec.curve = oracle.sample_curve(arch, static_cast<std::uint64_t>(s));
      rec.epoch_cost_seconds = cost;
      ds.records.push_back(std::move(rec));
    }
  }
  return ds;
}

}  // namespace lcsb
