#include "lcsb/regress.hpp"

#include <cmath>

#include "lcsb/errors.hpp"
#include "lcsb/rng.hpp"

namespace lcsb {

std::string backend_name(RegressorBackend b) {
  switch (b) {
    case RegressorBackend::gbt: return "gbt";
    case RegressorBackend::mlp: return "mlp";
    case RegressorBackend::kridge: return "kridge";
  }
  throw ConfigError("unknown backend");
}

RegressorBackend backend_from_name(const std::string& name) {
  if (name == "gbt") return RegressorBackend::gbt;
  if (name == "mlp") return RegressorBackend::mlp;
  if (name == "kridge") return RegressorBackend::kridge;
  throw ConfigError("unknown regressor backend: " + name);
}

void RegressorConfig::validate() const {
  if (gbt.n_trees < 1 || gbt.max_depth < 1 || gbt.min_samples_leaf < 1)
    throw ConfigError("gbt parameters must be positive");
  if (gbt.learning_rate <= 0.0) throw ConfigError("gbt learning_rate must be positive");
  if (mlp.hidden < 1 || mlp.epochs < 1 || mlp.batch < 1)
    throw ConfigError("mlp parameters must be positive");
  if (mlp.learning_rate <= 0.0) throw ConfigError("mlp learning_rate must be positive");
  if (kridge.ridge <= 0.0) throw ConfigError("kridge ridge must be positive");
  if (kridge.length_scale < 0.0) throw ConfigError("kridge length_scale must be nonnegative");
}

FittedRegressor FittedRegressor::fit(const RegressorConfig& config,
                                     const std::vector<std::vector<double>>& x,
                                     const std::vector<std::vector<double>>& y) {
  config.validate();
  if (x.size() != y.size()) throw ConfigError("fit: |X| != |Y|");
  if (x.size() < 2) throw ConfigError("fit needs at least two samples");
  const std::size_t d = x.front().size();
  const std::size_t out_dim = y.front().size();
  for (const auto& row : x)
    if (row.size() != d) throw ConfigError("fit: inconsistent input dimensions");
  for (const auto& row : y) {
    if (row.size() != out_dim) throw ConfigError("fit: inconsistent output dimensions");
    for (double v : row)
      if (!std::isfinite(v)) throw ConfigError("fit: non-finite target value");
  }

  FittedRegressor r;
  r.backend_ = config.backend;
  r.input_dim_ = static_cast<int>(d);
  r.output_dim_ = static_cast<int>(out_dim);

  switch (config.backend) {
    case RegressorBackend::gbt: {
      std::vector<double> col(x.size());
      for (std::size_t o = 0; o < out_dim; ++o) {
        for (std::size_t i = 0; i < x.size(); ++i) col[i] = y[i][o];
        r.gbt_models.push_back(GbtModel::fit(config.gbt, x, col));
      }
      break;
    }
    case RegressorBackend::mlp: {
      std::vector<double> col(x.size());
      for (std::size_t o = 0; o < out_dim; ++o) {
        for (std::size_t i = 0; i < x.size(); ++i) col[i] = y[i][o];
        r.mlp_models.push_back(
            MlpModel::fit(config.mlp, x, col, mix_seed(config.rng_seed, o)));
      }
      break;
    }
    case RegressorBackend::kridge:
      r.kridge_model = KridgeModel::fit(config.kridge, x, y);
      break;
  }
  return r;
}

FittedRegressor FittedRegressor::fit(const RegressorConfig& config,
                                     const std::vector<Encoding>& x,
                                     const std::vector<std::vector<double>>& y) {
  std::vector<std::vector<double>> flat;
  flat.reserve(x.size());
  for (const auto& e : x) flat.push_back(e.bits);
  return fit(config, flat, y);
}

std::vector<double> FittedRegressor::predict(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != input_dim_)
    throw ConfigError("predict: wrong input dimension");
  std::vector<double> out;
  switch (backend_) {
    case RegressorBackend::gbt:
      out.reserve(gbt_models.size());
      for (const auto& m : gbt_models) out.push_back(m.predict(x));
      break;
    case RegressorBackend::mlp:
      out.reserve(mlp_models.size());
      for (const auto& m : mlp_models) out.push_back(m.predict(x));
      break;
    case RegressorBackend::kridge:
      out = kridge_model->predict(x);
      break;
  }
  for (double v : out)
    if (!std::isfinite(v)) throw DataError("predict produced a non-finite value");
  return out;
}

std::vector<double> FittedRegressor::feature_importance() const {
  if (backend_ != RegressorBackend::gbt)
    throw ConfigError("feature_importance is only available for the gbt backend");
  std::vector<double> total(static_cast<std::size_t>(input_dim_), 0.0);
  for (const auto& m : gbt_models) {
    const auto imp = m.feature_importance();
    for (std::size_t i = 0; i < imp.size(); ++i) total[i] += imp[i];
  }
  double sum = 0.0;
  for (double v : total) sum += v;
  if (sum > 0.0)
    for (double& v : total) v /= sum;
  return total;
}

}  // namespace lcsb
