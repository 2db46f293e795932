#include <array>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "lcsb/errors.hpp"
#include "lcsb/surrogate.hpp"

namespace lcsb {

namespace {

constexpr char kMagic[6] = {'L', 'C', 'S', 'M', 1, '\n'};
constexpr int kContainerSchema = 1;

// --- CRC-32 (reflected, polynomial 0xEDB88320) ------------------------------

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

std::uint32_t crc32(const std::string& data) {
  static const auto table = make_crc_table();
  std::uint32_t c = 0xFFFFFFFFu;
  for (unsigned char b : data) c = table[(c ^ b) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

// --- flat numeric packing ----------------------------------------------------

class Packer {
 public:
  void put(double v) { data_.push_back(v); }
  void put_int(std::int64_t v) { data_.push_back(static_cast<double>(v)); }
  void put_span(const std::vector<double>& v) {
    put_int(static_cast<std::int64_t>(v.size()));
    data_.insert(data_.end(), v.begin(), v.end());
  }
  std::vector<double> take() { return std::move(data_); }

 private:
  std::vector<double> data_;
};

class Unpacker {
 public:
  explicit Unpacker(const std::vector<double>& data) : data_(data) {}
  double get() {
    if (pos_ >= data_.size()) throw DataError("surrogate container: truncated section");
    return data_[pos_++];
  }
  std::int64_t get_int() { return static_cast<std::int64_t>(get()); }
  std::vector<double> get_span() {
    const auto n = static_cast<std::size_t>(get_int());
    if (pos_ + n > data_.size()) throw DataError("surrogate container: truncated section");
    std::vector<double> out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                            data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  const std::vector<double>& data_;
  std::size_t pos_ = 0;
};

std::vector<double> pack_regressor(const FittedRegressor& r) {
  Packer p;
  p.put_int(static_cast<int>(r.backend()));
  p.put_int(r.input_dim());
  p.put_int(r.output_dim());
  switch (r.backend()) {
    case RegressorBackend::gbt:
      for (const auto& m : r.gbt_models) {
        p.put(m.base);
        p.put(m.learning_rate);
        p.put_int(m.n_features);
        p.put_span(m.split_gain);
        p.put_int(static_cast<std::int64_t>(m.trees.size()));
        for (const auto& tree : m.trees) {
          p.put_int(static_cast<std::int64_t>(tree.nodes.size()));
          for (const auto& nd : tree.nodes) {
            p.put_int(nd.feature);
            p.put(nd.threshold);
            p.put_int(nd.left);
            p.put_int(nd.right);
            p.put(nd.value);
          }
        }
      }
      break;
    case RegressorBackend::mlp:
      for (const auto& m : r.mlp_models) {
        p.put_int(m.n_features);
        p.put_int(m.hidden);
        p.put_span(m.params_flat);
      }
      break;
    case RegressorBackend::kridge: {
      const auto& m = *r.kridge_model;
      p.put(m.length_scale);
      p.put(m.ridge);
      p.put_int(static_cast<std::int64_t>(m.train_x.size()));
      p.put_int(m.train_x.empty() ? 0 : static_cast<std::int64_t>(m.train_x.front().size()));
      p.put_int(m.n_outputs);
      for (const auto& row : m.train_x)
        for (double v : row) p.put(v);
      for (const auto& a : m.alphas) p.put_span(a);
      break;
    }
  }
  return p.take();
}

FittedRegressor unpack_regressor(Unpacker& u) {
  FittedRegressor r;
  r.backend_ = static_cast<RegressorBackend>(u.get_int());
  r.input_dim_ = static_cast<int>(u.get_int());
  r.output_dim_ = static_cast<int>(u.get_int());
  switch (r.backend_) {
    case RegressorBackend::gbt:
      for (int o = 0; o < r.output_dim_; ++o) {
        GbtModel m;
        m.base = u.get();
        m.learning_rate = u.get();
        m.n_features = static_cast<int>(u.get_int());
        m.split_gain = u.get_span();
        const auto n_trees = u.get_int();
        m.trees.resize(static_cast<std::size_t>(n_trees));
        for (auto& tree : m.trees) {
          const auto n_nodes = u.get_int();
          tree.nodes.resize(static_cast<std::size_t>(n_nodes));
          for (auto& nd : tree.nodes) {
            nd.feature = static_cast<int>(u.get_int());
            nd.threshold = u.get();
            nd.left = static_cast<int>(u.get_int());
            nd.right = static_cast<int>(u.get_int());
            nd.value = u.get();
          }
        }
        r.gbt_models.push_back(std::move(m));
      }
      break;
    case RegressorBackend::mlp:
      for (int o = 0; o < r.output_dim_; ++o) {
        MlpModel m;
        m.n_features = static_cast<int>(u.get_int());
        m.hidden = static_cast<int>(u.get_int());
        m.params_flat = u.get_span();
        r.mlp_models.push_back(std::move(m));
      }
      break;
    case RegressorBackend::kridge: {
      KridgeModel m;
      m.length_scale = u.get();
      m.ridge = u.get();
      const auto n = u.get_int();
      const auto d = u.get_int();
      m.n_outputs = static_cast<int>(u.get_int());
      m.train_x.resize(static_cast<std::size_t>(n));
      for (auto& row : m.train_x) {
        row.resize(static_cast<std::size_t>(d));
        for (auto& v : row) v = u.get();
      }
      m.alphas.resize(static_cast<std::size_t>(m.n_outputs));
      for (auto& a : m.alphas) a = u.get_span();
      r.kridge_model = std::move(m);
      break;
    }
    default:
      throw DataError("surrogate container: unknown regressor backend");
  }
  return r;
}

std::vector<double> pack_noise(const NoiseModel& m) {
  Packer p;
  p.put_int(static_cast<int>(m.kind));
  p.put_int(m.e_max);
  p.put_span(m.sigma);
  if (m.kind == NoiseKind::gkde) {
    p.put_int(static_cast<std::int64_t>(m.kde_rows.size()));
    for (const auto& row : m.kde_rows)
      for (double v : row) p.put(v);
    p.put_span(m.kde_bandwidth);
  }
  return p.take();
}

NoiseModel unpack_noise(Unpacker& u, std::vector<double> window_section) {
  NoiseModel m;
  m.kind = static_cast<NoiseKind>(u.get_int());
  m.e_max = static_cast<int>(u.get_int());
  m.sigma = u.get_span();
  if (m.kind == NoiseKind::gkde) {
    const auto n = u.get_int();
    m.kde_rows.resize(static_cast<std::size_t>(n));
    for (auto& row : m.kde_rows) {
      row.resize(static_cast<std::size_t>(m.e_max));
      for (auto& v : row) v = u.get();
    }
    m.kde_bandwidth = u.get_span();
  }
  if (m.kind == NoiseKind::window) {
    Unpacker wu(window_section);
    m.window_model = unpack_regressor(wu);
  }
  return m;
}

// --- augmentation / config metadata ------------------------------------------

nlohmann::json aug_to_json(const Augmentation& a) {
  nlohmann::json j;
  switch (a.kind) {
    case Augmentation::Kind::none: j["kind"] = "none"; break;
    case Augmentation::Kind::anchor_epochs:
      j["kind"] = "anchor_epochs";
      j["anchors"] = a.anchors;
      break;
    case Augmentation::Kind::first_n_epochs:
      j["kind"] = "first_n_epochs";
      j["n"] = a.first_n;
      break;
  }
  return j;
}

Augmentation aug_from_json(const nlohmann::json& j) {
  Augmentation a;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "none") {
    a.kind = Augmentation::Kind::none;
  } else if (kind == "anchor_epochs") {
    a.kind = Augmentation::Kind::anchor_epochs;
    a.anchors = j.at("anchors").get<std::vector<int>>();
  } else if (kind == "first_n_epochs") {
    a.kind = Augmentation::Kind::first_n_epochs;
    a.first_n = j.at("n").get<int>();
  } else {
    throw DataError("unknown augmentation kind: " + kind);
  }
  return a;
}

nlohmann::json regressor_config_to_json(const RegressorConfig& c) {
  return {
      {"backend", backend_name(c.backend)},
      {"gbt",
       {{"n_trees", c.gbt.n_trees},
        {"max_depth", c.gbt.max_depth},
        {"learning_rate", c.gbt.learning_rate},
        {"min_samples_leaf", c.gbt.min_samples_leaf}}},
      {"mlp",
       {{"hidden", c.mlp.hidden},
        {"learning_rate", c.mlp.learning_rate},
        {"epochs", c.mlp.epochs},
        {"batch", c.mlp.batch}}},
      {"kridge", {{"ridge", c.kridge.ridge}, {"length_scale", c.kridge.length_scale}}},
      {"rng_seed", c.rng_seed},
  };
}

RegressorConfig regressor_config_from_json(const nlohmann::json& j) {
  RegressorConfig c;
  c.backend = backend_from_name(j.at("backend").get<std::string>());
  const auto& g = j.at("gbt");
  c.gbt = {g.at("n_trees").get<int>(), g.at("max_depth").get<int>(),
           g.at("learning_rate").get<double>(), g.at("min_samples_leaf").get<int>()};
  const auto& m = j.at("mlp");
  c.mlp = {m.at("hidden").get<int>(), m.at("learning_rate").get<double>(),
           m.at("epochs").get<int>(), m.at("batch").get<int>()};
  const auto& k = j.at("kridge");
  c.kridge = {k.at("ridge").get<double>(), k.at("length_scale").get<double>()};
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return c;
}

void append_u64(std::string& out, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

void append_doubles(std::string& out, const std::vector<double>& v) {
  const std::size_t bytes = v.size() * sizeof(double);
  const std::size_t at = out.size();
  out.resize(at + bytes);
  std::memcpy(out.data() + at, v.data(), bytes);
}

}  // namespace

void save_surrogate(const SurrogateModel& model, const std::filesystem::path& path) {
  nlohmann::json header;
  header["container_schema"] = kContainerSchema;
  header["version"] = model.config.version;
  header["space"] = {
      {"id", model.space.id},
      {"node_count", model.space.node_count},
      {"edge_list", model.space.edge_list},
      {"op_names", model.space.op_names},
      {"e_max", model.space.e_max},
  };
  header["config"] = {
      {"k", model.config.k},
      {"k_max", model.config.k_max},
      {"allow_rank_fallback", model.config.allow_rank_fallback},
      {"mu", regressor_config_to_json(model.config.mu)},
      {"noise_kind", noise_kind_name(model.config.noise_kind)},
      {"window_sigma", regressor_config_to_json(model.config.window_sigma)},
      {"augmentation", aug_to_json(model.config.augmentation)},
      {"version", model.config.version},
      {"rng_seed", model.config.rng_seed},
  };
  header["fit_report"] = {
      {"selected_k", model.report.selected_k},
      {"train_records", model.report.train_records},
      {"train_archs", model.report.train_archs},
      {"mean_epoch_cost", model.report.mean_epoch_cost},
      {"train_arch_ids", model.report.train_arch_ids},
  };

  std::vector<std::pair<std::string, std::vector<double>>> sections;
  sections.emplace_back("basis", [&] {
    Packer p;
    p.put_int(model.basis.k);
    p.put_int(model.basis.e_max);
    p.put_span(model.basis.components);
    p.put_span(model.basis.singular_values);
    return p.take();
  }());
  sections.emplace_back("mu", pack_regressor(model.mu));
  sections.emplace_back("noise", pack_noise(model.noise));
  if (model.noise.kind == NoiseKind::window)
    sections.emplace_back("noise.window", pack_regressor(*model.noise.window_model));

  std::string blob(kMagic, sizeof(kMagic));
  const std::string header_str = header.dump();
  append_u64(blob, header_str.size());
  blob += header_str;
  append_u64(blob, sections.size());
  for (const auto& [name, data] : sections) {
    append_u64(blob, name.size());
    blob += name;
    append_u64(blob, data.size());
    append_doubles(blob, data);
  }
  const std::uint32_t crc = crc32(blob);
  char crc_buf[4];
  std::memcpy(crc_buf, &crc, 4);
  blob.append(crc_buf, 4);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

SurrogateModel load_surrogate(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (blob.size() < sizeof(kMagic) + 4 || std::memcmp(blob.data(), kMagic, sizeof(kMagic)) != 0)
    throw DataError(path.string() + ": not a surrogate container");

  std::uint32_t stored_crc = 0;
  std::memcpy(&stored_crc, blob.data() + blob.size() - 4, 4);
  const std::string body = blob.substr(0, blob.size() - 4);
  if (crc32(body) != stored_crc)
    throw DataError(path.string() + ": checksum mismatch (corrupted file)");

  std::size_t pos = sizeof(kMagic);
  auto read_u64 = [&]() -> std::uint64_t {
    if (pos + 8 > body.size()) throw DataError(path.string() + ": truncated container");
    std::uint64_t v = 0;
    std::memcpy(&v, body.data() + pos, 8);
    pos += 8;
    return v;
  };

  const std::uint64_t header_len = read_u64();
  if (pos + header_len > body.size()) throw DataError(path.string() + ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(body.substr(pos, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": bad metadata: " + e.what());
  }
  pos += header_len;

  const int schema = header.value("container_schema", -1);
  if (schema != kContainerSchema)
    throw DataError(path.string() + ": unsupported container schema " + std::to_string(schema));

  std::vector<std::pair<std::string, std::vector<double>>> sections;
  const std::uint64_t n_sections = read_u64();
  for (std::uint64_t s = 0; s < n_sections; ++s) {
    const std::uint64_t name_len = read_u64();
    if (pos + name_len > body.size()) throw DataError(path.string() + ": truncated section name");
    std::string name = body.substr(pos, name_len);
    pos += name_len;
    const std::uint64_t count = read_u64();
    if (pos + count * sizeof(double) > body.size())
      throw DataError(path.string() + ": truncated section data");
    std::vector<double> data(count);
    std::memcpy(data.data(), body.data() + pos, count * sizeof(double));
    pos += count * sizeof(double);
    sections.emplace_back(std::move(name), std::move(data));
  }

  auto section = [&](const std::string& name) -> const std::vector<double>& {
    for (const auto& [n, d] : sections)
      if (n == name) return d;
    throw DataError(path.string() + ": missing section " + name);
  };

  SurrogateModel model;
  try {
    const auto& sp = header.at("space");
    model.space.id = sp.at("id").get<std::string>();
    model.space.node_count = sp.at("node_count").get<int>();
    model.space.edge_list = sp.at("edge_list").get<std::vector<std::pair<int, int>>>();
    model.space.op_names = sp.at("op_names").get<std::vector<std::string>>();
    model.space.e_max = sp.at("e_max").get<int>();

    const auto& cfg = header.at("config");
    model.config.k = cfg.at("k").get<int>();
    model.config.k_max = cfg.at("k_max").get<int>();
    model.config.allow_rank_fallback = cfg.at("allow_rank_fallback").get<bool>();
    model.config.mu = regressor_config_from_json(cfg.at("mu"));
    model.config.noise_kind = noise_kind_from_name(cfg.at("noise_kind").get<std::string>());
    model.config.window_sigma = regressor_config_from_json(cfg.at("window_sigma"));
    model.config.augmentation = aug_from_json(cfg.at("augmentation"));
    model.config.version = cfg.at("version").get<std::string>();
    model.config.rng_seed = cfg.at("rng_seed").get<std::uint64_t>();

    const auto& rep = header.at("fit_report");
    model.report.selected_k = rep.at("selected_k").get<int>();
    model.report.train_records = rep.at("train_records").get<int>();
    model.report.train_archs = rep.at("train_archs").get<int>();
    model.report.mean_epoch_cost = rep.at("mean_epoch_cost").get<double>();
    model.report.train_arch_ids = rep.at("train_arch_ids").get<std::vector<std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": bad metadata: " + e.what());
  }

  {
    Unpacker u(section("basis"));
    model.basis.k = static_cast<int>(u.get_int());
    model.basis.e_max = static_cast<int>(u.get_int());
    model.basis.components = u.get_span();
    model.basis.singular_values = u.get_span();
  }
  {
    Unpacker u(section("mu"));
    model.mu = unpack_regressor(u);
  }
  {
    Unpacker u(section("noise"));
    std::vector<double> window;
    for (const auto& [n, d] : sections)
      if (n == "noise.window") window = d;
    model.noise = unpack_noise(u, std::move(window));
  }
  return model;
}

}  // namespace lcsb
