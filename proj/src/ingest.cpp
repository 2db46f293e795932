#include "lcsb/ingest.hpp"

#include <cfenv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "lcsb/errors.hpp"
#include "lcsb/rng.hpp"
#include "lcsb/textio.hpp"

namespace lcsb {

namespace {

constexpr int kSchemaVersion = 1;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

void write_dataset(const std::filesystem::path& path, const CurveDataset& dataset) {
  dataset.validate();
  std::ofstream out(path, std::ios::binary);  // binary: LF endings on every platform
  if (!out) throw DataError("cannot open for writing: " + path.string());

  nlohmann::json header;
  header["format"] = "lcds";
  header["schema_version"] = kSchemaVersion;
  header["space"] = {
      {"id", dataset.space.id},
      {"node_count", dataset.space.node_count},
      {"edge_list", dataset.space.edge_list},
      {"op_names", dataset.space.op_names},
      {"e_max", dataset.space.e_max},
  };
  header["has_costs"] = dataset.has_costs();
  header["num_records"] = dataset.records.size();
  out << header.dump() << '\n';

  const bool costs = dataset.has_costs();
  for (const auto& rec : dataset.records) {
    std::string line;
    for (int c : rec.arch.op_choice_per_edge) {
      line += std::to_string(c);
      line += ',';
    }
    line += std::to_string(rec.seed);
    for (double v : rec.curve) {
      line += ',';
      line += format_double(v);
    }
    if (costs) {
      line += ',';
      line += format_double(rec.epoch_cost_seconds);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw DataError("write failed: " + path.string());
}

CurveDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": line 1: bad header: " + e.what());
  }
  if (header.value("format", "") != "lcds")
    throw DataError(path.string() + ": not an lcds file");
  const int version = header.value("schema_version", -1);
  if (version != kSchemaVersion)
    throw DataError(path.string() + ": unsupported schema version " +
                    std::to_string(version));

  CurveDataset ds;
  try {
    const auto& sp = header.at("space");
    ds.space.id = sp.at("id").get<std::string>();
    ds.space.node_count = sp.at("node_count").get<int>();
    ds.space.edge_list = sp.at("edge_list").get<std::vector<std::pair<int, int>>>();
    ds.space.op_names = sp.at("op_names").get<std::vector<std::string>>();
    ds.space.e_max = sp.at("e_max").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": line 1: bad space header: " + e.what());
  }
  ds.space.validate();

  const bool costs = header.value("has_costs", false);
  const int edges = ds.space.num_edges();
  const std::size_t expected =
      static_cast<std::size_t>(edges) + 1 + ds.space.e_max + (costs ? 1 : 0);

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = [&] { return path.string() + ": line " + std::to_string(line_no); };
    const auto fields = split_fields(line);
    if (fields.size() != expected)
      throw DataError(where() + ": expected " + std::to_string(expected) + " fields, got " +
                      std::to_string(fields.size()));
    CurveRecord rec;
    try {
      rec.arch.op_choice_per_edge.resize(static_cast<std::size_t>(edges));
      for (int e = 0; e < edges; ++e)
        rec.arch.op_choice_per_edge[e] = static_cast<int>(parse_int(fields[e]));
      rec.seed = parse_int(fields[static_cast<std::size_t>(edges)]);
      rec.curve.resize(static_cast<std::size_t>(ds.space.e_max));
      for (int t = 0; t < ds.space.e_max; ++t)
        rec.curve[t] = parse_double(fields[static_cast<std::size_t>(edges) + 1 + t]);
      if (costs) rec.epoch_cost_seconds = parse_double(fields.back());
    } catch (const DataError& e) {
      throw DataError(where() + ": " + e.what());
    }
    try {
      validate_architecture(rec.arch, ds.space);
    } catch (const ConfigError& e) {
      throw DataError(where() + ": " + e.what());
    }
    for (double v : rec.curve)
      if (!(v >= 0.0 && v <= 1.0))
        throw DataError(where() + ": accuracy " + format_double(v) + " outside [0,1]");
    if (costs && rec.epoch_cost_seconds <= 0.0)
      throw DataError(where() + ": nonpositive epoch cost");
    rec.encoding = encode(rec.arch, ds.space);
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

std::pair<CurveDataset, CurveDataset> split_dataset(const CurveDataset& dataset,
                                                    double test_fraction,
                                                    std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("test_fraction must be in (0, 1)");

  // distinct architectures in first-appearance order
  std::vector<std::uint64_t> arch_ids;
  std::map<std::uint64_t, std::vector<std::size_t>> by_arch;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const std::uint64_t id = arch_index(dataset.records[i].arch, dataset.space);
    auto [it, inserted] = by_arch.try_emplace(id);
    if (inserted) arch_ids.push_back(id);
    it->second.push_back(i);
  }
  if (arch_ids.size() < 2) throw ConfigError("split needs at least two distinct architectures");

  std::vector<std::uint64_t> shuffled = arch_ids;
  Rng rng(stream_seed(seed, "split_dataset"));
  rng.shuffle(shuffled);

  // round-half-even via the default FP rounding mode
  const auto n_test = static_cast<std::size_t>(
      std::nearbyint(test_fraction * static_cast<double>(arch_ids.size())));

  std::vector<bool> is_test_arch;
  std::map<std::uint64_t, bool> test_flag;
  for (std::size_t i = 0; i < shuffled.size(); ++i) test_flag[shuffled[i]] = i < n_test;

  CurveDataset train, test;
  train.space = dataset.space;
  test.space = dataset.space;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const std::uint64_t id = arch_index(dataset.records[i].arch, dataset.space);
    (test_flag[id] ? test : train).records.push_back(dataset.records[i]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace lcsb
