#include "augmod/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "augmod/runtime.hpp"

namespace augmod {

namespace {

constexpr char kMagic[4] = {'A', 'G', 'M', 'D'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is, const std::string& path) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw FormatError("truncated dataset file: " + path);
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void put_f32(std::ostream& os, float v) {
  static_assert(sizeof(float) == 4);
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(os, bits);
}

float get_f32(std::istream& is, const std::string& path) {
  std::uint32_t bits = get_u32(is, path);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

std::uint64_t GenConfig::total_examples() const {
  return static_cast<std::uint64_t>(classes.size()) * snr_grid.size() * examples_per_pair;
}

void GenConfig::validate() const {
  if (examples_per_pair < 1) throw std::invalid_argument("examples_per_pair must be >= 1");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (classes.empty()) throw std::invalid_argument("class list is empty");
  if (snr_grid.empty()) throw std::invalid_argument("snr grid is empty");
  for (double s : snr_grid) {
    bool ok = false;
    for (double g : snr_grid_db()) ok = ok || s == g;
    if (!ok) throw std::invalid_argument("snr value off the simulated grid: " + std::to_string(s));
  }
}

Dataset generate_dataset(const GenConfig& config) {
  config.validate();

  Dataset ds;
  ds.n_samples = config.n_samples;
  for (ModulationScheme s : config.classes) ds.class_names.emplace_back(scheme_name(s));
  ds.examples.resize(config.total_examples());

  const std::int64_t n_snr = static_cast<std::int64_t>(config.snr_grid.size());
  const std::int64_t per_pair = config.examples_per_pair;
  const std::int64_t total = static_cast<std::int64_t>(ds.examples.size());

  parallel_for(total, [&](std::int64_t g) {
    const std::int64_t class_idx = g / (n_snr * per_pair);
    const std::int64_t snr_idx = (g / per_pair) % n_snr;
    const std::int64_t ex_idx = g % per_pair;

    Rng rng = derive_rng(config.master_seed,
                         {stream::kExample, static_cast<std::uint64_t>(class_idx),
                          static_cast<std::uint64_t>(snr_idx), static_cast<std::uint64_t>(ex_idx)});
    const double snr = config.snr_grid[static_cast<std::size_t>(snr_idx)];
    const ImpairmentParams params = sample_impairments(rng, config.freq_offset_enabled, snr);
    const IqFrame frame =
        synthesize(config.classes[static_cast<std::size_t>(class_idx)], params, config.n_samples, rng);

    Example& ex = ds.examples[static_cast<std::size_t>(g)];
    ex.label = static_cast<std::uint8_t>(class_idx);
    ex.snr_db = static_cast<float>(params.snr_db);
    ex.sampling_ratio = static_cast<float>(params.sampling_ratio);
    ex.phase = static_cast<float>(params.phase);
    ex.delay = static_cast<float>(params.delay);
    ex.rolloff = static_cast<float>(params.rolloff);
    ex.freq_offset = static_cast<float>(params.freq_offset);
    ex.iq = frame.iq;
  });

  return ds;
}

Dataset generate_dataset(const GenConfig& config, const std::string& out_path) {
  Dataset ds = generate_dataset(config);
  write_dataset(ds, out_path);
  write_manifest(config, out_path);
  return ds;
}

void write_dataset(const Dataset& dataset, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot open for writing: " + tmp);

    os.write(kMagic, 4);
    put_u32(os, kDatasetFormatVersion);
    put_u32(os, static_cast<std::uint32_t>(dataset.examples.size()));
    put_u32(os, dataset.n_samples);
    put_u32(os, static_cast<std::uint32_t>(dataset.class_names.size()));
    for (const auto& name : dataset.class_names) {
      put_u32(os, static_cast<std::uint32_t>(name.size()));
      os.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    for (const auto& ex : dataset.examples) {
      os.put(static_cast<char>(ex.label));
      put_f32(os, ex.snr_db);
      put_f32(os, ex.sampling_ratio);
      put_f32(os, ex.phase);
      put_f32(os, ex.delay);
      put_f32(os, ex.rolloff);
      put_f32(os, ex.freq_offset);
      // column-major 2xN storage is exactly the interleaved I/Q layout
      os.write(reinterpret_cast<const char*>(ex.iq.data()),
               static_cast<std::streamsize>(sizeof(float) * 2 * static_cast<std::size_t>(ex.iq.cols())));
    }
    if (!os) throw FormatError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open dataset: " + path);

  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("not a dataset file (bad magic): " + path);
  const std::uint32_t version = get_u32(is, path);
  if (version != kDatasetFormatVersion)
    throw FormatError("unsupported dataset format version " + std::to_string(version) + ": " + path);

  Dataset ds;
  const std::uint32_t n_examples = get_u32(is, path);
  ds.n_samples = get_u32(is, path);
  const std::uint32_t n_classes = get_u32(is, path);
  if (ds.n_samples < 1) throw FormatError("dataset declares zero samples: " + path);
  for (std::uint32_t c = 0; c < n_classes; ++c) {
    const std::uint32_t len = get_u32(is, path);
    std::string name(len, '\0');
    if (!is.read(name.data(), len)) throw FormatError("truncated dataset file: " + path);
    ds.class_names.push_back(std::move(name));
  }

  ds.examples.resize(n_examples);
  for (auto& ex : ds.examples) {
    int label = is.get();
    if (label == EOF) throw FormatError("truncated dataset file: " + path);
    if (label >= static_cast<int>(n_classes))
      throw FormatError("class index out of range in: " + path);
    ex.label = static_cast<std::uint8_t>(label);
    ex.snr_db = get_f32(is, path);
    ex.sampling_ratio = get_f32(is, path);
    ex.phase = get_f32(is, path);
    ex.delay = get_f32(is, path);
    ex.rolloff = get_f32(is, path);
    ex.freq_offset = get_f32(is, path);
    ex.iq.resize(2, ds.n_samples);
    if (!is.read(reinterpret_cast<char*>(ex.iq.data()),
                 static_cast<std::streamsize>(sizeof(float) * 2 * ds.n_samples)))
      throw FormatError("truncated dataset file: " + path);
  }
  return ds;
}

std::string manifest_path_for(const std::string& dataset_path) {
  return dataset_path + ".manifest.json";
}

void write_manifest(const GenConfig& config, const std::string& dataset_path) {
  nlohmann::json j;
  j["format_version"] = kDatasetFormatVersion;
  j["master_seed"] = config.master_seed;
  j["examples_per_pair"] = config.examples_per_pair;
  j["n_samples"] = config.n_samples;
  j["freq_offset_enabled"] = config.freq_offset_enabled;
  std::vector<std::string> names;
  for (ModulationScheme s : config.classes) names.emplace_back(scheme_name(s));
  j["classes"] = names;
  j["snr_grid_db"] = config.snr_grid;
  char stamp[32];
  std::time_t now = std::time(nullptr);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["created_utc"] = stamp;

  const std::string path = manifest_path_for(dataset_path);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw FormatError("cannot open for writing: " + tmp);
    os << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const void* data, std::size_t n) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(data, n)));
  return buf;
}

std::string file_digest(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return "";
  std::ostringstream ss;
  ss << is.rdbuf();
  const std::string bytes = ss.str();
  return "fnv1a64:" + fnv1a64_hex(bytes.data(), bytes.size());
}

std::string inspect_summary(const Dataset& dataset, const std::string& manifest_json) {
  std::ostringstream out;
  out << dataset.examples.size() << " examples, " << dataset.n_samples << " samples, "
      << dataset.class_names.size() << " classes\n";

  out << "classes:";
  for (const auto& n : dataset.class_names) out << " " << n;
  out << "\n";

  std::map<std::pair<int, float>, std::int64_t> pair_counts;
  float lo[5] = {1e30f, 1e30f, 1e30f, 1e30f, 1e30f};
  float hi[5] = {-1e30f, -1e30f, -1e30f, -1e30f, -1e30f};
  std::int64_t with_offset = 0;
  for (const auto& ex : dataset.examples) {
    ++pair_counts[{ex.label, ex.snr_db}];
    const float fields[5] = {ex.sampling_ratio, ex.phase, ex.delay, ex.rolloff,
                             std::fabs(ex.freq_offset)};
    for (int i = 0; i < 5; ++i) {
      lo[i] = std::min(lo[i], fields[i]);
      hi[i] = std::max(hi[i], fields[i]);
    }
    if (ex.freq_offset != 0.0f) ++with_offset;
  }

  out << "per (class, snr) counts:\n";
  for (const auto& [key, count] : pair_counts)
    out << "  " << dataset.class_names[static_cast<std::size_t>(key.first)] << " @ " << key.second
        << " dB: " << count << "\n";

  if (!dataset.examples.empty()) {
    const char* names[5] = {"sampling_ratio", "phase", "delay", "rolloff", "|freq_offset|"};
    out << "observed impairment ranges:\n";
    for (int i = 0; i < 5; ++i)
      out << "  " << names[i] << " in [" << lo[i] << ", " << hi[i] << "]\n";
    out << "examples with frequency offset: " << with_offset << "\n";
  }

  if (!manifest_json.empty()) {
    auto j = nlohmann::json::parse(manifest_json, nullptr, false);
    if (!j.is_discarded() && j.contains("master_seed"))
      out << "manifest seed: " << j["master_seed"].get<std::uint64_t>() << "\n";
  } else {
    out << "manifest: none\n";
  }
  return out.str();
}

DatasetView DatasetView::whole(const Dataset& d) {
  DatasetView v;
  v.data = &d;
  v.indices.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) v.indices[i] = static_cast<std::int64_t>(i);
  return v;
}

DatasetView DatasetView::truncated(Eigen::Index n) const {
  DatasetView v = *this;
  v.length = n;
  return v;
}

Eigen::Index DatasetView::effective_length() const {
  return length > 0 ? length : static_cast<Eigen::Index>(data->n_samples);
}

Eigen::Ref<const Eigen::Matrix2Xf> DatasetView::signal(std::int64_t i) const {
  const Example& ex = example(i);
  if (length > 0) {
    if (length > ex.iq.cols())
      throw std::invalid_argument("length override exceeds stored sample count");
    return ex.iq.leftCols(length);
  }
  return ex.iq;
}

std::pair<DatasetView, DatasetView> split_half(const Dataset& dataset) {
  DatasetView train, test;
  train.data = &dataset;
  test.data = &dataset;
  std::map<std::pair<int, float>, std::int64_t> seen;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Example& ex = dataset.examples[i];
    const std::int64_t k = seen[{ex.label, ex.snr_db}]++;
    (k % 2 == 0 ? train : test).indices.push_back(static_cast<std::int64_t>(i));
  }
  return {train, test};
}

}  // namespace augmod
