#include "augmod/model.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "augmod/dataset.hpp"

namespace augmod::nn {

const char* architecture_name(Architecture arch) {
  switch (arch) {
    case Architecture::Lcnn: return "lcnn";
    case Architecture::Lrcnn: return "lrcnn";
  }
  throw std::invalid_argument("unknown architecture");
}

Architecture architecture_from_name(const std::string& name) {
  if (name == "lcnn") return Architecture::Lcnn;
  if (name == "lrcnn") return Architecture::Lrcnn;
  throw std::invalid_argument("unknown architecture: " + name);
}

}  // namespace augmod::nn

namespace augmod {

using nn::Architecture;
using nn::LayerSpec;
using nn::ModelConfig;

namespace {

std::vector<LayerSpec> classifier_head(int features, int n_classes) {
  return {LayerSpec::dense(features, features), LayerSpec::relu(), LayerSpec::dropout(0.5),
          LayerSpec::dense(features, n_classes), LayerSpec::softmax()};
}

nlohmann::json layer_to_json(const LayerSpec& l) {
  nlohmann::json j;
  j["kind"] = nn::layer_kind_name(l.kind);
  switch (l.kind) {
    case nn::LayerKind::Conv1d:
      j["in"] = l.in_channels;
      j["out"] = l.out_channels;
      j["kernel"] = l.kernel;
      break;
    case nn::LayerKind::Dense:
    case nn::LayerKind::Residual:
      j["in"] = l.in_channels;
      j["out"] = l.out_channels;
      break;
    case nn::LayerKind::Dropout:
      j["rate"] = l.rate;
      break;
    default:
      break;
  }
  return j;
}

LayerSpec layer_from_json(const nlohmann::json& j) {
  const nn::LayerKind kind = nn::layer_kind_from_name(j.at("kind").get<std::string>());
  switch (kind) {
    case nn::LayerKind::Conv1d:
      return LayerSpec::conv1d(j.at("in"), j.at("out"), j.at("kernel"));
    case nn::LayerKind::Dense:
      return LayerSpec::dense(j.at("in"), j.at("out"));
    case nn::LayerKind::Residual:
      return LayerSpec::residual(j.at("in"), j.at("out"));
    case nn::LayerKind::Dropout:
      return LayerSpec::dropout(j.at("rate"));
    case nn::LayerKind::Relu:
      return LayerSpec::relu();
    case nn::LayerKind::GlobalAvgPool:
      return LayerSpec::global_avg_pool();
    case nn::LayerKind::Softmax:
      return LayerSpec::softmax();
  }
  throw std::invalid_argument("unknown layer kind in checkpoint");
}

}  // namespace

ModelConfig build_lcnn(int n_classes) {
  if (n_classes < 2) throw std::invalid_argument("n_classes must be >= 2");
  ModelConfig c;
  c.arch = Architecture::Lcnn;
  c.n_classes = n_classes;
  c.layers = {LayerSpec::conv1d(2, 32, 7),  LayerSpec::relu(),
              LayerSpec::conv1d(32, 48, 7), LayerSpec::relu(),
              LayerSpec::conv1d(48, 64, 7), LayerSpec::relu(),
              LayerSpec::global_avg_pool()};
  for (auto& l : classifier_head(64, n_classes)) c.layers.push_back(l);
  return c;
}

ModelConfig build_lrcnn(int n_classes) {
  if (n_classes < 2) throw std::invalid_argument("n_classes must be >= 2");
  ModelConfig c;
  c.arch = Architecture::Lrcnn;
  c.n_classes = n_classes;
  c.layers = {LayerSpec::residual(2, 48), LayerSpec::residual(48, 64),
              LayerSpec::global_avg_pool()};
  for (auto& l : classifier_head(64, n_classes)) c.layers.push_back(l);
  return c;
}

ModelConfig build_model(const std::string& arch_name, int n_classes) {
  switch (nn::architecture_from_name(arch_name)) {
    case Architecture::Lcnn: return build_lcnn(n_classes);
    case Architecture::Lrcnn: return build_lrcnn(n_classes);
  }
  throw std::invalid_argument("unknown architecture: " + arch_name);
}

void save_checkpoint(const nn::Network<float>& net, const CheckpointMeta& meta,
                     const std::string& path) {
  const auto& params = net.params();

  std::vector<float> blob;
  nlohmann::json layout = nlohmann::json::array();
  std::int64_t slot_index = 0;
  for (const auto& p : params) {
    layout.push_back({{"name", "slot" + std::to_string(slot_index) + ".w"},
                      {"rows", p.w.rows()},
                      {"cols", p.w.cols()}});
    layout.push_back({{"name", "slot" + std::to_string(slot_index) + ".b"},
                      {"rows", p.b.size()},
                      {"cols", 1}});
    blob.insert(blob.end(), p.w.data(), p.w.data() + p.w.size());
    blob.insert(blob.end(), p.b.data(), p.b.data() + p.b.size());
    ++slot_index;
  }

  nlohmann::json header;
  header["format_version"] = kCheckpointFormatVersion;
  header["architecture"] = nn::architecture_name(net.config().arch);
  header["n_classes"] = net.config().n_classes;
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.config().layers) layers.push_back(layer_to_json(l));
  header["layers"] = layers;
  header["metadata"] = {{"epochs_seen", meta.epochs_seen},
                        {"master_seed", meta.master_seed},
                        {"dataset_manifest_hash", meta.dataset_manifest_hash}};
  header["weights"] = {
      {"dtype", "f32"},
      {"byte_order", "little"},
      {"storage", "column-major, w then b per slot, slots in layer-table order"},
      {"count", blob.size()},
      {"digest", "fnv1a64:" + fnv1a64_hex(blob.data(), blob.size() * sizeof(float))},
      {"layout", layout}};

  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw CheckpointError("cannot open for writing: " + tmp);
    os << header.dump() << "\n";
    os.write(reinterpret_cast<const char*>(blob.data()),
             static_cast<std::streamsize>(blob.size() * sizeof(float)));
    if (!os) throw CheckpointError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint: " + path);

  std::string header_line;
  if (!std::getline(is, header_line))
    throw CheckpointVersionError("not a checkpoint file (missing header): " + path);
  nlohmann::json header = nlohmann::json::parse(header_line, nullptr, false);
  if (header.is_discarded() || !header.contains("format_version"))
    throw CheckpointVersionError("not a checkpoint file (bad header): " + path);
  if (header["format_version"].get<int>() != kCheckpointFormatVersion)
    throw CheckpointVersionError("unsupported checkpoint format version " +
                                 header["format_version"].dump() + ": " + path);

  ModelConfig config;
  config.arch = nn::architecture_from_name(header.at("architecture").get<std::string>());
  config.n_classes = header.at("n_classes").get<int>();
  for (const auto& jl : header.at("layers")) config.layers.push_back(layer_from_json(jl));

  Checkpoint ckpt{nn::Network<float>(config), CheckpointMeta{}};
  const auto& jm = header.at("metadata");
  ckpt.meta.epochs_seen = jm.at("epochs_seen").get<std::int64_t>();
  ckpt.meta.master_seed = jm.at("master_seed").get<std::uint64_t>();
  ckpt.meta.dataset_manifest_hash = jm.at("dataset_manifest_hash").get<std::string>();

  const std::size_t count = header.at("weights").at("count").get<std::size_t>();
  std::size_t expected = 0;
  for (const auto& p : ckpt.net.params())
    expected += static_cast<std::size_t>(p.w.size()) + static_cast<std::size_t>(p.b.size());
  if (count != expected)
    throw CheckpointError("weight count disagrees with the layer table in: " + path);

  std::vector<float> blob(count);
  if (!is.read(reinterpret_cast<char*>(blob.data()),
               static_cast<std::streamsize>(count * sizeof(float))))
    throw CheckpointTruncatedError("truncated weight blob in: " + path);

  const std::string digest = "fnv1a64:" + fnv1a64_hex(blob.data(), blob.size() * sizeof(float));
  if (digest != header.at("weights").at("digest").get<std::string>())
    throw CheckpointDigestError("weight blob digest mismatch in: " + path);

  std::size_t off = 0;
  for (auto& p : ckpt.net.params()) {
    std::memcpy(p.w.data(), blob.data() + off, static_cast<std::size_t>(p.w.size()) * sizeof(float));
    off += static_cast<std::size_t>(p.w.size());
    std::memcpy(p.b.data(), blob.data() + off, static_cast<std::size_t>(p.b.size()) * sizeof(float));
    off += static_cast<std::size_t>(p.b.size());
  }
  return ckpt;
}

}  // namespace augmod
