#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "augmod/constellation.hpp"
#include "augmod/synth.hpp"

namespace augmod {

inline constexpr std::uint32_t kDatasetFormatVersion = 1;

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenConfig {
  std::uint32_t examples_per_pair = 5000;
  std::uint32_t n_samples = 1024;
  std::uint64_t master_seed = 0;
  bool freq_offset_enabled = false;
  std::vector<ModulationScheme> classes{all_schemes().begin(), all_schemes().end()};
  std::vector<double> snr_grid{snr_grid_db()};

  std::uint64_t total_examples() const;
  void validate() const;  // throws std::invalid_argument
};

struct Example {
  std::uint8_t label = 0;
  float snr_db = 0, sampling_ratio = 0, phase = 0, delay = 0, rolloff = 0, freq_offset = 0;
  Eigen::Matrix2Xf iq;  // row 0 = I, row 1 = Q
};

struct Dataset {
  std::uint32_t n_samples = 0;
  std::vector<std::string> class_names;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  int n_classes() const { return static_cast<int>(class_names.size()); }
};

// Examples in canonical (class, snr, index) order; per-example randomness is a
// pure function of (master_seed, class index, snr index, example index).
Dataset generate_dataset(const GenConfig& config);

// Generate, write the binary file atomically, and drop the sidecar manifest.
Dataset generate_dataset(const GenConfig& config, const std::string& out_path);

void write_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

std::string manifest_path_for(const std::string& dataset_path);
void write_manifest(const GenConfig& config, const std::string& dataset_path);

// Hash used for manifest / weight-blob digests.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::string fnv1a64_hex(const void* data, std::size_t n);
// Digest of a file's bytes, "fnv1a64:<hex>", or "" if the file is unreadable.
std::string file_digest(const std::string& path);

// Counts per (class, snr), observed impairment ranges, manifest seed.
std::string inspect_summary(const Dataset& dataset, const std::string& manifest_json);

// Subset of a dataset, optionally truncated to the first `length` samples.
struct DatasetView {
  const Dataset* data = nullptr;
  std::vector<std::int64_t> indices;
  Eigen::Index length = 0;  // 0 = stored length

  static DatasetView whole(const Dataset& d);
  DatasetView truncated(Eigen::Index n) const;
  template <typename Pred>
  DatasetView filtered(Pred keep) const {
    DatasetView v{data, {}, length};
    for (auto i : indices)
      if (keep(data->examples[static_cast<std::size_t>(i)])) v.indices.push_back(i);
    return v;
  }

  std::int64_t size() const { return static_cast<std::int64_t>(indices.size()); }
  const Example& example(std::int64_t i) const {
    return data->examples[static_cast<std::size_t>(indices[static_cast<std::size_t>(i)])];
  }
  Eigen::Index effective_length() const;
  // signal of example i cut to the view length
  Eigen::Ref<const Eigen::Matrix2Xf> signal(std::int64_t i) const;
};

// Paper-style 50/50 split: within every (class, snr) pair, alternating
// examples go to train and test.
std::pair<DatasetView, DatasetView> split_half(const Dataset& dataset);

}  // namespace augmod
