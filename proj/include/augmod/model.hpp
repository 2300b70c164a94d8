#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "augmod/nn/network.hpp"

namespace augmod {

inline constexpr int kCheckpointFormatVersion = 1;

// Reference layer tables. Channel widths are fixed constants of this project;
// both land within 0.1% of the published parameter budgets and are
// independent of the signal length.
nn::ModelConfig build_lcnn(int n_classes);
nn::ModelConfig build_lrcnn(int n_classes);
nn::ModelConfig build_model(const std::string& arch_name, int n_classes);

struct CheckpointMeta {
  std::int64_t epochs_seen = 0;
  std::uint64_t master_seed = 0;
  std::string dataset_manifest_hash;
};

struct Checkpoint {
  nn::Network<float> net;
  CheckpointMeta meta;
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// not a checkpoint at all, or an unsupported format version
struct CheckpointVersionError : CheckpointError {
  using CheckpointError::CheckpointError;
};
// weight blob shorter than the header promises
struct CheckpointTruncatedError : CheckpointError {
  using CheckpointError::CheckpointError;
};
// stored digest does not match the blob
struct CheckpointDigestError : CheckpointError {
  using CheckpointError::CheckpointError;
};

// UTF-8 JSON header line (format version, architecture, layer table, metadata,
// blob digest and layout) followed by the little-endian f32 weight blob in
// canonical layer order. Written atomically.
void save_checkpoint(const nn::Network<float>& net, const CheckpointMeta& meta,
                     const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace augmod
