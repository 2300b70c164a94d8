#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "augmod/dataset.hpp"
#include "augmod/model.hpp"
#include "augmod/nn/adam.hpp"

namespace augmod {

struct LengthMode {
  enum class Kind { Fixed, VariableUniform };
  Kind kind = Kind::Fixed;
  Eigen::Index fixed = 0;  // 0 = full stored length
  Eigen::Index min = 16, max = 1024;

  static LengthMode fixed_full() { return {}; }
  static LengthMode fixed_n(Eigen::Index n) { return {Kind::Fixed, n, 16, 1024}; }
  static LengthMode variable(Eigen::Index min = 16, Eigen::Index max = 1024) {
    return {Kind::VariableUniform, 0, min, max};
  }
};

struct TrainConfig {
  int epochs = 200;
  int batch_size = 512;
  double lr = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-7;
  LengthMode length;
  std::uint64_t master_seed = 0;
  bool deterministic = false;
  // cap on test examples scored per epoch (0 = all); the final evaluation
  // always goes through evalkit on the full set
  std::int64_t test_limit = 0;
  bool verbose = true;
};

struct EpochStats {
  double train_loss = 0, train_err = 0, test_err = 0, seconds = 0;
};
using TrainHistory = std::vector<EpochStats>;

struct FitResult {
  nn::Network<float> net;
  CheckpointMeta meta;
  TrainHistory history;
};

// One shuffled pass: per batch, apply the length policy, run forward with
// dropout active, backward, one Adam step. Per-example gradients are reduced
// in example order, so results do not depend on the thread count.
EpochStats train_epoch(nn::Network<float>& net, nn::AdamState<float>& opt, const DatasetView& train,
                       const TrainConfig& config, int epoch_index);

FitResult fit(const nn::ModelConfig& model, const DatasetView& train, const DatasetView& test,
              const TrainConfig& config);

// fit, but starting from the checkpoint's weights (curriculum re-training).
FitResult fine_tune(const Checkpoint& base, const DatasetView& train, const DatasetView& test,
                    const TrainConfig& config);

// Dropout-off error rate over (the first `limit` of) a view.
double evaluate_error(const nn::Network<float>& net, const DatasetView& view, std::int64_t limit = 0);

// Columns: epoch,train_loss,train_err,test_err,seconds. Deterministic mode
// zeroes the wall-clock column so identical runs produce identical bytes.
void write_history_csv(const TrainHistory& history, const std::string& path, bool deterministic);

}  // namespace augmod
