#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "augmod/dataset.hpp"
#include "augmod/nn/network.hpp"

namespace augmod {

struct GroupStat {
  std::string label;
  std::int64_t count = 0;
  std::int64_t correct = 0;

  double accuracy() const { return count > 0 ? static_cast<double>(correct) / count : 0.0; }
  double error_rate() const { return 1.0 - accuracy(); }
  bool operator==(const GroupStat&) const = default;
};

struct MetricsReport {
  std::vector<std::string> class_names;
  GroupStat overall{"overall", 0, 0};
  std::vector<GroupStat> groups;  // empty for a plain evaluation
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> confusion;  // true x predicted

  bool operator==(const MetricsReport& other) const {
    return class_names == other.class_names && overall == other.overall &&
           groups == other.groups && confusion.rows() == other.confusion.rows() &&
           confusion.cols() == other.confusion.cols() &&
           (confusion.array() == other.confusion.array()).all();
  }
};

// Predicted class per example; argmax with ties broken toward the lowest index.
std::vector<int> predict_classes(const nn::Network<float>& net, const DatasetView& view);

// Assemble a report from labels/predictions; `group_of[i]` optionally names
// the group of example i, with `group_order` fixing row order.
MetricsReport tally(const std::vector<std::string>& class_names, const std::vector<int>& labels,
                    const std::vector<int>& preds, const std::vector<std::string>& group_of = {},
                    const std::vector<std::string>& group_order = {});

// Dropout-off inference over the view, optionally truncated to the first
// `length_override` samples.
MetricsReport evaluate(const nn::Network<float>& net, const DatasetView& view,
                       Eigen::Index length_override = 0);

MetricsReport sweep_snr(const nn::Network<float>& net, const DatasetView& view);

inline const std::vector<Eigen::Index>& length_grid() {
  static const std::vector<Eigen::Index> grid{16, 32, 64, 128, 256, 512, 1024};
  return grid;
}

// One evaluation per grid length over the same examples and the same weights.
MetricsReport sweep_length(const nn::Network<float>& net, const DatasetView& view,
                           const std::vector<Eigen::Index>& lengths = length_grid());

// Half-decade |df| bin edges covering the simulated range [1e-6, 0.5].
std::vector<double> half_decade_edges();

std::string freq_bin_label(double abs_freq, const std::vector<double>& edges);

// Groups by log-magnitude bin of the stored frequency offset; sign folded by
// default, split into +/- groups when sign_split is set.
MetricsReport sweep_freq_offset(const nn::Network<float>& net, const DatasetView& view,
                                const std::vector<double>& edges = half_decade_edges(),
                                bool sign_split = false);

// group,count,correct,accuracy,error_rate rows plus a confusion block.
void emit_csv(const MetricsReport& report, const std::string& path);
MetricsReport read_metrics_csv(const std::string& path);

}  // namespace augmod
