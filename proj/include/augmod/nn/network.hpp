#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "augmod/nn/layers.hpp"

namespace augmod::nn {

template <typename Scalar>
struct ParamBlob {
  MatX<Scalar> w;
  VecX<Scalar> b;
};

enum class Architecture { Lcnn, Lrcnn };

// 1x1 expansion h, then two kernel-7 convolutions with ReLU whose output is
// added back onto h. No activation after the expansion or after the sum.
template <typename Scalar>
MatX<Scalar> residual_block_forward(const MatX<Scalar>& x, const ParamBlob<Scalar>& expand,
                                    const ParamBlob<Scalar>& conv_a,
                                    const ParamBlob<Scalar>& conv_b) {
  const MatX<Scalar> h = conv1d_forward(x, expand.w, expand.b);
  const MatX<Scalar> u = relu(MatX<Scalar>(conv1d_forward(h, conv_a.w, conv_a.b)));
  const MatX<Scalar> v = relu(MatX<Scalar>(conv1d_forward(u, conv_b.w, conv_b.b)));
  return h + v;
}

const char* architecture_name(Architecture arch);
Architecture architecture_from_name(const std::string& name);

// Architecture description. The layer table fully determines the parameter
// shapes; nothing in it depends on the signal length.
struct ModelConfig {
  Architecture arch = Architecture::Lcnn;
  int n_classes = 0;
  std::vector<LayerSpec> layers;
};

// A model instance: layer table plus parameter blobs in canonical order
// (convolutions and dense layers in table order; a residual block contributes
// its 1x1 expansion, then the two kernel-7 convolutions).
//
// Forward/backward are hand-wired per layer kind. The input is a [2 x N_s]
// matrix; any N_s >= 1 runs against the same weights.
template <typename Scalar>
class Network {
 public:
  Network() = default;

  explicit Network(ModelConfig config) : config_(std::move(config)) {
    if (config_.n_classes < 2) throw std::invalid_argument("model needs >= 2 classes");
    int channels = kInputChannels;
    for (const LayerSpec& l : config_.layers) {
      l.validate();
      switch (l.kind) {
        case LayerKind::Conv1d:
          require(l.in_channels == channels, "conv1d input width mismatch");
          slots_.push_back(make_blob(l.out_channels, l.in_channels * l.kernel));
          channels = l.out_channels;
          break;
        case LayerKind::Dense:
          require(l.in_channels == channels, "dense input width mismatch");
          slots_.push_back(make_blob(l.out_channels, l.in_channels));
          channels = l.out_channels;
          break;
        case LayerKind::Residual:
          require(l.in_channels == channels, "residual input width mismatch");
          slots_.push_back(make_blob(l.out_channels, l.in_channels * 1));
          slots_.push_back(make_blob(l.out_channels, l.out_channels * 7));
          slots_.push_back(make_blob(l.out_channels, l.out_channels * 7));
          channels = l.out_channels;
          break;
        default:
          break;
      }
    }
    require(channels == config_.n_classes, "final layer width must equal n_classes");
    require(!config_.layers.empty() && config_.layers.back().kind == LayerKind::Softmax,
            "model must end in a softmax layer");
  }

  const ModelConfig& config() const { return config_; }
  std::vector<ParamBlob<Scalar>>& params() { return slots_; }
  const std::vector<ParamBlob<Scalar>>& params() const { return slots_; }

  std::int64_t parameter_count() const { return param_count(config_.layers); }

  // Glorot uniform for convolutions (fans counted as channels x kernel),
  // He normal for dense layers, zero biases. Consumes rng in canonical order.
  void init_weights(Rng& rng) {
    std::size_t slot = 0;
    for (const LayerSpec& l : config_.layers) {
      switch (l.kind) {
        case LayerKind::Conv1d:
          fill_glorot_uniform(slots_[slot].w, static_cast<Eigen::Index>(l.in_channels) * l.kernel,
                              static_cast<Eigen::Index>(l.out_channels) * l.kernel, rng);
          slots_[slot].b.setZero();
          ++slot;
          break;
        case LayerKind::Dense:
          fill_he_normal(slots_[slot].w, l.in_channels, rng);
          slots_[slot].b.setZero();
          ++slot;
          break;
        case LayerKind::Residual:
          fill_glorot_uniform(slots_[slot].w, l.in_channels, l.out_channels, rng);
          slots_[slot].b.setZero();
          for (int c = 1; c <= 2; ++c) {
            fill_glorot_uniform(slots_[slot + c].w, static_cast<Eigen::Index>(l.out_channels) * 7,
                                static_cast<Eigen::Index>(l.out_channels) * 7, rng);
            slots_[slot + c].b.setZero();
          }
          slot += 3;
          break;
        default:
          break;
      }
    }
  }

  // Inference probabilities (dropout off). Same weights serve any N_s >= 1.
  VecX<Scalar> predict(const MatX<Scalar>& iq) const {
    check_input(iq);
    return run_forward(iq, false, nullptr, nullptr, false).col(0);
  }

  std::vector<ParamBlob<Scalar>> make_grads() const {
    std::vector<ParamBlob<Scalar>> g;
    g.reserve(slots_.size());
    for (const auto& s : slots_) g.push_back(make_blob(s.w.rows(), s.w.cols()));
    return g;
  }

  // Loss under the fused softmax-cross-entropy head; fills `grads` (shaped
  // like params) with this example's parameter gradients. Thread-safe across
  // examples: the network is read-only here.
  Scalar loss_and_grad(const MatX<Scalar>& iq, int label, bool training, Rng* dropout_rng,
                       std::vector<ParamBlob<Scalar>>& grads, VecX<Scalar>* probs_out = nullptr) const {
    check_input(iq);
    Trace trace;
    MatX<Scalar> logits = run_forward(iq, training, dropout_rng, &trace, true);
    auto [loss, grad_logits] = softmax_cross_entropy(VecX<Scalar>(logits.col(0)), label);
    if (probs_out) {
      *probs_out = grad_logits;
      (*probs_out)[label] += Scalar(1);
    }
    MatX<Scalar> grad = grad_logits;
    run_backward(std::move(grad), trace, grads);
    return loss;
  }

  // Forward-only loss (used by finite-difference checks).
  Scalar loss_value(const MatX<Scalar>& iq, int label, bool training = false,
                    Rng* dropout_rng = nullptr) const {
    check_input(iq);
    MatX<Scalar> logits = run_forward(iq, training, dropout_rng, nullptr, true);
    return softmax_cross_entropy(VecX<Scalar>(logits.col(0)), label).first;
  }

  static constexpr int kInputChannels = 2;

 private:
  struct Trace {
    std::vector<MatX<Scalar>> saved;
    std::vector<Eigen::Index> pooled_steps;

    MatX<Scalar> pop() {
      MatX<Scalar> m = std::move(saved.back());
      saved.pop_back();
      return m;
    }
  };

  static ParamBlob<Scalar> make_blob(Eigen::Index rows, Eigen::Index cols) {
    return {MatX<Scalar>::Zero(rows, cols), VecX<Scalar>::Zero(rows)};
  }

  static void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
  }

  void check_input(const MatX<Scalar>& iq) const {
    if (iq.rows() != kInputChannels || iq.cols() < 1)
      throw std::invalid_argument("model input must be a [2 x N_s] matrix with N_s >= 1");
    if (!iq.allFinite()) throw std::invalid_argument("model input contains non-finite values");
  }

  MatX<Scalar> run_forward(const MatX<Scalar>& input, bool training, Rng* dropout_rng, Trace* trace,
                           bool stop_before_softmax) const {
    MatX<Scalar> cur = input;
    std::size_t slot = 0;
    for (const LayerSpec& l : config_.layers) {
      switch (l.kind) {
        case LayerKind::Conv1d: {
          if (trace) trace->saved.push_back(cur);
          cur = conv1d_forward(cur, slots_[slot].w, slots_[slot].b);
          ++slot;
          break;
        }
        case LayerKind::Relu: {
          if (trace) trace->saved.push_back(cur);
          cur = relu(cur);
          break;
        }
        case LayerKind::GlobalAvgPool: {
          if (trace) trace->pooled_steps.push_back(cur.cols());
          cur = global_avg_pool(cur);
          break;
        }
        case LayerKind::Dense: {
          if (trace) trace->saved.push_back(cur);
          MatX<Scalar> y;
          y.noalias() = slots_[slot].w * cur;
          y.colwise() += slots_[slot].b;
          cur = std::move(y);
          ++slot;
          break;
        }
        case LayerKind::Dropout: {
          MatX<Scalar> mask;
          cur = dropout_forward(cur, l.rate, training, dropout_rng, &mask);
          if (trace) trace->saved.push_back(std::move(mask));
          break;
        }
        case LayerKind::Softmax: {
          if (!stop_before_softmax) cur = softmax(VecX<Scalar>(cur.col(0)));
          break;
        }
        case LayerKind::Residual: {
          const auto& expand = slots_[slot];
          const auto& conv_a = slots_[slot + 1];
          const auto& conv_b = slots_[slot + 2];
          MatX<Scalar> h = conv1d_forward(cur, expand.w, expand.b);  // 1x1, no activation
          MatX<Scalar> a = conv1d_forward(h, conv_a.w, conv_a.b);
          MatX<Scalar> u = relu(a);
          MatX<Scalar> bc = conv1d_forward(u, conv_b.w, conv_b.b);
          MatX<Scalar> v = relu(bc);
          if (trace) {
            trace->saved.push_back(std::move(cur));
            trace->saved.push_back(h);
            trace->saved.push_back(std::move(a));
            trace->saved.push_back(std::move(u));
            trace->saved.push_back(std::move(bc));
          }
          cur = h + v;
          slot += 3;
          break;
        }
      }
    }
    return cur;
  }

  void run_backward(MatX<Scalar> grad, Trace& trace, std::vector<ParamBlob<Scalar>>& grads) const {
    std::size_t slot = slots_.size();
    for (auto it = config_.layers.rbegin(); it != config_.layers.rend(); ++it) {
      const LayerSpec& l = *it;
      switch (l.kind) {
        case LayerKind::Softmax:
          break;  // fused into the loss
        case LayerKind::Dropout: {
          MatX<Scalar> mask = trace.pop();
          grad = dropout_backward(grad, mask);
          break;
        }
        case LayerKind::Dense: {
          MatX<Scalar> x = trace.pop();
          --slot;
          grads[slot].w.noalias() = grad * x.transpose();
          grads[slot].b = grad.rowwise().sum();
          MatX<Scalar> gx;
          gx.noalias() = slots_[slot].w.transpose() * grad;
          grad = std::move(gx);
          break;
        }
        case LayerKind::GlobalAvgPool: {
          const Eigen::Index steps = trace.pooled_steps.back();
          trace.pooled_steps.pop_back();
          grad = global_avg_pool_backward(VecX<Scalar>(grad.col(0)), steps);
          break;
        }
        case LayerKind::Relu: {
          MatX<Scalar> x = trace.pop();
          grad = relu_backward(grad, x);
          break;
        }
        case LayerKind::Conv1d: {
          MatX<Scalar> x = trace.pop();
          --slot;
          MatX<Scalar> gx;
          conv1d_backward(grad, x, slots_[slot].w, gx, grads[slot].w, grads[slot].b);
          grad = std::move(gx);
          break;
        }
        case LayerKind::Residual: {
          MatX<Scalar> bc = trace.pop();
          MatX<Scalar> u = trace.pop();
          MatX<Scalar> a = trace.pop();
          MatX<Scalar> h = trace.pop();
          MatX<Scalar> x = trace.pop();
          slot -= 3;
          const auto& expand = slots_[slot];
          const auto& conv_a = slots_[slot + 1];
          const auto& conv_b = slots_[slot + 2];

          MatX<Scalar> g_bc = relu_backward(grad, bc);  // grad also feeds the skip path below
          MatX<Scalar> g_u;
          conv1d_backward(g_bc, u, conv_b.w, g_u, grads[slot + 2].w, grads[slot + 2].b);
          MatX<Scalar> g_a = relu_backward(g_u, a);
          MatX<Scalar> g_h;
          conv1d_backward(g_a, h, conv_a.w, g_h, grads[slot + 1].w, grads[slot + 1].b);
          g_h += grad;  // skip connection
          MatX<Scalar> gx;
          conv1d_backward(g_h, x, expand.w, gx, grads[slot].w, grads[slot].b);
          grad = std::move(gx);
          break;
        }
      }
    }
  }

  ModelConfig config_;
  std::vector<ParamBlob<Scalar>> slots_;
};

}  // namespace augmod::nn
