#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "augmod/rng.hpp"

namespace augmod::nn {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// ---------------------------------------------------------------------------
// layer descriptions

enum class LayerKind { Conv1d, Dense, Relu, GlobalAvgPool, Dropout, Softmax, Residual };

// One entry of a model's layer table. Residual stands for the three-conv
// block: 1x1 expansion plus two kernel-7 convolutions added back onto it.
struct LayerSpec {
  LayerKind kind = LayerKind::Relu;
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  double rate = 0.0;

  static LayerSpec conv1d(int in, int out, int kernel) {
    return {LayerKind::Conv1d, in, out, kernel, 0.0};
  }
  static LayerSpec dense(int in, int out) { return {LayerKind::Dense, in, out, 0, 0.0}; }
  static LayerSpec relu() { return {LayerKind::Relu, 0, 0, 0, 0.0}; }
  static LayerSpec global_avg_pool() { return {LayerKind::GlobalAvgPool, 0, 0, 0, 0.0}; }
  static LayerSpec dropout(double rate) { return {LayerKind::Dropout, 0, 0, 0, rate}; }
  static LayerSpec softmax() { return {LayerKind::Softmax, 0, 0, 0, 0.0}; }
  static LayerSpec residual(int in, int out) { return {LayerKind::Residual, in, out, 7, 0.0}; }

  void validate() const {
    if (kind == LayerKind::Conv1d && kernel != 1 && kernel != 7)
      throw std::invalid_argument("conv1d kernel size must be 1 or 7");
    if (kind == LayerKind::Dropout && !(rate >= 0.0 && rate < 1.0))
      throw std::invalid_argument("dropout rate must be in [0,1)");
    if ((kind == LayerKind::Conv1d || kind == LayerKind::Dense || kind == LayerKind::Residual) &&
        (in_channels < 1 || out_channels < 1))
      throw std::invalid_argument("layer width must be positive");
  }
};

const char* layer_kind_name(LayerKind kind);
LayerKind layer_kind_from_name(const std::string& name);

// Trainable scalars: in*out*k+out per convolution, in*out+out per dense layer.
std::int64_t param_count(const std::vector<LayerSpec>& layers);

// ---------------------------------------------------------------------------
// convolution, cross-correlation convention, zero "same" padding

// Patch matrix: u(c*k + j, t) = x(c, t + j - (k-1)/2), zero outside [0, T).
template <typename Scalar>
MatX<Scalar> im2col(const MatX<Scalar>& x, Eigen::Index k) {
  const Eigen::Index channels = x.rows();
  const Eigen::Index steps = x.cols();
  const Eigen::Index pad = (k - 1) / 2;
  MatX<Scalar> u = MatX<Scalar>::Zero(channels * k, steps);
  for (Eigen::Index c = 0; c < channels; ++c) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::Index shift = j - pad;
      const Eigen::Index t0 = std::max<Eigen::Index>(0, -shift);
      const Eigen::Index t1 = std::min<Eigen::Index>(steps, steps - shift);
      if (t1 > t0) u.row(c * k + j).segment(t0, t1 - t0) = x.row(c).segment(t0 + shift, t1 - t0);
    }
  }
  return u;
}

// x: [C_in x T], w: [C_out x C_in*K], b: [C_out] -> [C_out x T]
template <typename Scalar>
MatX<Scalar> conv1d_forward(const MatX<Scalar>& x, const MatX<Scalar>& w, const VecX<Scalar>& b) {
  if (x.rows() < 1 || x.cols() < 1) throw std::invalid_argument("conv1d: empty input");
  if (w.cols() % x.rows() != 0)
    throw std::invalid_argument("conv1d: weight columns not a multiple of input channels");
  const Eigen::Index k = w.cols() / x.rows();
  if (k % 2 == 0) throw std::invalid_argument("conv1d: kernel size must be odd");
  if (b.size() != w.rows()) throw std::invalid_argument("conv1d: bias/output channel mismatch");
  MatX<Scalar> y;
  y.noalias() = w * im2col(x, k);
  y.colwise() += b;
  return y;
}

template <typename Scalar>
void conv1d_backward(const MatX<Scalar>& grad_out, const MatX<Scalar>& x, const MatX<Scalar>& w,
                     MatX<Scalar>& grad_x, MatX<Scalar>& grad_w, VecX<Scalar>& grad_b) {
  if (grad_out.rows() != w.rows() || grad_out.cols() != x.cols())
    throw std::invalid_argument("conv1d_backward: gradient shape mismatch");
  if (w.cols() % x.rows() != 0)
    throw std::invalid_argument("conv1d_backward: weight/input channel mismatch");
  const Eigen::Index k = w.cols() / x.rows();
  const Eigen::Index pad = (k - 1) / 2;
  const Eigen::Index channels = x.rows();
  const Eigen::Index steps = x.cols();

  grad_b = grad_out.rowwise().sum();
  grad_w.noalias() = grad_out * im2col(x, k).transpose();

  MatX<Scalar> v;
  v.noalias() = w.transpose() * grad_out;  // [C_in*K x T]
  grad_x = MatX<Scalar>::Zero(channels, steps);
  for (Eigen::Index c = 0; c < channels; ++c) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::Index shift = j - pad;
      const Eigen::Index t0 = std::max<Eigen::Index>(0, -shift);
      const Eigen::Index t1 = std::min<Eigen::Index>(steps, steps - shift);
      if (t1 > t0)
        grad_x.row(c).segment(t0 + shift, t1 - t0) += v.row(c * k + j).segment(t0, t1 - t0);
    }
  }
}

// ---------------------------------------------------------------------------
// pointwise and pooling layers

template <typename Scalar>
MatX<Scalar> relu(const MatX<Scalar>& x) {
  return x.cwiseMax(Scalar(0));
}

// subgradient 0 at exactly 0
template <typename Scalar>
MatX<Scalar> relu_backward(const MatX<Scalar>& grad_out, const MatX<Scalar>& x) {
  if (grad_out.rows() != x.rows() || grad_out.cols() != x.cols())
    throw std::invalid_argument("relu_backward: shape mismatch");
  return (x.array() > Scalar(0)).select(grad_out.array(), Scalar(0)).matrix();
}

template <typename Scalar>
VecX<Scalar> global_avg_pool(const MatX<Scalar>& x) {
  if (x.cols() < 1) throw std::invalid_argument("global_avg_pool: empty time axis");
  return x.rowwise().mean();
}

template <typename Scalar>
MatX<Scalar> global_avg_pool_backward(const VecX<Scalar>& grad_out, Eigen::Index steps) {
  if (steps < 1) throw std::invalid_argument("global_avg_pool_backward: empty time axis");
  return (grad_out / Scalar(steps)).replicate(1, steps);
}

template <typename Scalar>
VecX<Scalar> dense_forward(const VecX<Scalar>& x, const MatX<Scalar>& w, const VecX<Scalar>& b) {
  if (w.cols() != x.size() || w.rows() != b.size())
    throw std::invalid_argument("dense: shape mismatch");
  return w * x + b;
}

template <typename Scalar>
void dense_backward(const VecX<Scalar>& grad_out, const VecX<Scalar>& x, const MatX<Scalar>& w,
                    VecX<Scalar>& grad_x, MatX<Scalar>& grad_w, VecX<Scalar>& grad_b) {
  if (grad_out.size() != w.rows() || x.size() != w.cols())
    throw std::invalid_argument("dense_backward: shape mismatch");
  grad_w.noalias() = grad_out * x.transpose();
  grad_b = grad_out;
  grad_x.noalias() = w.transpose() * grad_out;
}

// Inverted dropout: survivors are scaled by 1/(1-rate) so inference is the
// identity. The mask holds the applied per-element scale.
template <typename Scalar>
MatX<Scalar> dropout_forward(const MatX<Scalar>& x, double rate, bool training, Rng* rng,
                             MatX<Scalar>* mask_out = nullptr) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout rate must be in [0,1)");
  if (!training || rate == 0.0) {
    if (mask_out) mask_out->resize(0, 0);
    return x;
  }
  if (!rng) throw std::invalid_argument("dropout: training mode needs an rng");
  const Scalar keep_scale = Scalar(1.0 / (1.0 - rate));
  MatX<Scalar> mask(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    mask.data()[i] = rng->uniform() >= rate ? keep_scale : Scalar(0);
  MatX<Scalar> y = x.cwiseProduct(mask);
  if (mask_out) *mask_out = std::move(mask);
  return y;
}

template <typename Scalar>
MatX<Scalar> dropout_backward(const MatX<Scalar>& grad_out, const MatX<Scalar>& mask) {
  if (mask.size() == 0) return grad_out;  // inference mask: identity
  return grad_out.cwiseProduct(mask);
}

// ---------------------------------------------------------------------------
// classification head

template <typename Scalar>
VecX<Scalar> softmax(const VecX<Scalar>& logits) {
  const Scalar m = logits.maxCoeff();
  VecX<Scalar> p = (logits.array() - m).exp();
  return p / p.sum();
}

// Returns (loss, grad wrt logits); loss = -log p[label], grad = p - onehot.
template <typename Scalar>
std::pair<Scalar, VecX<Scalar>> softmax_cross_entropy(const VecX<Scalar>& logits, int label) {
  if (logits.size() < 2) throw std::invalid_argument("softmax_cross_entropy: need >= 2 classes");
  if (label < 0 || label >= logits.size())
    throw std::out_of_range("softmax_cross_entropy: label out of range");
  const Scalar m = logits.maxCoeff();
  VecX<Scalar> z = logits.array() - m;
  const Scalar lse = std::log(z.array().exp().sum());
  VecX<Scalar> grad = (z.array() - lse).exp();
  const Scalar loss = lse - z[label];
  grad[label] -= Scalar(1);
  return {loss, std::move(grad)};
}

// ---------------------------------------------------------------------------
// initializers; values are drawn in Eigen storage order

template <typename Scalar>
void fill_glorot_uniform(MatX<Scalar>& w, Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w.data()[i] = static_cast<Scalar>(rng.uniform(-bound, bound));
}

template <typename Scalar>
void fill_he_normal(MatX<Scalar>& w, Eigen::Index fan_in, Rng& rng) {
  const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w.data()[i] = static_cast<Scalar>(sd * rng.normal());
}

}  // namespace augmod::nn
