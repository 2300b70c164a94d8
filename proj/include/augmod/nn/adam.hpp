#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "augmod/nn/network.hpp"

namespace augmod::nn {

template <typename Scalar>
struct AdamState {
  std::vector<ParamBlob<Scalar>> m, v;
  std::int64_t t = 0;

  static AdamState like(const std::vector<ParamBlob<Scalar>>& params) {
    AdamState s;
    s.m.reserve(params.size());
    s.v.reserve(params.size());
    for (const auto& p : params) {
      s.m.push_back({MatX<Scalar>::Zero(p.w.rows(), p.w.cols()), VecX<Scalar>::Zero(p.b.size())});
      s.v.push_back({MatX<Scalar>::Zero(p.w.rows(), p.w.cols()), VecX<Scalar>::Zero(p.b.size())});
    }
    return s;
  }
};

// One bias-corrected Adam update. Non-finite gradients abort the step.
template <typename Scalar>
void adam_step(std::vector<ParamBlob<Scalar>>& params, const std::vector<ParamBlob<Scalar>>& grads,
               AdamState<Scalar>& state, Scalar lr, Scalar beta1, Scalar beta2, Scalar eps) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: parameter/gradient/state size mismatch");
  for (const auto& g : grads)
    if (!g.w.allFinite() || !g.b.allFinite())
      throw std::runtime_error("adam_step: non-finite gradient, aborting the update");

  state.t += 1;
  const Scalar bc1 = Scalar(1) - std::pow(beta1, Scalar(state.t));
  const Scalar bc2 = Scalar(1) - std::pow(beta2, Scalar(state.t));

  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = beta1 * m + (Scalar(1) - beta1) * g;
    v.array() = beta2 * v.array() + (Scalar(1) - beta2) * g.array().square();
    p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
  };

  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].w.rows() != grads[i].w.rows() || params[i].w.cols() != grads[i].w.cols() ||
        params[i].b.size() != grads[i].b.size())
      throw std::invalid_argument("adam_step: gradient shape mismatch");
    update(params[i].w, grads[i].w, state.m[i].w, state.v[i].w);
    update(params[i].b, grads[i].b, state.m[i].b, state.v[i].b);
  }
}

}  // namespace augmod::nn
