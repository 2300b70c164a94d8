#include <doctest.h>

#include <cmath>
#include <limits>

#include "augmod/nn/adam.hpp"

using namespace augmod;
using nn::AdamState;
using nn::MatX;
using nn::ParamBlob;
using nn::VecX;

namespace {

template <typename Scalar>
std::vector<ParamBlob<Scalar>> scalar_param(Scalar value) {
  ParamBlob<Scalar> p{MatX<Scalar>::Constant(1, 1, value), VecX<Scalar>::Zero(0)};
  return {p};
}

}  // namespace

TEST_CASE("first step moves by ~lr regardless of the gradient magnitude") {
  for (double g : {0.01, 0.5, 250.0}) {
    auto params = scalar_param<double>(1.0);
    auto grads = scalar_param<double>(g);
    auto state = AdamState<double>::like(params);
    nn::adam_step(params, grads, state, 0.1, 0.9, 0.999, 1e-7);
    // bias-corrected m=g, v=g^2 at t=1 -> step = lr * g / (|g| + eps)
    const double step = 1.0 - params[0].w(0, 0);
    CHECK(step == doctest::Approx(0.1).epsilon(1e-4));
    CHECK(step > 0.0);  // -sign(gradient) direction for positive g
  }
  // negative gradient moves the other way
  auto params = scalar_param<double>(1.0);
  auto grads = scalar_param<double>(-3.0);
  auto state = AdamState<double>::like(params);
  nn::adam_step(params, grads, state, 0.1, 0.9, 0.999, 1e-7);
  CHECK(params[0].w(0, 0) > 1.0);
}

TEST_CASE("zero gradient leaves parameters untouched") {
  auto params = scalar_param<float>(2.5f);
  auto grads = scalar_param<float>(0.0f);
  auto state = AdamState<float>::like(params);
  for (int i = 0; i < 10; ++i) nn::adam_step(params, grads, state, 0.1f, 0.9f, 0.999f, 1e-7f);
  CHECK(params[0].w(0, 0) == 2.5f);
}

TEST_CASE("minimizes (w-3)^2 from w=0 and tracks the scalar recurrence oracle") {
  auto params = scalar_param<double>(0.0);
  auto state = AdamState<double>::like(params);

  // independent scalar Adam recurrence as the oracle
  double w_oracle = 0.0, m = 0.0, v = 0.0;
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-7;

  for (int t = 1; t <= 500; ++t) {
    const double g = 2.0 * (params[0].w(0, 0) - 3.0);
    auto grads = scalar_param<double>(g);
    nn::adam_step(params, grads, state, lr, b1, b2, eps);

    const double g_oracle = 2.0 * (w_oracle - 3.0);
    m = b1 * m + (1 - b1) * g_oracle;
    v = b2 * v + (1 - b2) * g_oracle * g_oracle;
    w_oracle -= lr * (m / (1 - std::pow(b1, t))) / (std::sqrt(v / (1 - std::pow(b2, t))) + eps);
    CHECK(params[0].w(0, 0) == doctest::Approx(w_oracle).epsilon(1e-10));
  }
  CHECK(std::fabs(params[0].w(0, 0) - 3.0) < 1e-2);
}

TEST_CASE("non-finite gradients abort the step with a diagnostic") {
  auto params = scalar_param<float>(1.0f);
  auto grads = scalar_param<float>(std::numeric_limits<float>::quiet_NaN());
  auto state = AdamState<float>::like(params);
  CHECK_THROWS_AS(nn::adam_step(params, grads, state, 0.1f, 0.9f, 0.999f, 1e-7f),
                  std::runtime_error);
  CHECK(params[0].w(0, 0) == 1.0f);  // untouched
}

TEST_CASE("mismatched shapes are rejected") {
  auto params = scalar_param<float>(1.0f);
  std::vector<ParamBlob<float>> grads{
      ParamBlob<float>{MatX<float>::Zero(2, 2), VecX<float>::Zero(0)}};
  auto state = AdamState<float>::like(params);
  CHECK_THROWS_AS(nn::adam_step(params, grads, state, 0.1f, 0.9f, 0.999f, 1e-7f),
                  std::invalid_argument);
}
