#pragma once

#include <cmath>
#include <functional>

#include "augmod/nn/network.hpp"
#include "augmod/rng.hpp"

namespace testutil {

// Relative error with a floor so near-zero pairs compare absolutely. The
// floor sits above the central-difference noise floor (~eps*|loss|/h) while a
// genuine wiring bug still shows up at the gradient's own magnitude.
inline double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({1e-5, std::fabs(a), std::fabs(b)});
}

// central finite difference through an arbitrary scalar objective
inline double central_diff(double& slot, const std::function<double()>& f, double h = 1e-5) {
  const double saved = slot;
  slot = saved + h;
  const double up = f();
  slot = saved - h;
  const double down = f();
  slot = saved;
  return (up - down) / (2.0 * h);
}

// Error of one analytic gradient entry against finite differences. The
// default step can straddle a ReLU kink, which biases the estimate even when
// the gradient is right; a disagreeing probe is re-measured at smaller steps.
// A genuine backward bug disagrees at every step size.
inline double fd_rel_err(double& slot, double analytic, const std::function<double()>& f) {
  double best = rel_err(analytic, central_diff(slot, f, 1e-5));
  for (double h : {1e-6, 1e-7}) {
    if (best <= 1e-4) break;
    best = std::min(best, rel_err(analytic, central_diff(slot, f, h)));
  }
  return best;
}

// max relative error between an analytic gradient tensor and finite
// differences of `objective` taken through the tensor's storage
inline double max_grad_rel_err(augmod::nn::MatX<double>& values,
                               const augmod::nn::MatX<double>& analytic,
                               const std::function<double()>& objective) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    worst = std::max(worst, fd_rel_err(values.data()[i], analytic.data()[i], objective));
  return worst;
}

inline augmod::nn::MatX<double> random_signal(Eigen::Index rows, Eigen::Index cols,
                                              augmod::Rng& rng, double scale = 1.0) {
  augmod::nn::MatX<double> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * (2.0 * rng.uniform() - 1.0);
  return m;
}

}  // namespace testutil
