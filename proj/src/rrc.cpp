#include "augmod/rrc.hpp"

#include <cmath>

namespace augmod {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
// window around the removable singularities where the closed form loses
// precision to cancellation; inside it the analytic limit is returned
constexpr double kSingularTol = 1e-8;
}  // namespace

double rrc_pulse(double t, double beta) {
  const double at = std::fabs(t);

  if (at < kSingularTol) return 1.0 + beta * (4.0 / kPi - 1.0);

  const double ts = 1.0 / (4.0 * beta);  // second singular point
  if (std::fabs(at - ts) < kSingularTol) {
    const double s = std::sin(kPi * ts);
    const double c = std::cos(kPi * ts);
    return (beta / std::sqrt(2.0)) * ((1.0 + 2.0 / kPi) * s + (1.0 - 2.0 / kPi) * c);
  }

  const double four_bt = 4.0 * beta * at;
  const double num = std::sin(kPi * at * (1.0 - beta)) + four_bt * std::cos(kPi * at * (1.0 + beta));
  const double den = kPi * at * (1.0 - four_bt * four_bt);
  return num / den;
}

double rrc_pulse_truncated(double t, double beta) {
  if (std::fabs(t) > kRrcSpan) return 0.0;
  return rrc_pulse(t, beta);
}

}  // namespace augmod
