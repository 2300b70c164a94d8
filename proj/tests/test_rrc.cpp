#include <doctest.h>

#include <cmath>

#include "augmod/rng.hpp"
#include "augmod/rrc.hpp"

using namespace augmod;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("value at t=0 equals the analytic limit") {
  for (double beta : {0.1, 0.22, 0.35, 0.5}) {
    const double limit = 1.0 + beta * (4.0 / kPi - 1.0);
    CHECK(rrc_pulse(0.0, beta) == doctest::Approx(limit).epsilon(1e-14));
    // numeric limit cross-check from both sides
    CHECK(rrc_pulse(1e-6, beta) == doctest::Approx(limit).epsilon(1e-9));
    CHECK(rrc_pulse(-1e-6, beta) == doctest::Approx(limit).epsilon(1e-9));
  }
}

TEST_CASE("even in t") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double beta = rng.uniform(0.1, 0.5);
    const double t = rng.uniform(-10.0, 10.0);
    CHECK(rrc_pulse(t, beta) == rrc_pulse(-t, beta));
  }
}

TEST_CASE("finite at the quarter-period singularity, matching the limit from both sides") {
  for (double beta : {0.1, 0.25, 0.4, 0.5}) {
    const double ts = 1.0 / (4.0 * beta);
    const double at_singularity = rrc_pulse(ts, beta);
    CHECK(std::isfinite(at_singularity));

    // L'Hopital limit value
    const double expected = (beta / std::sqrt(2.0)) *
                            ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * beta)) +
                             (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * beta)));
    CHECK(at_singularity == doctest::Approx(expected).epsilon(1e-12));

    for (double h : {1e-4, 1e-5, 1e-6}) {
      CHECK(rrc_pulse(ts + h, beta) == doctest::Approx(at_singularity).epsilon(1e-3 * h / 1e-6));
      CHECK(rrc_pulse(ts - h, beta) == doctest::Approx(at_singularity).epsilon(1e-3 * h / 1e-6));
    }
  }
}

TEST_CASE("truncated pulse vanishes outside the span") {
  CHECK(rrc_pulse_truncated(kRrcSpan + 1e-9, 0.3) == 0.0);
  CHECK(rrc_pulse_truncated(-kRrcSpan - 1e-9, 0.3) == 0.0);
  CHECK(rrc_pulse_truncated(kRrcSpan - 0.25, 0.3) == rrc_pulse(kRrcSpan - 0.25, 0.3));
  CHECK(rrc_pulse_truncated(0.0, 0.3) == rrc_pulse(0.0, 0.3));
}
