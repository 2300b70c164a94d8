#pragma once

namespace augmod {

// Half-width, in symbol periods, of the truncated pulse used for shaping.
inline constexpr double kRrcSpan = 8.0;

// Root-raised-cosine impulse response with symbol period 1 and roll-off beta
// in (0,1). Even in t; the removable singularities at t = 0 and |t| = 1/(4*beta)
// evaluate to their analytic limits.
double rrc_pulse(double t, double beta);

// Pulse truncated to |t| <= kRrcSpan, as used by the synthesizer.
double rrc_pulse_truncated(double t, double beta);

}  // namespace augmod
