#include "augmod/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "augmod/rrc.hpp"

namespace augmod {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

bool on_snr_grid(double snr_db) {
  for (double s : snr_grid_db())
    if (snr_db == s) return true;
  return false;
}

}  // namespace

void ImpairmentParams::validate() const {
  if (!(sampling_ratio >= 0.3 && sampling_ratio <= 0.5))
    throw std::invalid_argument("sampling_ratio outside [0.3, 0.5]: " + std::to_string(sampling_ratio));
  if (!(phase >= 0.0 && phase <= kTwoPi))  // Table I lists the closed interval
    throw std::invalid_argument("phase outside [0, 2pi]: " + std::to_string(phase));
  if (!(delay >= 0.0 && delay <= 1.0))
    throw std::invalid_argument("delay outside [0, 1]: " + std::to_string(delay));
  if (!(rolloff >= 0.1 && rolloff <= 0.5))
    throw std::invalid_argument("rolloff outside [0.1, 0.5]: " + std::to_string(rolloff));
  if (!on_snr_grid(snr_db))
    throw std::invalid_argument("snr_db not on the {0,10,20,30,40} grid: " + std::to_string(snr_db));
  const double af = std::fabs(freq_offset);
  if (!(freq_offset == 0.0 || (af >= 1e-6 && af <= 0.5)))
    throw std::invalid_argument("freq_offset magnitude outside {0} U [1e-6, 0.5]: " +
                                std::to_string(freq_offset));
}

ImpairmentParams sample_impairments(Rng& rng, bool freq_offset_enabled, double snr_db) {
  if (!on_snr_grid(snr_db))
    throw std::invalid_argument("snr_db not on the {0,10,20,30,40} grid: " + std::to_string(snr_db));
  ImpairmentParams p;
  p.sampling_ratio = rng.uniform(0.3, 0.5);
  p.phase = rng.uniform(0.0, kTwoPi);
  p.delay = rng.uniform();
  p.rolloff = rng.uniform(0.1, 0.5);
  p.snr_db = snr_db;
  if (freq_offset_enabled) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double u = rng.uniform(-6.0, std::log10(0.5));  // log-uniform magnitude
    p.freq_offset = sign * std::pow(10.0, u);
  } else {
    p.freq_offset = 0.0;
  }
  return p;
}

double IqFrame::rms() const {
  return std::sqrt(iq.cast<double>().array().square().sum() / static_cast<double>(iq.cols()));
}

std::vector<std::complex<double>> draw_symbols(const Constellation& c, std::size_t count, Rng& rng) {
  std::vector<std::complex<double>> out;
  out.reserve(count);
  const std::uint64_t order = c.points.size();
  for (std::size_t i = 0; i < count; ++i) out.push_back(c.points[rng.below(order)]);
  return out;
}

long symbol_index_min() { return static_cast<long>(std::floor(-kRrcSpan)); }

long symbol_index_max(Eigen::Index n_samples, double sampling_ratio, double delay) {
  return static_cast<long>(std::ceil(static_cast<double>(n_samples) * sampling_ratio + delay + kRrcSpan));
}

Eigen::ArrayXcd shape_symbols(const std::vector<std::complex<double>>& symbols, long k_min,
                              double sampling_ratio, double delay, double rolloff,
                              Eigen::Index n_samples) {
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(n_samples);
  const long n_symbols = static_cast<long>(symbols.size());
  for (Eigen::Index n = 0; n < n_samples; ++n) {
    const double tn = static_cast<double>(n) * sampling_ratio - delay;
    // only symbols whose truncated pulse covers tn contribute
    const long lo = std::max(k_min, static_cast<long>(std::ceil(tn - kRrcSpan)));
    const long hi = std::min(k_min + n_symbols - 1, static_cast<long>(std::floor(tn + kRrcSpan)));
    std::complex<double> acc{0.0, 0.0};
    for (long k = lo; k <= hi; ++k)
      acc += symbols[static_cast<std::size_t>(k - k_min)] * rrc_pulse_truncated(tn - k, rolloff);
    out[n] = acc;
  }
  return out;
}

SynthParts synthesize_parts(ModulationScheme scheme, const ImpairmentParams& params,
                            Eigen::Index n_samples, Rng& rng) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  params.validate();

  const Constellation c = constellation(scheme);
  const long k_min = symbol_index_min();
  const long k_max = symbol_index_max(n_samples, params.sampling_ratio, params.delay);
  const auto symbols = draw_symbols(c, static_cast<std::size_t>(k_max - k_min + 1), rng);

  SynthParts parts;
  parts.clean =
      shape_symbols(symbols, k_min, params.sampling_ratio, params.delay, params.rolloff, n_samples);

  const std::complex<double> rot{std::cos(params.phase), std::sin(params.phase)};
  for (Eigen::Index n = 0; n < n_samples; ++n) {
    const double drift = kTwoPi * params.freq_offset * static_cast<double>(n);
    parts.clean[n] *= rot * std::complex<double>{std::cos(drift), std::sin(drift)};
  }

  const double signal_power = parts.clean.abs2().sum() / static_cast<double>(n_samples);
  const double noise_power = signal_power * std::pow(10.0, -params.snr_db / 10.0);
  const double sigma = std::sqrt(noise_power / 2.0);  // per real component
  parts.noise.resize(n_samples);
  for (Eigen::Index n = 0; n < n_samples; ++n) {
    const double re = sigma * rng.normal();
    const double im = sigma * rng.normal();
    parts.noise[n] = {re, im};
  }
  return parts;
}

IqFrame synthesize(ModulationScheme scheme, const ImpairmentParams& params, Eigen::Index n_samples,
                   Rng& rng) {
  SynthParts parts = synthesize_parts(scheme, params, n_samples, rng);
  Eigen::ArrayXcd s = parts.clean + parts.noise;
  const double rms = std::sqrt(s.abs2().sum() / static_cast<double>(n_samples));
  s /= rms;

  IqFrame frame;
  frame.iq.resize(2, n_samples);
  for (Eigen::Index n = 0; n < n_samples; ++n) {
    frame.iq(0, n) = static_cast<float>(s[n].real());
    frame.iq(1, n) = static_cast<float>(s[n].imag());
  }
  return frame;
}

}  // namespace augmod
