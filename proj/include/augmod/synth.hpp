#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "augmod/constellation.hpp"
#include "augmod/rng.hpp"

namespace augmod {

inline const std::vector<double>& snr_grid_db() {
  static const std::vector<double> grid{0.0, 10.0, 20.0, 30.0, 40.0};
  return grid;
}

// One sampled point of the channel/demodulator model attached to every example.
struct ImpairmentParams {
  double sampling_ratio = 0.4;  // T_sample / T_symbol
  double phase = 0.0;           // radians
  double delay = 0.0;           // fraction of one symbol period
  double rolloff = 0.3;         // RRC roll-off
  double snr_db = 40.0;
  double freq_offset = 0.0;     // cycles per sample; 0 when the impairment is off

  // throws std::invalid_argument when any field is outside its range
  void validate() const;
};

// Draws everything but the SNR, which comes from the grid. Draw order is part
// of the determinism contract: ratio, phase, delay, rolloff, then offset.
ImpairmentParams sample_impairments(Rng& rng, bool freq_offset_enabled, double snr_db);

// Complex baseband signal stored as two aligned float rows: row 0 = I, row 1 = Q.
struct IqFrame {
  Eigen::Matrix2Xf iq;

  Eigen::Index samples() const { return iq.cols(); }
  double rms() const;
};

std::vector<std::complex<double>> draw_symbols(const Constellation& c, std::size_t count, Rng& rng);

// First symbol index contributing to a frame; spans the truncated pulse support.
long symbol_index_min();
long symbol_index_max(Eigen::Index n_samples, double sampling_ratio, double delay);

// Pulse-shaping core: out[n] = sum_k symbols[k - k_min] * g(n*r - k - delay),
// with g the truncated RRC at the given roll-off.
Eigen::ArrayXcd shape_symbols(const std::vector<std::complex<double>>& symbols, long k_min,
                              double sampling_ratio, double delay, double rolloff,
                              Eigen::Index n_samples);

// Shaped/rotated signal and the additive noise, both before normalization.
struct SynthParts {
  Eigen::ArrayXcd clean;
  Eigen::ArrayXcd noise;
};

SynthParts synthesize_parts(ModulationScheme scheme, const ImpairmentParams& params,
                            Eigen::Index n_samples, Rng& rng);

// Full pipeline: shape, rotate, drift, add noise, normalize to unit RMS.
// Bit-reproducible for a fixed rng stream.
IqFrame synthesize(ModulationScheme scheme, const ImpairmentParams& params, Eigen::Index n_samples,
                   Rng& rng);

}  // namespace augmod
