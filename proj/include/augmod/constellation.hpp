#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace augmod {

// Class order is fixed; it defines the label indices in dataset files.
enum class ModulationScheme { Bpsk, Qpsk, Psk8, Qam8, Qam16, Qam32, Qam64 };

inline constexpr int kNumSchemes = 7;

const std::array<ModulationScheme, kNumSchemes>& all_schemes();
const char* scheme_name(ModulationScheme scheme);
ModulationScheme scheme_from_name(const std::string& name);
int scheme_order(ModulationScheme scheme);  // constellation point count

struct Constellation {
  std::vector<std::complex<double>> points;

  double mean_energy() const;
};

// Point set of the scheme, scaled to unit mean symbol energy. Deterministic.
Constellation constellation(ModulationScheme scheme);

}  // namespace augmod
