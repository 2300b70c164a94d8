#include "augmod/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace augmod {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// points on the unit circle, listed in angular order starting at `offset`
std::vector<std::complex<double>> psk_points(int order, double offset) {
  std::vector<std::complex<double>> pts;
  pts.reserve(order);
  for (int k = 0; k < order; ++k) {
    const double a = offset + 2.0 * kPi * k / order;
    pts.emplace_back(std::cos(a), std::sin(a));
  }
  return pts;
}

std::vector<std::complex<double>> grid_points(const std::vector<double>& re_levels,
                                              const std::vector<double>& im_levels) {
  std::vector<std::complex<double>> pts;
  pts.reserve(re_levels.size() * im_levels.size());
  for (double re : re_levels)
    for (double im : im_levels) pts.emplace_back(re, im);
  return pts;
}

std::vector<std::complex<double>> raw_points(ModulationScheme scheme) {
  switch (scheme) {
    case ModulationScheme::Bpsk:
      return {{1.0, 0.0}, {-1.0, 0.0}};
    case ModulationScheme::Qpsk:
      return psk_points(4, kPi / 4.0);
    case ModulationScheme::Psk8:
      return psk_points(8, 0.0);
    case ModulationScheme::Qam8:
      return grid_points({-3, -1, 1, 3}, {-1, 1});
    case ModulationScheme::Qam16:
      return grid_points({-3, -1, 1, 3}, {-3, -1, 1, 3});
    case ModulationScheme::Qam32: {
      // 6x6 cross constellation: full grid minus the four corners
      auto pts = grid_points({-5, -3, -1, 1, 3, 5}, {-5, -3, -1, 1, 3, 5});
      std::vector<std::complex<double>> kept;
      kept.reserve(32);
      for (const auto& p : pts)
        if (!(std::abs(p.real()) == 5.0 && std::abs(p.imag()) == 5.0)) kept.push_back(p);
      return kept;
    }
    case ModulationScheme::Qam64:
      return grid_points({-7, -5, -3, -1, 1, 3, 5, 7}, {-7, -5, -3, -1, 1, 3, 5, 7});
  }
  throw std::invalid_argument("unknown modulation scheme");
}

}  // namespace

const std::array<ModulationScheme, kNumSchemes>& all_schemes() {
  static const std::array<ModulationScheme, kNumSchemes> schemes{
      ModulationScheme::Bpsk,  ModulationScheme::Qpsk,  ModulationScheme::Psk8,
      ModulationScheme::Qam8,  ModulationScheme::Qam16, ModulationScheme::Qam32,
      ModulationScheme::Qam64};
  return schemes;
}

const char* scheme_name(ModulationScheme scheme) {
  switch (scheme) {
    case ModulationScheme::Bpsk: return "BPSK";
    case ModulationScheme::Qpsk: return "QPSK";
    case ModulationScheme::Psk8: return "PSK8";
    case ModulationScheme::Qam8: return "QAM8";
    case ModulationScheme::Qam16: return "QAM16";
    case ModulationScheme::Qam32: return "QAM32";
    case ModulationScheme::Qam64: return "QAM64";
  }
  throw std::invalid_argument("unknown modulation scheme");
}

ModulationScheme scheme_from_name(const std::string& name) {
  for (ModulationScheme s : all_schemes())
    if (name == scheme_name(s)) return s;
  throw std::invalid_argument("unknown modulation scheme: " + name);
}

int scheme_order(ModulationScheme scheme) {
  switch (scheme) {
    case ModulationScheme::Bpsk: return 2;
    case ModulationScheme::Qpsk: return 4;
    case ModulationScheme::Psk8: return 8;
    case ModulationScheme::Qam8: return 8;
    case ModulationScheme::Qam16: return 16;
    case ModulationScheme::Qam32: return 32;
    case ModulationScheme::Qam64: return 64;
  }
  throw std::invalid_argument("unknown modulation scheme");
}

double Constellation::mean_energy() const {
  double e = 0.0;
  for (const auto& p : points) e += std::norm(p);
  return e / static_cast<double>(points.size());
}

Constellation constellation(ModulationScheme scheme) {
  Constellation c{raw_points(scheme)};
  const double scale = 1.0 / std::sqrt(c.mean_energy());
  for (auto& p : c.points) p *= scale;
  return c;
}

}  // namespace augmod
