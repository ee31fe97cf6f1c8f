#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "talbotlau/quantum.hpp"

namespace talbot {

/// Resolution of the brute-force Fresnel integral. All sample counts are per
/// grating period and must be powers of two.
struct OracleSettings {
  std::size_t grating_samples = 32768;
  std::size_t source_samples = 64;
  std::size_t screen_samples = 1024;
  std::size_t shifts = 64;
  /// The sum over grating-2 periods is tapered at a radius holding this many
  /// diffraction orders.
  int aperture_orders = 1024;
  /// Allowed visibility change when every sample count is doubled.
  double doubling_tolerance = 0.005;

  void validate() const;
  OracleSettings doubled() const;
};

struct OracleResult {
  FringeSpectrum spectrum;
  std::vector<double> shifts;  // m
  std::vector<double> signal;  // S(shift), same normalization as fringe_spectrum
  /// Flux scattered beyond the aperture, restored as a flat background.
  double background = 0.0;
};

/// Point sources across grating 1, paraxial propagation to grating 2, sampled
/// complex transmission, propagation to grating 3, intensity, then overlap
/// with the shifted grating-3 window. Shifts may be arbitrary.
OracleResult fresnel_signal(const Interferometer& ifm, double v, bool vdw,
                            const OracleSettings& settings, std::span<const double> shifts);

/// Signal on `settings.shifts` uniform shifts over one period and its harmonics.
OracleResult fresnel_oracle(const Interferometer& ifm, double v, bool vdw,
                            const OracleSettings& settings = {});

struct OracleComparison {
  double velocity = 0.0;
  bool vdw = false;
  double fourier_visibility = 0.0;
  double oracle_visibility = 0.0;
  double doubled_visibility = 0.0;

  double difference() const;
  double doubling_change() const;
};

/// Runs the oracle at `settings` and at doubled resolution and compares with
/// the Fourier method. Throws OracleFailure when the doubling test fails.
OracleComparison compare_with_oracle(const Interferometer& ifm, double v, bool vdw,
                                     const OracleSettings& settings = {});

}  // namespace talbot
