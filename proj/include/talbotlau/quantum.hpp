#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "talbotlau/beamline.hpp"
#include "talbotlau/core.hpp"
#include "talbotlau/grating.hpp"

namespace talbot {

struct Numerics {
  std::size_t samples_per_period = 65536;
  int n_max = 512;           // grating-2 diffraction orders kept in B_m
  int k_max = 8;             // detector signal harmonics
  std::size_t velocity_nodes = 65;
  unsigned threads = 1;
};

/// Species, three gratings, layout and numerical resolution. Only grating 2
/// acts coherently; gratings 1 and 3 enter through their intensity windows.
struct Interferometer {
  Species species;
  std::array<GratingSpec, 3> gratings;
  Geometry geometry;
  Numerics numerics;
  double oven_temperature = 923.15;  // K

  static Interferometer c70_default();

  void validate() const;
  double period() const { return gratings[1].period; }
  /// xi = L1 / L_T at velocity v.
  double talbot_parameter(double v) const;
  EffusiveSource source() const { return {species.mass, oven_temperature}; }
  /// Grating 2 with the wall interaction switched on or off.
  GratingSpec coherent_grating(bool vdw) const;
};

/// B_m(xi) for m in [-m_max, m_max].
struct TalbotCoefficients {
  std::vector<complex> coeffs;
  int m_max = 0;
  double xi = 0.0;

  complex operator[](int m) const {
    if (m < -m_max || m > m_max) return {0.0, 0.0};
    return coeffs[static_cast<std::size_t>(m + m_max)];
  }
};

/// Detector signal S(x) = S_0 + 2 sum_k Re(S_k exp(2 pi i k x / d)) as a
/// function of the grating-3 shift x.
struct FringeSpectrum {
  std::vector<complex> harmonics;  // k = 0..k_max
  double period = 0.0;

  double flux() const { return harmonics.at(0).real(); }
  double signal(double x) const;
  /// First-harmonic visibility 2 |S_1| / S_0.
  double visibility() const;
  /// (max - min) / (max + min) of the reconstructed signal.
  double contrast(std::size_t grid = 1024) const;
  double phase() const;
  double min_signal(std::size_t grid = 1024) const;
};

struct AveragedFringe {
  FringeSpectrum spectrum;
  double visibility = 0.0;
  double flux = 0.0;  // <S_0> times the selected fraction of the source flux
};

struct VisibilityPoint {
  double v_center = 0.0;
  double visibility = 0.0;
  double flux = 0.0;
};

struct VisibilityCurve {
  std::vector<VisibilityPoint> points;
};

/// B_m = sum_n b_n conj(b_{n-m}) exp(-i pi m (2n - m) xi / 2). B_0 is the
/// total power of the grating, including orders beyond b.n_max.
TalbotCoefficients talbot_coefficients(const FourierSpectrum& b, double xi, int m_max);

/// Fringe phase from the in-plane gravity component g * alpha.
double gravity_phase(const Geometry& geom, double period, double v);

/// S_k = A_{-k} B_{2k} C_{-k} exp(i k grav_phase) for k = 0..B.m_max / 2.
FringeSpectrum fringe_spectrum(const FourierSpectrum& source, const TalbotCoefficients& B,
                               const FourierSpectrum& detector, double grav_phase,
                               double period);

FringeSpectrum monochromatic_spectrum(const Interferometer& ifm, double v, bool vdw);

double monochromatic_visibility(const Interferometer& ifm, double v, bool vdw);

/// Incoherent velocity average of S_k (gravity phase evaluated per velocity).
AveragedFringe velocity_averaged(const Interferometer& ifm, const VelocityDistribution& dist,
                                 bool vdw);

VisibilityCurve visibility_curve(const Interferometer& ifm, std::span<const double> centers,
                                 const DistributionModel& model, bool vdw);

}  // namespace talbot
