#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace talbot {

using complex = std::complex<double>;

/// One free-standing grating. `c3` is the molecule-wall C3 coefficient; zero
/// makes the grating purely absorptive. Molecules closer than `edge_cutoff` to
/// a wall are removed from the beam.
struct GratingSpec {
  double period = 991.25e-9;     // m
  double open_fraction = 0.48;
  double thickness = 500e-9;     // m
  double c3 = 0.0;               // J m^3
  double edge_cutoff = 1e-9;     // m

  void validate() const;

  /// Distance from the slit center to either wall.
  double wall_distance() const { return 0.5 * open_fraction * period; }
  /// Half width of the transmitted band after the edge cutoff.
  double open_half_width() const { return wall_distance() - edge_cutoff; }
  double effective_open_fraction() const {
    return open_fraction - 2.0 * edge_cutoff / period;
  }
  GratingSpec without_interaction() const {
    GratingSpec g = *this;
    g.c3 = 0.0;
    return g;
  }
};

/// Complex transmission sampled over one period [-d/2, d/2).
struct SampledTransmission {
  std::vector<complex> samples;
  double period = 0.0;
  double velocity = 0.0;

  std::size_t size() const { return samples.size(); }
  double position(std::size_t i) const {
    return -0.5 * period + static_cast<double>(i) * period / static_cast<double>(samples.size());
  }
  double mean_intensity() const;
};

/// Fourier coefficients c_n, n in [-n_max, n_max], of a periodic function
/// f(x) = sum_n c_n exp(2 pi i n x / d). `total_power` is the mean of |f|^2
/// over a period, i.e. the Parseval sum over all orders, not only the stored
/// ones.
struct FourierSpectrum {
  std::vector<complex> coeffs;
  int n_max = 0;
  double total_power = 0.0;

  /// Coefficient of order n; zero outside the stored range.
  complex operator[](int n) const {
    if (n < -n_max || n > n_max) return {0.0, 0.0};
    return coeffs[static_cast<std::size_t>(n + n_max)];
  }
  double stored_power() const;
};

/// Time integral of the wall potential along a straight transit through the
/// slit at transverse position x (J s). Negative: the interaction is attractive.
double vdw_time_integral(const GratingSpec& spec, double x, double v);

/// Eikonal phase imprinted at x, -vdw_time_integral / hbar.
double vdw_phase(const GratingSpec& spec, double x, double v);

/// Binary window times exp(i vdw_phase). `samples` must be a power of two and
/// at least 4096.
SampledTransmission build_transmission(const GratingSpec& spec, double v, std::size_t samples);

FourierSpectrum fourier_coeffs(const SampledTransmission& t, int n_max);

/// Closed-form coefficients of |t|^2 for the binary window (phase drops out).
FourierSpectrum intensity_coeffs(const GratingSpec& spec, int n_max);

}  // namespace talbot
