#include "talbotlau/grating.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "talbotlau/core.hpp"
#include "talbotlau/errors.hpp"
#include "talbotlau/fft.hpp"

namespace talbot {

void GratingSpec::validate() const {
  if (!(period > 0.0)) throw DomainError("grating.period must be positive");
  if (!(open_fraction > 0.0 && open_fraction < 1.0))
    throw DomainError("grating.open_fraction must be in (0, 1)");
  if (!(thickness > 0.0)) throw DomainError("grating.thickness must be positive");
  if (!(c3 >= 0.0)) throw DomainError("grating.c3 must be non-negative");
  if (!(edge_cutoff >= 0.0 && edge_cutoff < wall_distance()))
    throw DomainError("grating.edge_cutoff must be in [0, f d / 2)");
}

double SampledTransmission::mean_intensity() const {
  double s = 0.0;
  for (const auto& z : samples) s += std::norm(z);
  return samples.empty() ? 0.0 : s / static_cast<double>(samples.size());
}

double FourierSpectrum::stored_power() const {
  return std::accumulate(coeffs.begin(), coeffs.end(), 0.0,
                         [](double acc, const complex& c) { return acc + std::norm(c); });
}

double vdw_time_integral(const GratingSpec& spec, double x, double v) {
  if (!(v > 0.0)) throw DomainError("vdw_time_integral: velocity must be positive");
  if (!(std::abs(x) < spec.open_half_width()))
    throw DomainError("vdw_time_integral: position " + std::to_string(x) +
                      " m is outside the open slit");
  if (spec.c3 == 0.0) return 0.0;
  const double a = spec.wall_distance();
  const double left = a + x;
  const double right = a - x;
  return -(spec.thickness / v) * spec.c3 *
         (1.0 / (right * right * right) + 1.0 / (left * left * left));
}

double vdw_phase(const GratingSpec& spec, double x, double v) {
  return -vdw_time_integral(spec, x, v) / constants::hbar;
}

SampledTransmission build_transmission(const GratingSpec& spec, double v, std::size_t samples) {
  spec.validate();
  if (!(v > 0.0)) throw DomainError("build_transmission: velocity must be positive");
  if (samples < 4096 || !fft::is_power_of_two(samples))
    throw ConfigError("build_transmission: sample count must be a power of two >= 4096");

  SampledTransmission t;
  t.period = spec.period;
  t.velocity = v;
  t.samples.assign(samples, complex{0.0, 0.0});
  const double open = spec.open_half_width();
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = t.position(i);
    if (std::abs(x) >= open) continue;
    t.samples[i] = std::polar(1.0, vdw_phase(spec, x, v));
  }
  return t;
}

FourierSpectrum fourier_coeffs(const SampledTransmission& t, int n_max) {
  const auto n = t.samples.size();
  if (n_max < 0 || static_cast<std::size_t>(n_max) > n / 2 - 1)
    throw ConfigError("fourier_coeffs: n_max must be in [0, N/2 - 1]");

  std::vector<complex> work = t.samples;
  fft::transform(work, fft::Direction::forward);

  FourierSpectrum spec;
  spec.n_max = n_max;
  spec.coeffs.resize(static_cast<std::size_t>(2 * n_max + 1));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int order = -n_max; order <= n_max; ++order) {
    // x_i = -d/2 + i d/N contributes exp(i pi n) relative to the plain DFT.
    const auto idx = static_cast<std::size_t>((order % static_cast<long>(n) + static_cast<long>(n)) %
                                              static_cast<long>(n));
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    spec.coeffs[static_cast<std::size_t>(order + n_max)] = sign * work[idx] * inv_n;
  }
  spec.total_power = t.mean_intensity();
  return spec;
}

FourierSpectrum intensity_coeffs(const GratingSpec& spec, int n_max) {
  spec.validate();
  if (n_max < 0) throw ConfigError("intensity_coeffs: n_max must be non-negative");
  const double f = spec.effective_open_fraction();
  FourierSpectrum s;
  s.n_max = n_max;
  s.coeffs.resize(static_cast<std::size_t>(2 * n_max + 1));
  for (int order = -n_max; order <= n_max; ++order) {
    const double value = order == 0
                             ? f
                             : std::sin(constants::pi * order * f) / (constants::pi * order);
    s.coeffs[static_cast<std::size_t>(order + n_max)] = {value, 0.0};
  }
  s.total_power = f;
  return s;
}

}  // namespace talbot
