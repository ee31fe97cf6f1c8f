#include "talbotlau/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "talbotlau/errors.hpp"
#include "talbotlau/parallel.hpp"

namespace talbot {

Interferometer Interferometer::c70_default() {
  Interferometer ifm;
  ifm.species = Species::c70();
  GratingSpec g;
  g.period = 991.25e-9;
  g.open_fraction = 0.48;
  g.thickness = 500e-9;
  g.c3 = ifm.species.c3_gold;
  g.edge_cutoff = 1e-9;
  ifm.gratings = {g, g, g};
  return ifm;
}

void Interferometer::validate() const {
  species.validate();
  geometry.require_symmetric();
  for (const auto& g : gratings) g.validate();
  const double d = gratings[1].period;
  for (const auto& g : gratings)
    if (std::abs(g.period - d) > 1e-12 * d)
      throw DomainError("all three gratings must share the same period");
  if (numerics.k_max < 1) throw ConfigError("numerics.k_max must be >= 1");
  if (numerics.n_max < 2 * numerics.k_max)
    throw ConfigError("numerics.n_max must be at least 2 * k_max");
  if (static_cast<std::size_t>(numerics.n_max) > numerics.samples_per_period / 2 - 1)
    throw ConfigError("numerics.n_max must be below samples_per_period / 2");
  if (!(oven_temperature > 0.0)) throw DomainError("oven temperature must be positive");
}

double Interferometer::talbot_parameter(double v) const {
  return geometry.L1 / talbot_length(period(), de_broglie_wavelength(species.mass, v));
}

GratingSpec Interferometer::coherent_grating(bool vdw) const {
  return vdw ? gratings[1] : gratings[1].without_interaction();
}

double FringeSpectrum::signal(double x) const {
  double s = harmonics.at(0).real();
  const double base = 2.0 * constants::pi * x / period;
  for (std::size_t k = 1; k < harmonics.size(); ++k)
    s += 2.0 * (harmonics[k] * std::polar(1.0, base * static_cast<double>(k))).real();
  return s;
}

double FringeSpectrum::visibility() const {
  if (harmonics.size() < 2) return 0.0;
  return 2.0 * std::abs(harmonics[1]) / harmonics[0].real();
}

double FringeSpectrum::contrast(std::size_t grid) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < grid; ++i) {
    const double s = signal(period * static_cast<double>(i) / static_cast<double>(grid));
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return (hi - lo) / (hi + lo);
}

double FringeSpectrum::phase() const { return std::arg(harmonics.at(1)); }

double FringeSpectrum::min_signal(std::size_t grid) const {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid; ++i)
    lo = std::min(lo, signal(period * static_cast<double>(i) / static_cast<double>(grid)));
  return lo;
}

TalbotCoefficients talbot_coefficients(const FourierSpectrum& b, double xi, int m_max) {
  if (!(xi >= 0.0)) throw DomainError("talbot_coefficients: xi must be non-negative");
  if (m_max < 0) throw ConfigError("talbot_coefficients: m_max must be non-negative");
  TalbotCoefficients out;
  out.m_max = m_max;
  out.xi = xi;
  out.coeffs.assign(static_cast<std::size_t>(2 * m_max + 1), complex{0.0, 0.0});
  const int n_max = b.n_max;
  for (int m = -m_max; m <= m_max; ++m) {
    complex sum{0.0, 0.0};
    if (m == 0) {
      sum = b.total_power;
    } else {
      const int lo = std::max(-n_max, m - n_max);
      const int hi = std::min(n_max, m + n_max);
      // exp(-i pi m (2n - m) xi / 2) advances by exp(-i pi m xi) per step in n.
      const auto phase_at = [&](int n) {
        const double turns = std::fmod(static_cast<double>(m) * (2.0 * n - m) * xi * 0.25, 1.0);
        return std::polar(1.0, -2.0 * constants::pi * turns);
      };
      const complex step = phase_at(1) * std::conj(phase_at(0));
      complex rot;
      for (int n = lo; n <= hi; ++n) {
        if ((n - lo) % 256 == 0) rot = phase_at(n);
        sum += b[n] * std::conj(b[n - m]) * rot;
        rot *= step;
      }
    }
    out.coeffs[static_cast<std::size_t>(m + m_max)] = sum;
  }
  return out;
}

double gravity_phase(const Geometry& geom, double period, double v) {
  if (!(v > 0.0)) throw DomainError("gravity_phase: velocity must be positive");
  return 2.0 * constants::pi * geom.L1 * geom.L1 * geom.g * geom.tilt_alpha / (period * v * v);
}

FringeSpectrum fringe_spectrum(const FourierSpectrum& source, const TalbotCoefficients& B,
                               const FourierSpectrum& detector, double grav_phase,
                               double period) {
  const int k_max = B.m_max / 2;
  if (k_max < 1) throw ConfigError("fringe_spectrum: Talbot coefficients need m_max >= 2");
  if (source.n_max < k_max || detector.n_max < k_max)
    throw ConfigError("fringe_spectrum: intensity spectra shorter than the requested harmonics");
  FringeSpectrum s;
  s.period = period;
  s.harmonics.resize(static_cast<std::size_t>(k_max + 1));
  for (int k = 0; k <= k_max; ++k)
    s.harmonics[static_cast<std::size_t>(k)] = source[-k] * B[2 * k] * detector[-k] *
                                               std::polar(1.0, grav_phase * k);
  return s;
}

namespace {

struct GratingStack {
  FourierSpectrum source;
  FourierSpectrum detector;
  std::optional<FourierSpectrum> fixed_coherent;  // velocity independent when c3 = 0
};

GratingStack make_stack(const Interferometer& ifm, bool vdw) {
  GratingStack st;
  const int k = ifm.numerics.k_max;
  st.source = intensity_coeffs(ifm.gratings[0], k);
  st.detector = intensity_coeffs(ifm.gratings[2], k);
  const GratingSpec g2 = ifm.coherent_grating(vdw);
  if (g2.c3 == 0.0) {
    // Any velocity gives the same binary window.
    st.fixed_coherent = fourier_coeffs(
        build_transmission(g2, 1.0, ifm.numerics.samples_per_period), ifm.numerics.n_max);
  }
  return st;
}

FringeSpectrum spectrum_at(const Interferometer& ifm, const GratingStack& st, double v, bool vdw) {
  const FourierSpectrum b =
      st.fixed_coherent
          ? *st.fixed_coherent
          : fourier_coeffs(build_transmission(ifm.coherent_grating(vdw), v,
                                              ifm.numerics.samples_per_period),
                           ifm.numerics.n_max);
  const auto B = talbot_coefficients(b, ifm.talbot_parameter(v), 2 * ifm.numerics.k_max);
  return fringe_spectrum(st.source, B, st.detector, gravity_phase(ifm.geometry, ifm.period(), v),
                         ifm.period());
}

}  // namespace

FringeSpectrum monochromatic_spectrum(const Interferometer& ifm, double v, bool vdw) {
  ifm.validate();
  if (!(v > 0.0)) throw DomainError("monochromatic_spectrum: velocity must be positive");
  return spectrum_at(ifm, make_stack(ifm, vdw), v, vdw);
}

double monochromatic_visibility(const Interferometer& ifm, double v, bool vdw) {
  return monochromatic_spectrum(ifm, v, vdw).visibility();
}

AveragedFringe velocity_averaged(const Interferometer& ifm, const VelocityDistribution& dist,
                                 bool vdw) {
  ifm.validate();
  VelocityDistribution d = dist;
  if (!(d.source.mass > 0.0)) d.source = ifm.source();
  const VelocityGrid grid = discretize(d, ifm.numerics.velocity_nodes);
  if (grid.velocities.empty()) throw DomainError("velocity distribution is empty");

  const GratingStack st = make_stack(ifm, vdw);
  const auto spectra = parallel_map<FringeSpectrum>(
      grid.velocities.size(), ifm.numerics.threads,
      [&](std::size_t i) { return spectrum_at(ifm, st, grid.velocities[i], vdw); });

  AveragedFringe out;
  out.spectrum.period = ifm.period();
  out.spectrum.harmonics.assign(spectra.front().harmonics.size(), complex{0.0, 0.0});
  for (std::size_t i = 0; i < spectra.size(); ++i)
    for (std::size_t k = 0; k < out.spectrum.harmonics.size(); ++k)
      out.spectrum.harmonics[k] += grid.weights[i] * spectra[i].harmonics[k];
  out.visibility = out.spectrum.visibility();
  out.flux = out.spectrum.flux() * relative_flux(d, ifm.numerics.velocity_nodes);
  return out;
}

VisibilityCurve visibility_curve(const Interferometer& ifm, std::span<const double> centers,
                                 const DistributionModel& model, bool vdw) {
  if (centers.empty()) throw DomainError("visibility_curve: no velocity centers given");
  for (double c : centers)
    if (!(c > 0.0)) throw DomainError("visibility_curve: centers must be positive");
  DistributionModel m = model;
  if (!(m.source.mass > 0.0)) m.source = ifm.source();

  // Parallelism lives inside each average; centers run in order.
  VisibilityCurve curve;
  curve.points.reserve(centers.size());
  for (double c : centers) {
    const auto avg = velocity_averaged(ifm, m.at(c), vdw);
    curve.points.push_back({c, avg.visibility, avg.flux});
  }
  return curve;
}

}  // namespace talbot
