#include "talbotlau/classical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>

#include "talbotlau/errors.hpp"
#include "talbotlau/fft.hpp"
#include "talbotlau/parallel.hpp"

namespace talbot {

namespace {

using constants::pi;

constexpr std::array<double, 8> gl_nodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> gl_weights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

double window_integral(double y, double a, double d) {
  const double k = std::floor((y + 0.5 * d) / d);
  return k * 2.0 * a + std::clamp(y - k * d, -a, a);
}

bool in_window(double y, double a, double d) { return std::abs(y - d * std::round(y / d)) < a; }

// Ray geometry through grating 2 at x: landing position on grating 3 is
// x (1 + r) - r x0 + deflection(x).
struct RayMap {
  double r = 1.0;
  double K = 0.0;  // deflection = K [(A - x)^-4 - (A + x)^-4]
  double A = 0.0;

  double deflection(double x) const {
    if (K == 0.0) return 0.0;
    return K * (std::pow(A - x, -4) - std::pow(A + x, -4));
  }
  double slope(double x) const {
    double s = 1.0 + r;
    if (K != 0.0) s += 4.0 * K * (std::pow(A - x, -5) + std::pow(A + x, -5));
    return s;
  }
};

RayMap ray_map(const Interferometer& ifm, double v, bool vdw) {
  const GratingSpec g2 = ifm.coherent_grating(vdw);
  RayMap m;
  m.r = ifm.geometry.L2 / ifm.geometry.L1;
  m.A = g2.wall_distance();
  m.K = 3.0 * g2.thickness * g2.c3 * ifm.geometry.L2 / (ifm.species.mass * v * v);
  return m;
}

struct Node {
  double x;
  double w;
};

// Gauss-Legendre nodes on [0, a2] following the local fringe phase, plus the
// length of the rapidly oscillating remainder next to the wall.
std::vector<Node> half_slit_nodes(const RayMap& map, double a2, double d, const RayBundleSpec& rays,
                                  double& tail) {
  std::vector<Node> nodes;
  const double k = 2.0 * pi / d;
  double x = 0.0;
  tail = 0.0;
  while (x < a2) {
    const double grad = k * map.slope(x);
    if (1.0 / grad < rays.tail_tolerance * 2.0 * a2) {
      tail = a2 - x;
      break;
    }
    double h = std::min({rays.max_panel_width, rays.phase_step / grad, a2 - x});
    const double grad_end = k * map.slope(x + h);
    h = std::min(h, rays.phase_step / grad_end);
    for (std::size_t i = 0; i < gl_nodes.size(); ++i)
      nodes.push_back({x + 0.5 * h * (1.0 + gl_nodes[i]), 0.5 * h * gl_weights[i]});
    x += h;
  }
  return nodes;
}

}  // namespace

void RayBundleSpec::validate() const {
  if (!(max_panel_width > 0.0)) throw ConfigError("classical.max_panel_nm must be positive");
  if (!(phase_step > 0.0)) throw ConfigError("classical.phase_step_rad must be positive");
  if (!(tail_tolerance > 0.0 && tail_tolerance < 0.1))
    throw ConfigError("classical.tail_tolerance must be in (0, 0.1)");
  if (shifts < 4) throw ConfigError("classical.shifts must be >= 4");
  if (mode == RayIntegration::monte_carlo && mc_rays < 1024)
    throw ConfigError("classical.mc_rays must be >= 1024");
}

RayBundleSpec RayBundleSpec::refined() const {
  RayBundleSpec r = *this;
  r.max_panel_width *= 0.5;
  r.phase_step *= 0.5;
  r.tail_tolerance *= 0.5;
  r.mc_rays *= 4;
  return r;
}

double vdw_kick(const GratingSpec& spec2, double x, double v, double mass) {
  spec2.validate();
  if (!(v > 0.0) || !(mass > 0.0)) throw DomainError("vdw_kick: velocity and mass must be positive");
  if (!(std::abs(x) < spec2.open_half_width()))
    throw DomainError("vdw_kick: position lies in the blocked or cutoff region");
  const double A = spec2.wall_distance();
  return 3.0 * spec2.thickness * spec2.c3 / (mass * v) *
         (std::pow(A - x, -4) - std::pow(A + x, -4));
}

std::vector<double> classical_signal(const Interferometer& ifm, double v, bool vdw,
                                     std::span<const double> shifts, const RayBundleSpec& rays) {
  ifm.validate();
  rays.validate();
  if (!(v > 0.0)) throw DomainError("classical_signal: velocity must be positive");
  const double d = ifm.period();
  const double a1 = ifm.gratings[0].open_half_width();
  const double a2 = ifm.gratings[1].open_half_width();
  const double a3 = ifm.gratings[2].open_half_width();
  const RayMap map = ray_map(ifm, v, vdw);
  const double r = map.r;
  std::vector<double> out(shifts.size(), 0.0);

  if (rays.mode == RayIntegration::monte_carlo) {
    std::mt19937_64 rng(rays.seed);
    std::uniform_real_distribution<double> src(-a1, a1), mid(-a2, a2);
    std::vector<std::size_t> hits(shifts.size(), 0);
    for (std::size_t n = 0; n < rays.mc_rays; ++n) {
      const double x0 = src(rng);
      const double x1 = mid(rng);
      const double x2 = x1 * (1.0 + r) - r * x0 + map.deflection(x1);
      for (std::size_t l = 0; l < shifts.size(); ++l)
        if (in_window(x2 - shifts[l], a3, d)) ++hits[l];
    }
    const double scale = 4.0 * a1 * a2 / (d * d * static_cast<double>(rays.mc_rays));
    for (std::size_t l = 0; l < shifts.size(); ++l) out[l] = scale * static_cast<double>(hits[l]);
    return out;
  }

  double tail = 0.0;
  const auto nodes = half_slit_nodes(map, a2, d, rays, tail);
  for (std::size_t l = 0; l < shifts.size(); ++l) {
    const double s = shifts[l];
    double acc = 0.0;
    for (const Node& n : nodes) {
      for (double x : {n.x, -n.x}) {
        const double c = x * (1.0 + r) + map.deflection(x) - s;
        acc += n.w * (window_integral(c + r * a1, a3, d) - window_integral(c - r * a1, a3, d));
      }
    }
    acc /= r;
    acc += 2.0 * tail * 2.0 * a1 * 2.0 * a3 / d;
    out[l] = acc / (d * d);
  }
  return out;
}

FringeSpectrum classical_spectrum(const Interferometer& ifm, double v, bool vdw,
                                  const RayBundleSpec& rays) {
  const auto k_max = static_cast<std::size_t>(ifm.numerics.k_max);
  const double d = ifm.period();
  FringeSpectrum s;
  s.period = d;
  s.harmonics.resize(k_max + 1);

  if (rays.mode == RayIntegration::monte_carlo) {
    const std::size_t M = rays.shifts;
    if (M < 2 * k_max + 1) throw ConfigError("classical.shifts must exceed twice numerics.k_max");
    std::vector<double> shifts(M);
    for (std::size_t l = 0; l < M; ++l) shifts[l] = d * static_cast<double>(l) / static_cast<double>(M);
    const auto signal = classical_signal(ifm, v, vdw, shifts, rays);
    std::vector<complex> dft(signal.begin(), signal.end());
    fft::transform(dft, fft::Direction::forward);
    for (std::size_t k = 0; k <= k_max; ++k) s.harmonics[k] = dft[k] / static_cast<double>(M);
    return s;
  }

  // S(shift) = d^-2 int dx1 g(c(x1) - shift), where g is the grating-3 window
  // averaged over the source slit. Its Fourier coefficients are closed form,
  // so each harmonic needs only the x1 integral of exp(-2 pi i k c / d).
  ifm.validate();
  rays.validate();
  if (!(v > 0.0)) throw DomainError("classical_spectrum: velocity must be positive");
  const double a1 = ifm.gratings[0].open_half_width();
  const double a2 = ifm.gratings[1].open_half_width();
  const double a3 = ifm.gratings[2].open_half_width();
  const RayMap map = ray_map(ifm, v, vdw);
  double tail = 0.0;
  const auto nodes = half_slit_nodes(map, a2, d, rays, tail);

  // c(-x) = -c(x), so the two half slits combine into 2 cos(k theta).
  std::vector<double> J(k_max + 1, 0.0);
  for (const Node& n : nodes) {
    const double theta = 2.0 * pi * (n.x * (1.0 + map.r) + map.deflection(n.x)) / d;
    const double c1 = std::cos(theta);
    double prev = 1.0, cur = c1;
    J[0] += 2.0 * n.w;
    for (std::size_t k = 1; k <= k_max; ++k) {
      J[k] += 2.0 * n.w * cur;
      const double next = 2.0 * c1 * cur - prev;
      prev = cur;
      cur = next;
    }
  }
  J[0] += 2.0 * tail;
  for (std::size_t k = 0; k <= k_max; ++k) {
    double g = 2.0 * a1 * 2.0 * a3 / d;
    if (k > 0) {
      const double kd = static_cast<double>(k);
      g = std::sin(2.0 * pi * kd * a3 / d) / (pi * kd) * d * std::sin(2.0 * pi * kd * map.r * a1 / d) /
          (pi * kd * map.r);
    }
    s.harmonics[k] = g * J[k] / (d * d);
  }
  return s;
}

double classical_visibility(const Interferometer& ifm, double v, bool vdw,
                            const RayBundleSpec& rays) {
  return classical_spectrum(ifm, v, vdw, rays).visibility();
}

AveragedFringe classical_velocity_averaged(const Interferometer& ifm,
                                           const VelocityDistribution& dist, bool vdw,
                                           const RayBundleSpec& rays) {
  ifm.validate();
  VelocityDistribution dd = dist;
  if (!(dd.source.mass > 0.0)) dd.source = ifm.source();
  const VelocityGrid grid = discretize(dd, ifm.numerics.velocity_nodes);
  if (grid.velocities.empty()) throw DomainError("velocity distribution is empty");

  const bool flat = !vdw || ifm.gratings[1].c3 == 0.0;
  std::optional<FringeSpectrum> fixed;
  if (flat) fixed = classical_spectrum(ifm, grid.velocities.front(), vdw, rays);
  const auto spectra = parallel_map<FringeSpectrum>(
      grid.velocities.size(), ifm.numerics.threads, [&](std::size_t i) {
        return fixed ? *fixed : classical_spectrum(ifm, grid.velocities[i], vdw, rays);
      });

  AveragedFringe out;
  out.spectrum.period = ifm.period();
  out.spectrum.harmonics.assign(spectra.front().harmonics.size(), complex{0.0, 0.0});
  for (std::size_t i = 0; i < spectra.size(); ++i)
    for (std::size_t k = 0; k < out.spectrum.harmonics.size(); ++k)
      out.spectrum.harmonics[k] += grid.weights[i] * spectra[i].harmonics[k];
  out.visibility = out.spectrum.visibility();
  out.flux = out.spectrum.flux() * relative_flux(dd, ifm.numerics.velocity_nodes);
  return out;
}

VisibilityCurve classical_visibility_curve(const Interferometer& ifm,
                                           std::span<const double> centers,
                                           const DistributionModel& model, bool vdw,
                                           const RayBundleSpec& rays) {
  if (centers.empty()) throw DomainError("classical_visibility_curve: no velocity centers given");
  for (double c : centers)
    if (!(c > 0.0)) throw DomainError("classical_visibility_curve: centers must be positive");
  DistributionModel m = model;
  if (!(m.source.mass > 0.0)) m.source = ifm.source();
  VisibilityCurve curve;
  curve.points.reserve(centers.size());
  for (double c : centers) {
    const auto avg = classical_velocity_averaged(ifm, m.at(c), vdw, rays);
    curve.points.push_back({c, avg.visibility, avg.flux});
  }
  return curve;
}

double classical_focal_length(const GratingSpec& spec2, double v, double mass) {
  spec2.validate();
  if (!(spec2.c3 > 0.0)) throw DomainError("classical_focal_length: needs c3 > 0");
  if (!(v > 0.0) || !(mass > 0.0))
    throw DomainError("classical_focal_length: velocity and mass must be positive");
  const double A = spec2.wall_distance();
  const double slope = 24.0 * spec2.thickness * spec2.c3 / (mass * v * std::pow(A, 5));
  return -v / slope;
}

double focal_matching_velocity(const GratingSpec& spec2, double mass, double distance) {
  if (!(distance > 0.0)) throw DomainError("focal_matching_velocity: distance must be positive");
  const double at_unit = std::abs(classical_focal_length(spec2, 1.0, mass));
  return std::sqrt(distance / at_unit);
}

double tilt_visibility_factor(double delta_theta, double beam_height, double period) {
  if (!(beam_height > 0.0) || !(period > 0.0))
    throw DomainError("tilt_visibility_factor: height and period must be positive");
  const double x = pi * delta_theta * beam_height / period;
  if (std::abs(x) < 1e-8) return 1.0;
  return std::abs(std::sin(x) / x);
}

}  // namespace talbot
