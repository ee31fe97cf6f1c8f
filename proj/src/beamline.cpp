#include "talbotlau/beamline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "talbotlau/core.hpp"
#include "talbotlau/errors.hpp"

namespace talbot {

namespace {

constexpr double kFwhmToSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

}  // namespace

double EffusiveSource::flux_density(double v) const {
  if (v <= 0.0) return 0.0;
  const double alpha2 = 2.0 * constants::boltzmann * temperature / mass;
  return v * v * v * std::exp(-v * v / alpha2);
}

double EffusiveSource::total_flux() const {
  const double alpha2 = 2.0 * constants::boltzmann * temperature / mass;
  return 0.5 * alpha2 * alpha2;
}

double EffusiveSource::peak_velocity() const {
  return std::sqrt(3.0 * constants::boltzmann * temperature / mass);
}

void VelocityDistribution::validate() const {
  if (!(center > 0.0)) throw DomainError("distribution center must be positive");
  if (!(fwhm_fraction >= 0.0 && fwhm_fraction < 1.0))
    throw DomainError("distribution fwhm_fraction must be in [0, 1)");
  if (kind == DistributionKind::effusive_weighted_gaussian &&
      !(source.mass > 0.0 && source.temperature > 0.0))
    throw DomainError("effusive weighting needs a positive mass and temperature");
}

double VelocityDistribution::sigma() const {
  return fwhm_fraction * center / kFwhmToSigma;
}

double fwhm_model(double v0) {
  const double v = std::clamp(v0, 60.0, 260.0);
  return 0.08 + (0.35 - 0.08) * (v - 80.0) / (215.0 - 80.0);
}

VelocityGrid discretize(const VelocityDistribution& dist, std::size_t n) {
  dist.validate();
  VelocityGrid grid;
  if (dist.kind == DistributionKind::delta || dist.fwhm_fraction == 0.0) {
    grid.velocities = {dist.center};
    grid.weights = {1.0};
    return grid;
  }
  if (n < 3 || n % 2 == 0) throw ConfigError("discretize: node count must be odd and >= 3");

  const double sigma = dist.sigma();
  const double step = 6.0 * sigma / static_cast<double>(n - 1);
  const auto half = static_cast<double>((n - 1) / 2);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = dist.center + (static_cast<double>(i) - half) * step;
    if (v <= 0.0) continue;
    const double z = (v - dist.center) / sigma;
    double w = std::exp(-0.5 * z * z);
    if (dist.kind == DistributionKind::effusive_weighted_gaussian) w *= dist.source.flux_density(v);
    grid.velocities.push_back(v);
    grid.weights.push_back(w);
    total += w;
  }
  for (auto& w : grid.weights) w /= total;
  return grid;
}

double relative_flux(const VelocityDistribution& dist, std::size_t n) {
  dist.validate();
  if (!(dist.source.mass > 0.0)) throw DomainError("relative_flux: source mass is not set");
  const auto& src = dist.source;
  if (dist.kind == DistributionKind::delta || dist.fwhm_fraction == 0.0)
    return src.flux_density(dist.center) / src.flux_density(src.peak_velocity());

  // Selector transmission is the unnormalized Gaussian band shape.
  const double sigma = dist.sigma();
  const double step = 6.0 * sigma / static_cast<double>(n - 1);
  const auto half = static_cast<double>((n - 1) / 2);
  double passed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = dist.center + (static_cast<double>(i) - half) * step;
    const double z = (v - dist.center) / sigma;
    passed += std::exp(-0.5 * z * z) * src.flux_density(v) * step;
  }
  return passed / src.total_flux();
}

VelocityDistribution DistributionModel::at(double center) const {
  VelocityDistribution d;
  d.kind = kind;
  d.center = center;
  d.fwhm_fraction = kind == DistributionKind::delta
                        ? 0.0
                        : fwhm_fraction.value_or(fwhm_model(center));
  d.source = source;
  return d;
}

void SelectorGeometry::validate() const {
  if (!(oven_height > 0.0 && limiter_height > 0.0 && detector_height > 0.0))
    throw DomainError("selector window heights must be positive");
  if (!(limiter_z > 0.0 && limiter_z < detector_z))
    throw DomainError("selector requires 0 < limiter_z < detector_z");
}

VelocityBand velocity_band_from_geometry(const SelectorGeometry& sel, double oven_offset,
                                         const SelectorScan& scan) {
  sel.validate();
  if (scan.source_points < 2 || scan.detector_points < 2 || !(scan.v_step > 0.0) ||
      !(scan.v_min > 0.0 && scan.v_max > scan.v_min))
    throw ConfigError("selector scan settings are invalid");
  const double oven_lo = oven_offset - 0.5 * sel.oven_height;
  const double oven_hi = oven_offset + 0.5 * sel.oven_height;
  if (oven_hi > -0.5 * sel.detector_height && oven_lo < 0.5 * sel.detector_height)
    throw DomainError("oven window overlaps the detector window");

  const double r = sel.limiter_z / sel.detector_z;
  const double sag_coeff = 0.5 * sel.g * sel.limiter_z * (sel.detector_z - sel.limiter_z);
  const double limit = 0.5 * sel.limiter_height;

  std::vector<double> heights0(static_cast<std::size_t>(scan.source_points));
  std::vector<double> heights2(static_cast<std::size_t>(scan.detector_points));
  for (int i = 0; i < scan.source_points; ++i)
    heights0[static_cast<std::size_t>(i)] =
        oven_lo + sel.oven_height * i / static_cast<double>(scan.source_points - 1);
  for (int j = 0; j < scan.detector_points; ++j)
    heights2[static_cast<std::size_t>(j)] =
        -0.5 * sel.detector_height + sel.detector_height * j / static_cast<double>(scan.detector_points - 1);

  VelocityBand band;
  const double pairs = static_cast<double>(heights0.size() * heights2.size());
  const auto steps = static_cast<std::size_t>(std::floor((scan.v_max - scan.v_min) / scan.v_step + 1e-9));
  double weighted = 0.0;
  double weight_sum = 0.0;
  bool any = false;
  bool hits_edge = false;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double v = scan.v_min + static_cast<double>(k) * scan.v_step;
    const double sag = sag_coeff / (v * v);
    std::size_t passed = 0;
    for (double y0 : heights0)
      for (double y2 : heights2) {
        const double y_limiter = y0 * (1.0 - r) + y2 * r + sag;
        if (std::abs(y_limiter) <= limit) ++passed;
      }
    const double frac = static_cast<double>(passed) / pairs;
    band.velocities.push_back(v);
    band.transmission.push_back(frac);
    if (passed == 0) continue;
    if (!any) band.v_min = v;
    band.v_max = v;
    any = true;
    if (k == 0 || k == steps) hits_edge = true;
    weighted += frac * v;
    weight_sum += frac;
  }
  if (!any) throw EmptyBandError("velocity selector transmits no velocity for this oven offset");

  band.v_center = weighted / weight_sum;
  if (hits_edge) {
    band.unbounded = true;
    if (sel.g == 0.0) band.v_center = std::numeric_limits<double>::quiet_NaN();
  }
  return band;
}

}  // namespace talbot
