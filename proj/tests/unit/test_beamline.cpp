#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "talbotlau/beamline.hpp"
#include "talbotlau/core.hpp"
#include "talbotlau/errors.hpp"

using namespace talbot;

namespace {

EffusiveSource c70_oven() { return {Species::c70().mass, 923.15}; }

double sum(const std::vector<double>& w) { return std::accumulate(w.begin(), w.end(), 0.0); }

double mean_velocity(const VelocityGrid& g) {
  double m = 0.0;
  for (std::size_t i = 0; i < g.velocities.size(); ++i) m += g.velocities[i] * g.weights[i];
  return m;
}

}  // namespace

TEST_SUITE("beamline") {

TEST_CASE("width model") {
  CHECK(fwhm_model(80.0) == doctest::Approx(0.08));
  CHECK(fwhm_model(215.0) == doctest::Approx(0.35));
  CHECK(fwhm_model(147.5) == doctest::Approx(0.215));
  CHECK(fwhm_model(10.0) == fwhm_model(60.0));
  CHECK(fwhm_model(900.0) == fwhm_model(260.0));
}

TEST_CASE("effusive source") {
  const auto src = c70_oven();
  // Trapezoid integration of the density.
  double total = 0.0;
  const double dv = 0.05;
  for (double v = dv; v < 2000.0; v += dv) total += src.flux_density(v) * dv;
  CHECK(src.total_flux() == doctest::Approx(total).epsilon(1e-6));
  const double vp = src.peak_velocity();
  CHECK(src.flux_density(vp) > src.flux_density(vp * 0.99));
  CHECK(src.flux_density(vp) > src.flux_density(vp * 1.01));
}

TEST_CASE("discretization") {
  VelocityDistribution d;
  d.kind = DistributionKind::delta;
  d.center = 115.0;
  auto g = discretize(d, 65);
  CHECK(g.velocities == std::vector<double>{115.0});
  CHECK(g.weights == std::vector<double>{1.0});

  d.kind = DistributionKind::gaussian;
  d.fwhm_fraction = 0.2;
  g = discretize(d, 65);
  REQUIRE(g.velocities.size() == 65);
  CHECK(sum(g.weights) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 32; ++i) CHECK(g.weights[i] == doctest::Approx(g.weights[64 - i]).epsilon(1e-12));
  CHECK(g.velocities.back() - g.velocities.front() == doctest::Approx(6.0 * d.sigma()));
  CHECK(d.sigma() * 2.0 * std::sqrt(2.0 * std::log(2.0)) == doctest::Approx(0.2 * 115.0));
  CHECK(mean_velocity(g) == doctest::Approx(115.0).epsilon(1e-12));

  d.kind = DistributionKind::effusive_weighted_gaussian;
  d.source = c70_oven();
  const auto e = discretize(d, 65);
  CHECK(sum(e.weights) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mean_velocity(e) > mean_velocity(g));

  CHECK_THROWS_AS(discretize(d, 64), ConfigError);
  d.fwhm_fraction = 1.0;
  CHECK_THROWS_AS(discretize(d, 65), DomainError);
}

TEST_CASE("relative flux rises with center between 80 and 160 m/s") {
  DistributionModel m;
  m.source = c70_oven();
  double prev = 0.0;
  for (double c = 80.0; c <= 160.0; c += 10.0) {
    const double f = relative_flux(m.at(c), 65);
    CHECK(f > prev);
    CHECK(f < 1.0);
    prev = f;
  }
  m.kind = DistributionKind::delta;
  CHECK(relative_flux(m.at(c70_oven().peak_velocity()), 65) == doctest::Approx(1.0));
}

TEST_CASE("selector band follows the oven height") {
  const SelectorGeometry sel;
  double prev = 0.0;
  for (double off : {-3.0e-3, -2.0e-3, -1.5e-3, -1.0e-3, -0.5e-3, -0.35e-3}) {
    const auto band = velocity_band_from_geometry(sel, off);
    CHECK_FALSE(band.unbounded);
    CHECK(band.v_min <= band.v_center);
    CHECK(band.v_center <= band.v_max);
    CHECK(band.v_center > prev);
    prev = band.v_center;
  }
}

TEST_CASE("selector covers 80 to 215 m/s") {
  const SelectorGeometry sel;
  bool low = false, high = false;
  for (double off = -3.5e-3; off <= -0.3e-3; off += 0.05e-3) {
    const double vc = velocity_band_from_geometry(sel, off).v_center;
    low = low || std::abs(vc - 80.0) < 3.0;
    high = high || std::abs(vc - 215.0) < 8.0;
  }
  CHECK(low);
  CHECK(high);
}

TEST_CASE("parabola geometry") {
  // Independent check: a molecule leaving the orifice center and arriving at the
  // detector center crosses the limiter plane at a height fixed by the drop.
  const SelectorGeometry sel;
  const double off = -1e-3;
  const auto band = velocity_band_from_geometry(sel, off);
  for (double v : {band.v_min + 1.0, band.v_max - 1.0}) {
    const double z1 = sel.limiter_z, z2 = sel.detector_z;
    const double vy = (0.0 - off + 0.5 * sel.g * z2 * z2 / (v * v)) * v / z2;
    const double y1 = off + vy * z1 / v - 0.5 * sel.g * z1 * z1 / (v * v);
    CHECK(std::abs(y1) < 0.5 * sel.limiter_height + 0.5 * sel.oven_height);
  }
}

TEST_CASE("narrower limiter narrows the band") {
  SelectorGeometry sel;
  const auto wide = velocity_band_from_geometry(sel, -1e-3);
  sel.limiter_height = 75e-6;
  const auto narrow = velocity_band_from_geometry(sel, -1e-3);
  CHECK(narrow.v_max - narrow.v_min < wide.v_max - wide.v_min);
}

TEST_CASE("no gravity means no selection") {
  SelectorGeometry sel;
  sel.g = 0.0;
  const auto band = velocity_band_from_geometry(sel, -0.2e-3);
  CHECK(band.unbounded);
}

TEST_CASE("selector errors") {
  SelectorGeometry sel;
  CHECK_THROWS_AS(velocity_band_from_geometry(sel, 0.0), DomainError);
  CHECK_THROWS_AS(velocity_band_from_geometry(sel, +5e-3), EmptyBandError);
  sel.limiter_z = 3.0;
  CHECK_THROWS_AS(sel.validate(), DomainError);
}

}
