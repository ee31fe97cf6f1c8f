#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "talbotlau/errors.hpp"
#include "talbotlau/fresnel_oracle.hpp"
#include "talbotlau/quantum.hpp"

using namespace talbot;

namespace {

constexpr double pi = std::numbers::pi;

// Term-by-term evaluation of the Talbot sum.
complex direct_B(const FourierSpectrum& b, int m, double xi) {
  complex acc{0.0, 0.0};
  for (int n = -b.n_max; n <= b.n_max; ++n) {
    acc += b[n] * std::conj(b[n - m]) * std::polar(1.0, -pi * m * (2.0 * n - m) * xi / 2.0);
  }
  return acc;
}

FourierSpectrum grating2_spectrum(bool vdw, double v, int n_max) {
  const auto ifm = Interferometer::c70_default();
  return fourier_coeffs(build_transmission(ifm.coherent_grating(vdw), v, 1 << 14), n_max);
}

double max_abs(const TalbotCoefficients& B) {
  double m = 0.0;
  for (const auto& c : B.coeffs) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST_SUITE("quantum") {

TEST_CASE("default interferometer") {
  const auto ifm = Interferometer::c70_default();
  CHECK_NOTHROW(ifm.validate());
  CHECK(ifm.period() == doctest::Approx(991.25e-9));
  CHECK(ifm.gratings[1].c3 == doctest::Approx(0.09 * units::eV_nm3));
  CHECK(ifm.talbot_parameter(talbot_velocity(ifm.species.mass, ifm.period(), 0.22)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  auto bad = ifm;
  bad.gratings[2].period *= 1.001;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = ifm;
  bad.numerics.n_max = 8;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("Talbot coefficients equal the direct sum") {
  const auto b = grating2_spectrum(true, 115.0, 48);
  for (double xi : {0.0, 0.37, 1.0, 1.93}) {
    const auto B = talbot_coefficients(b, xi, 16);
    for (int m = -16; m <= 16; ++m) {
      if (m == 0) continue;
      CHECK(std::abs(B[m] - direct_B(b, m, xi)) < 1e-12);
    }
    CHECK(B[0].real() == doctest::Approx(b.total_power).epsilon(1e-14));
  }
}

TEST_CASE("geometric limit and self image") {
  const auto b = grating2_spectrum(false, 100.0, 256);
  const auto B0 = talbot_coefficients(b, 0.0, 16);
  const auto B2 = talbot_coefficients(b, 2.0, 16);
  const auto power = intensity_coeffs(Interferometer::c70_default().coherent_grating(false), 16);
  for (int m = 1; m <= 16; ++m) {
    CHECK(std::abs(B2[m]) == doctest::Approx(std::abs(B0[m])).epsilon(1e-9));
    // Autocorrelation of b is the spectrum of |t|^2; the truncation at n_max shows up at 1e-3.
    CHECK(std::abs(B0[m] - power[m]) < 2e-3);
  }
}

TEST_CASE("B_0 does not depend on xi") {
  const auto b = grating2_spectrum(true, 100.0, 128);
  const complex a = talbot_coefficients(b, 0.7, 4)[0];
  const complex c = talbot_coefficients(b, 1.9, 4)[0];
  CHECK(a.real() == c.real());
  CHECK(a.imag() == 0.0);
}

TEST_CASE("Hermiticity") {
  for (bool vdw : {false, true}) {
    for (double v : {80.0, 115.0, 215.0}) {
      const auto ifm = Interferometer::c70_default();
      const auto b = fourier_coeffs(build_transmission(ifm.coherent_grating(vdw), v, 1 << 16), 512);
      const auto B = talbot_coefficients(b, ifm.talbot_parameter(v), 16);
      for (int m = 1; m <= 16; ++m) CHECK(std::abs(B[-m] - std::conj(B[m])) < 1e-12 * max_abs(B));
    }
  }
  CHECK_THROWS_AS(talbot_coefficients(grating2_spectrum(false, 100.0, 8), -0.1, 4), DomainError);
}

TEST_CASE("gravity phase") {
  Geometry g;
  g.tilt_alpha = 1e-3;
  CHECK(gravity_phase(g, 991.25e-9, 122.7) == doctest::Approx(0.200).epsilon(0.005));
  CHECK(gravity_phase(g, 991.25e-9, 115.0) == doctest::Approx(0.228).epsilon(0.005));
  const double expect = 2.0 * pi * 0.22 * 0.22 * g.g * 1e-3 / (991.25e-9 * 115.0 * 115.0);
  CHECK(gravity_phase(g, 991.25e-9, 115.0) == doctest::Approx(expect).epsilon(1e-14));
  g.tilt_alpha = 0.0;
  CHECK(gravity_phase(g, 991.25e-9, 115.0) == 0.0);
}

TEST_CASE("all-open gratings give no fringes") {
  auto ifm = Interferometer::c70_default();
  for (auto& g : ifm.gratings) {
    g.open_fraction = 0.999999;
    g.edge_cutoff = 0.0;
    g.c3 = 0.0;
  }
  const auto s = monochromatic_spectrum(ifm, 115.0, false);
  CHECK(s.flux() == doctest::Approx(1.0).epsilon(1e-5));
  for (std::size_t k = 1; k < s.harmonics.size(); ++k) CHECK(std::abs(s.harmonics[k]) < 1e-5);
}

TEST_CASE("signals are real and non-negative") {
  auto ifm = Interferometer::c70_default();
  for (double alpha : {0.0, 1.5e-3}) {
    ifm.geometry.tilt_alpha = alpha;
    for (bool vdw : {false, true}) {
      for (double v : {80.0, 97.0, 107.0, 115.0, 140.0, 215.0, 1e5}) {
        const auto s = monochromatic_spectrum(ifm, v, vdw);
        CHECK(s.flux() > 0.0);
        CHECK(s.harmonics[0].imag() == 0.0);
        CHECK(s.min_signal(1024) >= -1e-9 * s.flux());
        CHECK(s.visibility() >= 0.0);
        CHECK(s.visibility() <= 1.0);
      }
    }
  }
}

TEST_CASE("visibility and contrast agree for near-sinusoidal signals") {
  const auto s = monochromatic_spectrum(Interferometer::c70_default(), 115.0, true);
  CHECK(s.visibility() == doctest::Approx(0.436).epsilon(0.01));
  CHECK(std::abs(s.contrast() - s.visibility()) < 0.05);
}

TEST_CASE("vdW-off curve has a minimum near the Talbot velocity") {
  const auto ifm = Interferometer::c70_default();
  const double v107 = monochromatic_visibility(ifm, 107.0, false);
  CHECK(v107 < monochromatic_visibility(ifm, 95.0, false));
  CHECK(v107 < monochromatic_visibility(ifm, 120.0, false));
}

TEST_CASE("truncation and averaging-grid convergence") {
  auto ifm = Interferometer::c70_default();
  auto wide = ifm;
  wide.numerics.n_max = 1024;
  auto fine = ifm;
  fine.numerics.velocity_nodes = 129;
  const DistributionModel model;
  for (double v : {80.0, 107.0, 115.0, 160.0, 215.0}) {
    for (bool vdw : {false, true}) {
      CHECK(std::abs(monochromatic_visibility(ifm, v, vdw) - monochromatic_visibility(wide, v, vdw)) < 1e-3);
      auto dist = model.at(v);
      dist.source = ifm.source();
      CHECK(std::abs(velocity_averaged(ifm, dist, vdw).visibility -
                     velocity_averaged(fine, dist, vdw).visibility) < 1e-3);
    }
  }
}

TEST_CASE("velocity averaging") {
  auto ifm = Interferometer::c70_default();
  DistributionModel delta;
  delta.kind = DistributionKind::delta;
  CHECK(velocity_averaged(ifm, delta.at(115.0), true).visibility ==
        doctest::Approx(monochromatic_visibility(ifm, 115.0, true)).epsilon(1e-12));

  const DistributionModel widths;
  const double avg = velocity_averaged(ifm, widths.at(115.0), true).visibility;
  CHECK(std::abs(avg - monochromatic_visibility(ifm, 115.0, true)) < 0.07);

  // A tilt translates a monochromatic fringe but washes out a broad one.
  DistributionModel broad;
  broad.fwhm_fraction = 0.35;
  double prev = 2.0;
  for (double alpha : {0.0, 0.5e-3, 1e-3, 2e-3, 4e-3}) {
    ifm.geometry.tilt_alpha = alpha;
    const double mono = velocity_averaged(ifm, delta.at(115.0), true).visibility;
    CHECK(mono == doctest::Approx(monochromatic_visibility(Interferometer::c70_default(), 115.0, true)).epsilon(1e-9));
    const double b = velocity_averaged(ifm, broad.at(115.0), true).visibility;
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("visibility curve") {
  const auto ifm = Interferometer::c70_default();
  const std::vector<double> centers{80.0, 115.0, 160.0};
  const auto c = visibility_curve(ifm, centers, DistributionModel{}, true);
  REQUIRE(c.points.size() == 3);
  CHECK(c.points[1].visibility > c.points[0].visibility);
  CHECK(c.points[1].visibility > c.points[2].visibility);
  CHECK(c.points[0].flux < c.points[1].flux);
  CHECK(c.points[1].flux < c.points[2].flux);
  CHECK_THROWS_AS(visibility_curve(ifm, std::vector<double>{}, DistributionModel{}, true), DomainError);
  CHECK_THROWS_AS(visibility_curve(ifm, std::vector<double>{-5.0}, DistributionModel{}, true), DomainError);

  auto threaded = ifm;
  threaded.numerics.threads = 4;
  const auto t = visibility_curve(threaded, centers, DistributionModel{}, true);
  for (std::size_t i = 0; i < 3; ++i) CHECK(t.points[i].visibility == c.points[i].visibility);
}

TEST_CASE("Fresnel oracle periodicity and shadow limit") {
  const auto ifm = Interferometer::c70_default();
  const OracleSettings s;
  const double d = ifm.period();
  const std::vector<double> shifts{0.1 * d, 0.37 * d, 1.1 * d, 1.37 * d};
  const auto r = fresnel_signal(ifm, 115.0, true, s, shifts);
  CHECK(r.signal[0] == doctest::Approx(r.signal[2]).epsilon(1e-9));
  CHECK(r.signal[1] == doctest::Approx(r.signal[3]).epsilon(1e-9));

  const double shadow = fresnel_oracle(ifm, 1e5, false).spectrum.visibility();
  CHECK(std::abs(shadow - monochromatic_visibility(ifm, 1e5, false)) < 0.005);
}

TEST_CASE("Fresnel oracle agrees with the closed form") {
  const auto ifm = Interferometer::c70_default();
  const auto r = fresnel_oracle(ifm, 115.0, true);
  const auto s = monochromatic_spectrum(ifm, 115.0, true);
  CHECK(std::abs(r.spectrum.visibility() - s.visibility()) < 0.01);
  // Phase conventions must match, not only magnitudes.
  CHECK(std::abs(std::remainder(r.spectrum.phase() - s.phase(), 2.0 * pi)) < 0.05);
  CHECK(r.spectrum.flux() == doctest::Approx(s.flux()).epsilon(0.01));

  OracleSettings bad;
  bad.grating_samples = 3000;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

}
