#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "talbotlau/errors.hpp"
#include "talbotlau/scanlab.hpp"

using namespace talbot;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double d = 991.25e-9;

double wrap(double a) { return std::remainder(a, 2.0 * pi); }

// Counts for a sine with no noise at all, scaled up so rounding is negligible.
ScanRecord exact_scan(double V, double phi, std::vector<double> x) {
  ScanRecord s;
  s.positions = std::move(x);
  s.dwell = 1.0;
  s.period = d;
  for (double p : s.positions)
    s.counts.push_back(static_cast<std::uint64_t>(std::llround(1e9 * (1.0 + V * std::cos(2.0 * pi * p / d + phi)))));
  return s;
}

std::vector<ScanRecord> drift_series(double rate_mps, std::uint64_t seed, std::size_t n = 5) {
  const auto x = uniform_positions(100, 3.0, d);
  std::vector<ScanRecord> scans;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 300.0 * i;
    const double phase = 0.4 - 2.0 * pi * rate_mps * t / d;
    scans.push_back(synthesize_scan(225.0, 0.37, phase, d, x, 1.5, 0.2, seed + i, t));
  }
  return scans;
}

}  // namespace

TEST_SUITE("scanlab") {

TEST_CASE("uniform positions") {
  const auto x = uniform_positions(100, 3.0, d);
  REQUIRE(x.size() == 100);
  CHECK(x.front() == 0.0);
  CHECK(x[1] == doctest::Approx(3.0 * d / 100.0));
  CHECK_THROWS_AS(uniform_positions(1, 3.0, d), DomainError);
}

TEST_CASE("Poisson statistics of a flat scan") {
  std::vector<double> x(10000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1e-9 * i;
  const auto s = synthesize_scan(40.0, 0.0, 0.0, d, x, 0.5, 0.0, 99);
  double mean = 0.0, var = 0.0;
  for (auto c : s.counts) mean += c;
  mean /= s.counts.size();
  for (auto c : s.counts) var += (c - mean) * (c - mean);
  var /= s.counts.size() - 1;
  const double n = static_cast<double>(s.counts.size());
  CHECK(std::abs(mean - 20.0) < 5.0 * std::sqrt(20.0 / n));
  // The variance of a sample variance for Poisson(mu) is about (mu + 2 mu^2) / n.
  CHECK(std::abs(var - 20.0) < 5.0 * std::sqrt((20.0 + 2.0 * 400.0) / n));
}

TEST_CASE("seeded synthesis is reproducible") {
  const auto x = uniform_positions(100, 3.0, d);
  const auto a = synthesize_scan(225.0, 0.4, 1.0, d, x, 1.5, 0.2, 5);
  const auto b = synthesize_scan(225.0, 0.4, 1.0, d, x, 1.5, 0.2, 5);
  const auto c = synthesize_scan(225.0, 0.4, 1.0, d, x, 1.5, 0.2, 6);
  CHECK(a.counts == b.counts);
  CHECK(a.counts != c.counts);
  CHECK(a.seed == 5);
  CHECK_THROWS_AS(synthesize_scan(225.0, 1.2, 1.0, d, x, 1.5, 0.2, 5), DomainError);
  CHECK_THROWS_AS(synthesize_scan(-1.0, 0.2, 1.0, d, x, 1.5, 0.2, 5), DomainError);
}

TEST_CASE("noiseless recovery") {
  const auto fit = extract_fringe(exact_scan(0.40, 1.0, uniform_positions(64, 2.5, d)), d);
  CHECK(fit.visibility == doctest::Approx(0.40).epsilon(2.5e-6));
  CHECK(std::abs(fit.phase - 1.0) < 1e-6);

  // Uneven spacing is fine for a least-squares projection.
  std::vector<double> x;
  for (int i = 0; i < 50; ++i) x.push_back(d * (0.06 * i + 0.01 * std::sin(1.7 * i)));
  const auto uneven = extract_fringe(exact_scan(0.25, -2.0, x), d);
  CHECK(uneven.visibility == doctest::Approx(0.25).epsilon(4e-6));
  CHECK(std::abs(uneven.phase + 2.0) < 1e-6);
}

TEST_CASE("fringe phase under translation") {
  const auto x = uniform_positions(100, 3.0, d);
  const auto s = synthesize_scan(225.0, 0.37, 0.3, d, x, 1.5, 0.2, 11);
  auto moved = s;
  const double dx = 0.173 * d;
  for (auto& p : moved.positions) p += dx;
  const auto a = extract_fringe(s, d);
  const auto b = extract_fringe(moved, d);
  CHECK(b.visibility == doctest::Approx(a.visibility).epsilon(1e-9));
  CHECK(std::abs(wrap(a.phase - b.phase - 2.0 * pi * dx / d)) < 1e-9);
}

TEST_CASE("sampling requirements") {
  CHECK_THROWS_AS(extract_fringe(exact_scan(0.3, 0.0, uniform_positions(40, 1.5, d)), d), InsufficientDataError);
  CHECK_THROWS_AS(extract_fringe(exact_scan(0.3, 0.0, uniform_positions(20, 3.0, d)), d), InsufficientDataError);
  CHECK_NOTHROW(extract_fringe(exact_scan(0.3, 0.0, uniform_positions(16, 2.0, d)), d));
}

TEST_CASE("round trip coverage and bias") {
  const auto x = uniform_positions(100, 3.0, d);
  int v_ok = 0, p_ok = 0;
  double bias = 0.0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto s = synthesize_scan(450.0, 0.4, 0.8, d, x, 1.5, 0.2, seed);
    const auto fit = extract_fringe(s, d, 0.2);
    CHECK(fit.sigma_visibility > 0.0);
    CHECK(fit.sigma_phase > 0.0);
    v_ok += std::abs(fit.visibility - 0.4) <= 2.0 * fit.sigma_visibility;
    p_ok += std::abs(wrap(fit.phase - 0.8)) <= 2.0 * fit.sigma_phase;
    bias += fit.visibility - 0.4;
  }
  CHECK(v_ok >= 186);
  CHECK(p_ok >= 186);
  CHECK(std::abs(bias / 200.0) < 0.01);
}

TEST_CASE("dark count subtraction") {
  const auto x = uniform_positions(100, 3.0, d);
  const auto s = synthesize_scan(5.0, 0.5, 0.0, d, x, 100.0, 5.0, 3);
  const auto raw = extract_fringe(s, d);
  const auto corrected = extract_fringe(s, d, 5.0);
  CHECK(raw.visibility < 0.3);
  CHECK(corrected.visibility == doctest::Approx(0.5).epsilon(0.1));
  CHECK(corrected.mean_rate == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("signal to noise") {
  const auto x = uniform_positions(100, 3.0, d);
  double snr1 = 0.0, snr4 = 0.0;
  int null_ok = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    snr1 += snr_estimate(synthesize_scan(225.0, 0.374, 0.0, d, x, 1.5, 0.2, seed), d);
    snr4 += snr_estimate(synthesize_scan(225.0, 0.374, 0.0, d, x, 6.0, 0.2, seed), d);
    null_ok += snr_estimate(synthesize_scan(225.0, 0.0, 0.0, d, x, 1.5, 0.2, seed), d) < 3.0;
  }
  CHECK(snr4 / snr1 == doctest::Approx(2.0).epsilon(0.2));
  CHECK(snr1 / 200.0 == doctest::Approx(50.0).epsilon(0.3));
  CHECK(null_ok >= 190);
}

TEST_CASE("drift recovery") {
  const double two_nm_per_min = 2e-9 / 60.0;
  int ok = 0;
  double mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto r = drift_rate(drift_series(two_nm_per_min, 1000 * seed), d);
    CHECK_FALSE(r.ambiguous);
    ok += std::abs(r.nm_per_minute() - 2.0) <= 0.3;
    mean += r.nm_per_minute();
  }
  CHECK(ok >= 80);
  CHECK(mean / 100.0 == doctest::Approx(2.0).epsilon(0.05));

  int null_ok = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto r = drift_rate(drift_series(0.0, 1000 * seed), d);
    null_ok += std::abs(r.rate) < 2.0 * r.sigma;
  }
  CHECK(null_ok >= 88);
}

TEST_CASE("drift reverses with scan order") {
  auto scans = drift_series(2e-9 / 60.0, 77);
  const auto fwd = drift_rate(scans, d);
  std::reverse(scans.begin(), scans.end());
  for (auto& s : scans) s.timestamp = -s.timestamp;
  const auto rev = drift_rate(scans, d);
  CHECK(rev.rate == doctest::Approx(-fwd.rate).epsilon(1e-9));
  CHECK(rev.sigma == doctest::Approx(fwd.sigma).epsilon(1e-9));
}

TEST_CASE("fast drift is flagged") {
  // 0.3 d per scan interval is more than a quarter turn of phase.
  const auto r = drift_rate(drift_series(0.3 * d / 300.0, 5), d);
  CHECK(r.ambiguous);
  CHECK_THROWS_AS(drift_rate(drift_series(0.0, 5, 1), d), InsufficientDataError);
}

TEST_CASE("periodogram peak") {
  const auto x = uniform_positions(128, 4.0, d);
  const auto s = synthesize_scan(300.0, 0.4, 1.2, d, x, 1.5, 0.2, 21);
  const auto peak = periodogram_peak(s);
  CHECK(peak.bin == 4);
  CHECK(peak.period == doctest::Approx(d).epsilon(1e-12));
  const auto fit = extract_fringe(s, d);
  CHECK(std::abs(wrap(peak.phase - fit.phase)) < 1e-9);
  CHECK(peak.amplitude == doctest::Approx(fit.amplitude * s.dwell).epsilon(1e-9));

  auto uneven = s;
  uneven.positions[5] += 0.3 * (x[6] - x[5]);
  CHECK_THROWS_AS(periodogram_peak(uneven), DomainError);
}

TEST_CASE("CSV round trip") {
  const auto x = uniform_positions(100, 3.0, d);
  const auto s = synthesize_scan(225.0, 0.37, 0.1, d, x, 1.5, 0.2, 42, 600.0);
  const std::string text = to_csv(s);
  CHECK(text.rfind("# schema=1\n# period_m=", 0) == 0);
  CHECK(text.find("position_m,counts\n") != std::string::npos);
  const auto back = scan_from_csv(text);
  CHECK(back.positions == s.positions);
  CHECK(back.counts == s.counts);
  CHECK(back.dwell == s.dwell);
  CHECK(back.period == s.period);
  CHECK(back.seed == s.seed);
  CHECK(back.timestamp == s.timestamp);
  CHECK(to_csv(back) == text);
  CHECK_THROWS_AS(scan_from_csv("position_m,counts\n0,1\n"), ConfigError);
}

TEST_CASE("record validation") {
  ScanRecord s;
  s.positions = {0.0, 1.0, 0.5};
  s.counts = {1, 2, 3};
  s.dwell = 1.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.positions = {0.0, 1.0};
  CHECK_THROWS_AS(s.validate(), DomainError);
}

}
