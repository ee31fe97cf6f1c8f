#include "talbotlau/scanlab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "talbotlau/core.hpp"
#include "talbotlau/errors.hpp"
#include "talbotlau/fft.hpp"
#include "text.hpp"

namespace talbot {

namespace {

using constants::pi;
using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 inverse(const Mat3& m) {
  Mat3 c{};
  c[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  c[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  c[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  c[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  c[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  c[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  c[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  c[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  c[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double det = m[0][0] * c[0][0] + m[0][1] * c[1][0] + m[0][2] * c[2][0];
  if (std::abs(det) < 1e-300) throw InsufficientDataError("harmonic fit is singular");
  for (auto& row : c)
    for (double& x : row) x /= det;
  return c;
}

double quad_form(const std::array<double, 3>& g, const Mat3& cov) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += g[i] * cov[i][j] * g[j];
  return std::max(s, 0.0);
}

struct HarmonicFit {
  std::array<double, 3> beta{};  // counts per point: c0 + c1 cos + c2 sin
  Mat3 cov{};
};

void check_sampling(const ScanRecord& scan, double period) {
  scan.validate();
  if (!(period > 0.0)) throw DomainError("fringe period must be positive");
  const std::size_t n = scan.positions.size();
  if (n < 3) throw InsufficientDataError("scan needs at least three points");
  const double step_span = std::abs(scan.positions.back() - scan.positions.front());
  const double span = step_span * static_cast<double>(n) / static_cast<double>(n - 1);
  const double periods = span / period;
  if (periods < 2.0 - 1e-9)
    throw InsufficientDataError("scan spans " + text::num(periods) + " periods; need >= 2");
  if (static_cast<double>(n) / periods < 8.0 - 1e-9)
    throw InsufficientDataError("scan samples fewer than 8 points per period");
}

HarmonicFit fit_harmonic(const ScanRecord& scan, double period) {
  check_sampling(scan, period);
  const std::size_t n = scan.positions.size();
  Mat3 xtx{};
  std::array<double, 3> xty{};
  std::vector<std::array<double, 3>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 2.0 * pi * scan.positions[i] / period;
    rows[i] = {1.0, std::cos(th), std::sin(th)};
    const double y = static_cast<double>(scan.counts[i]);
    for (int a = 0; a < 3; ++a) {
      xty[a] += rows[i][a] * y;
      for (int b = 0; b < 3; ++b) xtx[a][b] += rows[i][a] * rows[i][b];
    }
  }
  const Mat3 inv = inverse(xtx);
  HarmonicFit fit;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) fit.beta[a] += inv[a][b] * xty[b];

  // Sandwich covariance with Poisson variance equal to the fitted mean.
  Mat3 meat{};
  for (const auto& r : rows) {
    const double mu = std::max(fit.beta[0] + fit.beta[1] * r[1] + fit.beta[2] * r[2], 0.0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) meat[a][b] += r[a] * mu * r[b];
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += inv[a][i] * meat[i][j] * inv[j][b];
      fit.cov[a][b] = s;
    }
  return fit;
}

}  // namespace

void ScanRecord::validate() const {
  if (positions.size() != counts.size())
    throw DomainError("scan positions and counts differ in length");
  if (!(dwell > 0.0)) throw DomainError("scan dwell time must be positive");
  if (positions.size() >= 2) {
    const bool up = positions[1] > positions[0];
    for (std::size_t i = 1; i < positions.size(); ++i)
      if (up ? !(positions[i] > positions[i - 1]) : !(positions[i] < positions[i - 1]))
        throw DomainError("scan positions must be strictly monotone");
  }
}

std::vector<double> uniform_positions(std::size_t points, double periods, double period) {
  if (points < 2) throw DomainError("uniform_positions: need at least two points");
  if (!(periods > 0.0) || !(period > 0.0))
    throw DomainError("uniform_positions: span and period must be positive");
  std::vector<double> x(points);
  const double step = periods * period / static_cast<double>(points);
  for (std::size_t i = 0; i < points; ++i) x[i] = step * static_cast<double>(i);
  return x;
}

ScanRecord synthesize_scan(double mean_rate, double visibility, double phase, double period,
                           std::span<const double> positions, double dwell, double dark_rate,
                           std::uint64_t seed, double timestamp) {
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw DomainError("synthesize_scan: visibility must lie in [0, 1]");
  if (!(mean_rate >= 0.0) || !(dark_rate >= 0.0))
    throw DomainError("synthesize_scan: rates must be non-negative");
  if (!(dwell > 0.0)) throw DomainError("synthesize_scan: dwell must be positive");
  if (!(period > 0.0)) throw DomainError("synthesize_scan: period must be positive");

  ScanRecord scan;
  scan.positions.assign(positions.begin(), positions.end());
  scan.dwell = dwell;
  scan.timestamp = timestamp;
  scan.period = period;
  scan.seed = seed;
  std::mt19937_64 rng(seed);
  scan.counts.reserve(positions.size());
  for (double x : positions) {
    const double rate =
        dark_rate + mean_rate * (1.0 + visibility * std::cos(2.0 * pi * x / period + phase));
    const double mean = rate * dwell;
    if (mean <= 0.0) {
      scan.counts.push_back(0);
      continue;
    }
    std::poisson_distribution<std::uint64_t> pois(mean);
    scan.counts.push_back(pois(rng));
  }
  scan.validate();
  return scan;
}

FringeFit extract_fringe(const ScanRecord& scan, double period, std::optional<double> dark_rate) {
  const HarmonicFit fit = fit_harmonic(scan, period);
  const auto [c0_raw, c1, c2] = fit.beta;
  const double dark = dark_rate.value_or(0.0) * scan.dwell;
  const double c0 = c0_raw - dark;
  if (!(c0 > 0.0)) throw InsufficientDataError("scan has no signal above the dark level");
  const double amp = std::hypot(c1, c2);

  FringeFit out;
  out.mean_rate = c0 / scan.dwell;
  out.amplitude = amp / scan.dwell;
  out.visibility = std::min(amp / c0, 1.0);
  out.phase = std::atan2(-c2, c1);
  if (amp > 0.0) {
    out.sigma_amplitude = std::sqrt(quad_form({0.0, c1 / amp, c2 / amp}, fit.cov)) / scan.dwell;
    out.sigma_visibility =
        std::sqrt(quad_form({-amp / (c0 * c0), c1 / (amp * c0), c2 / (amp * c0)}, fit.cov));
    out.sigma_phase = std::sqrt(quad_form({0.0, c2 / (amp * amp), -c1 / (amp * amp)}, fit.cov));
  } else {
    out.sigma_amplitude = std::sqrt(0.5 * (fit.cov[1][1] + fit.cov[2][2])) / scan.dwell;
    out.sigma_visibility = out.sigma_amplitude / out.mean_rate;
    out.sigma_phase = pi;
  }
  return out;
}

double snr_estimate(const ScanRecord& scan, double period) {
  const FringeFit fit = extract_fringe(scan, period);
  if (fit.sigma_amplitude == 0.0) return 0.0;
  return fit.amplitude / fit.sigma_amplitude;
}

DriftResult drift_rate(std::span<const ScanRecord> scans, double period) {
  if (scans.size() < 2) throw InsufficientDataError("drift_rate needs at least two scans");
  DriftResult out;
  std::vector<double> sigmas;
  for (const auto& s : scans) {
    const FringeFit fit = extract_fringe(s, period);
    double phi = fit.phase;
    if (!out.phases.empty()) {
      const double prev = out.phases.back();
      const double jump = std::remainder(phi - prev, 2.0 * pi);
      if (std::abs(jump) > 0.5 * pi) out.ambiguous = true;
      phi = prev + jump;
    }
    out.phases.push_back(phi);
    sigmas.push_back(std::max(fit.sigma_phase, 1e-12));
  }
  double sw = 0.0, st = 0.0, sp = 0.0;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    const double w = 1.0 / (sigmas[i] * sigmas[i]);
    sw += w;
    st += w * scans[i].timestamp;
    sp += w * out.phases[i];
  }
  const double tm = st / sw, pm = sp / sw;
  double stt = 0.0, stp = 0.0;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    const double w = 1.0 / (sigmas[i] * sigmas[i]);
    stt += w * (scans[i].timestamp - tm) * (scans[i].timestamp - tm);
    stp += w * (scans[i].timestamp - tm) * (out.phases[i] - pm);
  }
  if (!(stt > 0.0)) throw InsufficientDataError("drift_rate needs distinct scan timestamps");
  const double slope = stp / stt;
  out.rate = -slope * period / (2.0 * pi);
  out.sigma = std::sqrt(1.0 / stt) * period / (2.0 * pi);
  return out;
}

PeriodogramPeak periodogram_peak(const ScanRecord& scan) {
  scan.validate();
  const std::size_t n = scan.positions.size();
  if (n < 4) throw InsufficientDataError("periodogram needs at least four points");
  const double step = (scan.positions.back() - scan.positions.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(scan.positions[i] - scan.positions[i - 1] - step) > 1e-6 * std::abs(step))
      throw DomainError("periodogram_peak requires uniformly spaced positions");
  double mean = 0.0;
  for (auto c : scan.counts) mean += static_cast<double>(c);
  mean /= static_cast<double>(n);
  std::vector<std::complex<double>> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(scan.counts[i]) - mean;
  fft::transform(x, fft::Direction::forward);
  PeriodogramPeak peak;
  double best = -1.0;
  for (std::size_t k = 1; k <= n / 2; ++k)
    if (std::abs(x[k]) > best) {
      best = std::abs(x[k]);
      peak.bin = k;
    }
  const double kd = static_cast<double>(peak.bin);
  peak.period = static_cast<double>(n) * step / kd;
  peak.amplitude = 2.0 * best / static_cast<double>(n);
  peak.phase = std::remainder(std::arg(x[peak.bin]) - 2.0 * pi * scan.positions.front() / peak.period,
                              2.0 * pi);
  return peak;
}

std::string to_csv(const ScanRecord& scan) {
  scan.validate();
  std::string out = "# schema=1\n";
  out += "# period_m=" + text::num(scan.period) + " dwell_s=" + text::num(scan.dwell) +
         " seed=" + text::num(scan.seed) + " t0_s=" + text::num(scan.timestamp) + "\n";
  out += "position_m,counts\n";
  for (std::size_t i = 0; i < scan.positions.size(); ++i)
    out += text::num(scan.positions[i]) + "," + text::num(scan.counts[i]) + "\n";
  return out;
}

ScanRecord scan_from_csv(std::string_view csv) {
  ScanRecord scan;
  bool header_seen = false, schema_seen = false;
  std::size_t line_no = 0;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    std::string_view line = text::trim(csv.substr(0, nl));
    csv.remove_prefix(nl == std::string_view::npos ? csv.size() : nl + 1);
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "scan csv line " + std::to_string(line_no) + ": ";
    if (line.front() == '#') {
      std::istringstream fields{std::string(line.substr(1))};
      std::string tok;
      while (fields >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "malformed header field");
        const std::string key = tok.substr(0, eq);
        const std::string_view val = std::string_view(tok).substr(eq + 1);
        bool ok = true;
        if (key == "schema") {
          ok = val == "1";
          schema_seen = true;
        } else if (key == "period_m") {
          ok = text::parse_double(val, scan.period);
        } else if (key == "dwell_s") {
          ok = text::parse_double(val, scan.dwell);
        } else if (key == "seed") {
          ok = text::parse_u64(val, scan.seed);
        } else if (key == "t0_s") {
          ok = text::parse_double(val, scan.timestamp);
        }
        if (!ok) throw ConfigError(where + "bad value for " + key);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "position_m,counts") throw ConfigError(where + "expected 'position_m,counts'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    double x = 0.0;
    std::uint64_t c = 0;
    if (comma == std::string_view::npos || !text::parse_double(line.substr(0, comma), x) ||
        !text::parse_u64(line.substr(comma + 1), c))
      throw ConfigError(where + "expected '<position>,<count>'");
    scan.positions.push_back(x);
    scan.counts.push_back(c);
  }
  if (!schema_seen) throw ConfigError("scan csv: missing '# schema=1' line");
  if (!header_seen) throw ConfigError("scan csv: missing column header");
  scan.validate();
  return scan;
}

}  // namespace talbot
