#include "talbotlau/fresnel_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "talbotlau/errors.hpp"
#include "talbotlau/fft.hpp"

namespace talbot {

namespace {

using constants::pi;

complex cis_turns(double turns) {
  return std::polar(1.0, 2.0 * pi * (turns - std::round(turns)));
}

// Antiderivative of a periodic slit window of half width a.
double window_integral(double y, double a, double d) {
  const double k = std::floor((y + 0.5 * d) / d);
  return k * 2.0 * a + std::clamp(y - k * d, -a, a);
}

double cell_fraction(double center, double width, double a, double d) {
  return (window_integral(center + 0.5 * width, a, d) -
          window_integral(center - 0.5 * width, a, d)) /
         width;
}

// G(w0 + b) = sum_a c[a] exp(2 pi i alpha (p0 + a)(w0 + b)) for b in [0, nw),
// evaluated as a chirp-z transform.
std::vector<complex> chirp_sum(const std::vector<complex>& c, long long p0, long long w0,
                               std::size_t nw, double alpha) {
  const std::size_t na = c.size();
  const std::size_t len = fft::next_power_of_two(na + nw - 1);
  std::vector<complex> lhs(len), kernel(len);
  for (std::size_t a = 0; a < na; ++a) {
    const double ad = static_cast<double>(a);
    lhs[a] = c[a] * cis_turns(alpha * static_cast<double>(static_cast<long long>(a) * w0)) *
             cis_turns(0.5 * alpha * ad * ad);
  }
  for (std::size_t i = 0; i < na + nw - 1; ++i) {
    const double k = static_cast<double>(i) - static_cast<double>(na - 1);
    kernel[i] = cis_turns(-0.5 * alpha * k * k);
  }
  const auto conv = fft::circular_convolve(std::move(lhs), std::move(kernel));
  std::vector<complex> g(nw);
  for (std::size_t b = 0; b < nw; ++b) {
    const double bd = static_cast<double>(b);
    g[b] = conv[b + na - 1] * cis_turns(0.5 * alpha * bd * bd) *
           cis_turns(alpha * static_cast<double>(p0 * w0 + p0 * static_cast<long long>(b)));
  }
  return g;
}

}  // namespace

void OracleSettings::validate() const {
  if (!fft::is_power_of_two(grating_samples) || grating_samples < 4096)
    throw ConfigError("oracle.grating_samples must be a power of two >= 4096");
  if (!fft::is_power_of_two(screen_samples) || screen_samples > grating_samples)
    throw ConfigError("oracle.screen_samples must be a power of two <= grating_samples");
  if (!fft::is_power_of_two(source_samples) || 2 * source_samples > screen_samples)
    throw ConfigError("oracle.source_samples must be a power of two <= screen_samples / 2");
  if (shifts < 4) throw ConfigError("oracle.shifts must be >= 4");
  if (aperture_orders < 1) throw ConfigError("oracle.aperture_orders must be >= 1");
  if (!(doubling_tolerance > 0.0)) throw ConfigError("oracle.doubling_tolerance must be > 0");
}

OracleSettings OracleSettings::doubled() const {
  OracleSettings s = *this;
  s.grating_samples *= 2;
  s.source_samples *= 2;
  s.screen_samples *= 2;
  return s;
}

OracleResult fresnel_signal(const Interferometer& ifm, double v, bool vdw,
                            const OracleSettings& settings, std::span<const double> shifts) {
  ifm.validate();
  settings.validate();
  if (!(v > 0.0)) throw DomainError("fresnel_signal: velocity must be positive");

  const double d = ifm.period();
  const double lambda_l = de_broglie_wavelength(ifm.species.mass, v) * ifm.geometry.L1;
  const auto t = build_transmission(ifm.coherent_grating(vdw), v, settings.grating_samples);

  const long long N = static_cast<long long>(settings.grating_samples);
  const long long Mu = static_cast<long long>(settings.screen_samples);
  const long long Ms = static_cast<long long>(settings.source_samples);
  const long long ratio = N / Mu;
  const long long step = Mu / Ms;
  const double dl = d / static_cast<double>(N);
  const double hu = d / static_cast<double>(Mu);
  const double hs = d / static_cast<double>(Ms);
  const long long Q = 3 * Mu;

  // Sum over grating-2 periods, tapered at the aperture radius.
  const double radius =
      std::max(settings.aperture_orders * lambda_l / (2.0 * d), 8.0 * d);
  const long long P = static_cast<long long>(std::ceil(radius / d));
  std::vector<complex> taper(static_cast<std::size_t>(2 * P + 1));
  const double talbot_ratio = d * d / lambda_l;
  for (long long p = -P; p <= P; ++p) {
    const double r = std::abs(static_cast<double>(p) * d) / radius;
    double w = 1.0;
    if (r >= 1.0)
      w = 0.0;
    else if (r > 0.75)
      w = 0.5 * (1.0 + std::cos(pi * (r - 0.75) / 0.25));
    const double pd = static_cast<double>(p);
    taper[static_cast<std::size_t>(p + P)] = w * cis_turns(talbot_ratio * pd * pd);
  }
  const long long w_lo = -N / 2 - (Q - 1) * ratio;
  const long long w_hi = 2 * (N - 1) - N / 2;
  const double alpha = d * dl / lambda_l;
  const auto G = chirp_sum(taper, -P, w_lo, static_cast<std::size_t>(w_hi - w_lo + 1), alpha);

  long long j_lo = N, j_hi = -1;
  for (long long j = 0; j < N; ++j)
    if (t.samples[static_cast<std::size_t>(j)] != complex{0.0, 0.0}) {
      j_lo = std::min(j_lo, j);
      j_hi = j;
    }
  const double beta = dl * dl / lambda_l;
  std::vector<complex> ey(static_cast<std::size_t>(N));
  for (long long j = j_lo; j <= j_hi; ++j) {
    const double y = static_cast<double>(j - N / 2);
    ey[static_cast<std::size_t>(j)] = t.samples[static_cast<std::size_t>(j)] * cis_turns(beta * y * y);
  }

  // Intensity as a function of u = x0 + x2 on u_q = -d/2 + q hu.
  std::vector<double> intensity(static_cast<std::size_t>(Q));
  const double norm = dl * dl / (0.5 * lambda_l);
  constexpr long long reseed = 2048;
  for (long long q = 0; q < Q; ++q) {
    const double uq = static_cast<double>(q * ratio - N / 2);
    const complex rot = cis_turns(-beta * uq);
    complex z;
    complex acc{0.0, 0.0};
    for (long long j = j_lo; j <= j_hi; ++j) {
      if ((j - j_lo) % reseed == 0) z = cis_turns(-beta * static_cast<double>(j - N / 2) * uq);
      acc += ey[static_cast<std::size_t>(j)] * z *
             G[static_cast<std::size_t>(2 * j - N / 2 - q * ratio - w_lo)];
      z *= rot;
    }
    intensity[static_cast<std::size_t>(q)] = std::norm(acc) * norm;
  }

  OracleResult out;
  double mean = 0.0;
  for (long long q = Mu / 2; q < Mu / 2 + 2 * Mu; ++q) mean += intensity[static_cast<std::size_t>(q)];
  mean /= static_cast<double>(2 * Mu);
  out.background = t.mean_intensity() - mean;
  for (double& i : intensity) i += out.background;

  // Fold the source average in first: H_j = sum_i w0_i I(x0_i + x2_j), x2_j = j hu.
  const double a1 = ifm.gratings[0].open_half_width();
  const double a3 = ifm.gratings[2].open_half_width();
  std::vector<double> folded(static_cast<std::size_t>(2 * Mu), 0.0);
  for (long long i = 0; i < Ms; ++i) {
    const double x0 = -0.5 * d + (static_cast<double>(i) + 0.5) * hs;
    const double w0 = cell_fraction(x0, hs, a1, d);
    if (w0 == 0.0) continue;
    const long long base = i * step + step / 2;
    for (long long j = 0; j < 2 * Mu; ++j)
      folded[static_cast<std::size_t>(j)] += w0 * intensity[static_cast<std::size_t>(base + j)];
  }
  const double scale = (hs / d) * (hu / (2.0 * d));
  out.shifts.assign(shifts.begin(), shifts.end());
  out.signal.reserve(shifts.size());
  for (double s : shifts) {
    double acc = 0.0;
    for (long long j = 0; j < 2 * Mu; ++j)
      acc += folded[static_cast<std::size_t>(j)] *
             cell_fraction(static_cast<double>(j) * hu - s, hu, a3, d);
    out.signal.push_back(acc * scale);
  }
  out.spectrum.period = d;
  return out;
}

OracleResult fresnel_oracle(const Interferometer& ifm, double v, bool vdw,
                            const OracleSettings& settings) {
  const std::size_t M = settings.shifts;
  const auto k_max = static_cast<std::size_t>(ifm.numerics.k_max);
  if (M < 2 * k_max + 1)
    throw ConfigError("oracle.shifts must exceed twice numerics.k_max");
  const double d = ifm.period();
  std::vector<double> shifts(M);
  for (std::size_t l = 0; l < M; ++l) shifts[l] = d * static_cast<double>(l) / static_cast<double>(M);
  OracleResult out = fresnel_signal(ifm, v, vdw, settings, shifts);

  std::vector<complex> dft(out.signal.begin(), out.signal.end());
  fft::transform(dft, fft::Direction::forward);
  out.spectrum.harmonics.resize(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k)
    out.spectrum.harmonics[k] = dft[k] / static_cast<double>(M);
  return out;
}

double OracleComparison::difference() const {
  return std::abs(fourier_visibility - oracle_visibility);
}

double OracleComparison::doubling_change() const {
  return std::abs(doubled_visibility - oracle_visibility);
}

OracleComparison compare_with_oracle(const Interferometer& ifm, double v, bool vdw,
                                     const OracleSettings& settings) {
  OracleComparison c;
  c.velocity = v;
  c.vdw = vdw;
  c.fourier_visibility = monochromatic_visibility(ifm, v, vdw);
  c.oracle_visibility = fresnel_oracle(ifm, v, vdw, settings).spectrum.visibility();
  c.doubled_visibility = fresnel_oracle(ifm, v, vdw, settings.doubled()).spectrum.visibility();
  if (!(c.doubling_change() < settings.doubling_tolerance))
    throw OracleFailure("Fresnel oracle not converged at v = " + std::to_string(v) +
                        " m/s: doubling the sampling changed the visibility by " +
                        std::to_string(c.doubling_change()));
  return c;
}

}  // namespace talbot
