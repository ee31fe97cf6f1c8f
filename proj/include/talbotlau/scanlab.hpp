#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace talbot {

/// One detector scan of the grating-3 position.
struct ScanRecord {
  std::vector<double> positions;        // m, strictly monotone
  std::vector<std::uint64_t> counts;
  double dwell = 0.0;                   // s per point
  double timestamp = 0.0;               // s, scan start
  double period = 0.0;                  // m, recorded in the CSV header
  std::uint64_t seed = 0;

  void validate() const;
  double total_time() const { return dwell * static_cast<double>(positions.size()); }
};

struct FringeFit {
  double visibility = 0.0;
  double phase = 0.0;        // rad; rate ~ 1 + V cos(2 pi x / d + phase)
  double mean_rate = 0.0;    // 1/s, dark counts removed if requested
  double amplitude = 0.0;    // 1/s, first-harmonic amplitude
  double sigma_visibility = 0.0;
  double sigma_phase = 0.0;
  double sigma_amplitude = 0.0;
};

/// `points` positions spaced evenly over `periods` fringe periods, starting at 0.
std::vector<double> uniform_positions(std::size_t points, double periods, double period);

ScanRecord synthesize_scan(double mean_rate, double visibility, double phase, double period,
                           std::span<const double> positions, double dwell, double dark_rate,
                           std::uint64_t seed, double timestamp = 0.0);

/// Least-squares fit of {1, cos, sin}. Uncertainties use the Poisson variance
/// of the fitted counts. `dark_rate`, when given, is subtracted from the mean.
FringeFit extract_fringe(const ScanRecord& scan, double period,
                         std::optional<double> dark_rate = std::nullopt);

/// Fitted first-harmonic amplitude over its standard error.
double snr_estimate(const ScanRecord& scan, double period);

struct DriftResult {
  double rate = 0.0;        // m/s; positive when the fringe pattern moves toward +x
  double sigma = 0.0;       // m/s
  /// Some consecutive phase step exceeded pi/2, so unwrapping may be ambiguous.
  bool ambiguous = false;
  std::vector<double> phases;  // unwrapped, in input order

  double nm_per_minute() const { return rate * 1e9 * 60.0; }
};

/// Weighted straight-line fit of unwrapped fringe phase against scan start time.
DriftResult drift_rate(std::span<const ScanRecord> scans, double period);

struct PeriodogramPeak {
  double period = 0.0;     // m
  double amplitude = 0.0;  // counts, first-harmonic amplitude at the peak
  double phase = 0.0;      // rad, same convention as FringeFit
  std::size_t bin = 0;
};

/// Discrete Fourier peak of a uniformly spaced scan (mean removed).
PeriodogramPeak periodogram_peak(const ScanRecord& scan);

std::string to_csv(const ScanRecord& scan);
ScanRecord scan_from_csv(std::string_view csv);

}  // namespace talbot
