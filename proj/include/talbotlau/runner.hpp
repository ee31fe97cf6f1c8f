#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "talbotlau/config.hpp"
#include "talbotlau/scanlab.hpp"

namespace talbot {

struct SweepColumn {
  std::string name;                // e.g. vis_quantum_vdw
  std::vector<double> values;
  std::vector<double> contrast;    // (max - min) / (max + min); empty for flux
};

struct SweepResult {
  std::vector<double> centers;
  std::vector<SweepColumn> columns;

  const SweepColumn* column(const std::string& name) const;
};

SweepResult run_visibility_sweep(const RunConfig& cfg);
std::string sweep_csv(const SweepResult& r);
std::string sweep_contrast_csv(const SweepResult& r);

struct ScanResult {
  double model_visibility = 0.0;   // visibility fed to the synthesis
  std::vector<ScanRecord> scans;
  std::vector<FringeFit> fits;
  std::vector<double> snr;
  std::vector<PeriodogramPeak> peaks;
  std::optional<DriftResult> drift;
};

ScanResult run_scan_sim(const RunConfig& cfg);
std::string scan_summary_csv(const ScanResult& r);

struct GravityRow {
  double alpha = 0.0;          // rad
  double phase = 0.0;          // rad, relative to the untilted fringe
  double phase_per_mrad = 0.0; // NaN at alpha = 0
  double visibility = 0.0;
};

struct GravityResult {
  std::vector<GravityRow> rows;
  double slope_per_mrad = 0.0;  // least-squares phase slope
};

GravityResult run_gravity_sweep(const RunConfig& cfg);
std::string gravity_csv(const GravityResult& r);

struct PeakWidth {
  double v_peak = 0.0;
  double visibility = 0.0;
  double fwhm = 0.0;           // m/s
  bool bounded = true;         // both half-maximum crossings inside the range
  double relative() const { return fwhm / v_peak; }
};

/// Full width at half maximum of the tallest maximum of y(x), with linear
/// interpolation of the crossings.
PeakWidth peak_width(const std::vector<double>& x, const std::vector<double>& y);

struct ScaleCase {
  std::string name;
  double mass = 0.0;
  double period = 0.0;
  double talbot_length = 0.0;  // at the peak velocity
  std::vector<double> velocities;
  std::vector<double> visibility;
  PeakWidth peak;
};

struct ScaleResult {
  ScaleCase baseline;
  ScaleCase scaled;
};

ScaleResult run_scale_study(const RunConfig& cfg);
std::string scale_csv(const ScaleResult& r);
std::string scale_summary_csv(const ScaleResult& r);

struct OracleRow {
  OracleComparison comparison;
  bool converged = true;
  std::string failure;
  bool pass = false;
};

struct OracleCheckResult {
  std::vector<OracleRow> rows;
  bool pass = true;
};

OracleCheckResult run_oracle_check(const RunConfig& cfg);
std::string oracle_csv(const OracleCheckResult& r);

/// Writes `content` to `dir / name`, creating `dir` if needed.
void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& content);

}  // namespace talbot
