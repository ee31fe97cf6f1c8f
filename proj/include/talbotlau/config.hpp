#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "talbotlau/classical.hpp"
#include "talbotlau/fresnel_oracle.hpp"
#include "talbotlau/quantum.hpp"

namespace talbot {

struct SweepSettings {
  std::vector<double> centers;  // m/s
  bool quantum_vdw = true;
  bool quantum_novdw = true;
  bool classical_vdw = true;
  bool classical_novdw = true;
  bool flux = true;
};

struct ScanSettings {
  double velocity = 115.0;                // m/s
  double rate = 225.0;                    // mean detected rate, 1/s
  std::optional<double> visibility;       // empty: quantum vdW model at `velocity`
  double phase = 0.0;                     // rad
  std::size_t points = 100;
  double dwell = 1.5;                     // s
  double periods = 3.0;
  double dark_rate = 0.2;                 // 1/s
  bool subtract_dark = false;
  std::size_t repeats = 1;
  double interval = 300.0;                // s between scan starts
  double drift = 0.0;                     // m/s of fringe motion
};

struct GravitySettings {
  double velocity = 115.0;
  std::vector<double> tilts;  // rad
};

struct ScaleSettings {
  double mass_factor = 16.0;
  double period_factor = 0.25;
  double v_min = 80.0;
  double v_max = 215.0;
  double v_step = 0.2;
};

struct OracleCheckSettings {
  std::vector<double> velocities{90.0, 115.0, 160.0};
  double tolerance = 0.01;
  OracleSettings oracle;
};

/// Everything a scenario run needs. Built from the flat `section.key = value`
/// text format; all fields are SI.
struct RunConfig {
  Interferometer ifm = Interferometer::c70_default();
  DistributionModel distribution;
  RayBundleSpec rays;
  SweepSettings sweep;
  ScanSettings scan;
  GravitySettings gravity;
  ScaleSettings scale;
  OracleCheckSettings oracle;
  std::uint64_t seed = 1;

  /// Checks every section; errors name the offending key.
  void validate() const;
};

/// Text of the full default configuration.
std::string default_config_text();

RunConfig default_config();

/// Applies `text` on top of the defaults. Unknown or repeated keys and
/// malformed values raise ConfigError naming the key and line.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace talbot
