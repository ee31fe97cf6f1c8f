#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace talbot {

enum class DistributionKind { delta, gaussian, effusive_weighted_gaussian };

/// Thermal effusive source; the transmitted flux density per unit velocity is
/// proportional to v^3 exp(-m v^2 / 2 k T).
struct EffusiveSource {
  double mass = 0.0;             // kg
  double temperature = 923.15;   // K (650 C oven)

  double flux_density(double v) const;
  /// Integral of flux_density over all velocities.
  double total_flux() const;
  double peak_velocity() const;
};

struct VelocityDistribution {
  DistributionKind kind = DistributionKind::gaussian;
  double center = 0.0;          // m/s
  double fwhm_fraction = 0.0;   // FWHM / center
  EffusiveSource source;        // used by the effusive weighting and the flux estimate

  void validate() const;
  double sigma() const;
};

struct VelocityGrid {
  std::vector<double> velocities;
  std::vector<double> weights;  // sum to 1
};

/// Velocity FWHM fraction interpolated between 8 % at 80 m/s and 35 % at
/// 215 m/s. Centers outside [60, 260] m/s are clamped into that range.
double fwhm_model(double v0);

/// Equally spaced nodes over +-3 sigma. `n` must be odd and >= 3; a delta
/// distribution (or zero width) yields a single node.
VelocityGrid discretize(const VelocityDistribution& dist, std::size_t n);

/// Fraction of the effusive source flux passed by the selector band. For a
/// delta distribution it is the source density at the center relative to its
/// maximum.
double relative_flux(const VelocityDistribution& dist, std::size_t n);

/// Builds the distribution used at each center of a sweep.
struct DistributionModel {
  DistributionKind kind = DistributionKind::gaussian;
  std::optional<double> fwhm_fraction;  // empty: fwhm_model
  EffusiveSource source;

  VelocityDistribution at(double center) const;
};

/// Vertical-plane gravitational velocity selector. Heights are full window
/// sizes; the limiter and detector windows are centered on y = 0.
struct SelectorGeometry {
  double oven_height = 200e-6;
  double limiter_height = 150e-6;
  double limiter_z = 1.38;
  double detector_z = 2.38;
  double detector_height = 16e-6;  // 2 x 8 um waist
  double g = 9.80665;

  void validate() const;
};

struct SelectorScan {
  double v_min = 20.0;
  double v_max = 1500.0;
  double v_step = 0.5;
  int source_points = 41;
  int detector_points = 9;
};

struct VelocityBand {
  double v_min = 0.0;
  double v_center = 0.0;  // transmission-weighted mean
  double v_max = 0.0;
  /// No velocity selection (g = 0 with aligned windows) or the band runs into
  /// the scan limits.
  bool unbounded = false;
  /// Transmitted fraction of (start, arrival) pairs at each scanned velocity.
  std::vector<double> velocities;
  std::vector<double> transmission;
};

/// Brute-force parabola scan. `oven_offset` is the vertical position of the
/// orifice center relative to the limiter axis (negative = below).
VelocityBand velocity_band_from_geometry(const SelectorGeometry& sel, double oven_offset,
                                         const SelectorScan& scan = {});

}  // namespace talbot
