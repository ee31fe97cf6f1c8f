#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "talbotlau/quantum.hpp"

namespace talbot {

enum class RayIntegration { quadrature, monte_carlo };

/// How the ray bundle through the three gratings is integrated. The source
/// coordinate x0 is integrated exactly (window overlap); quadrature mode
/// resolves the grating-2 coordinate x1 with composite 8-point Gauss-Legendre
/// panels whose width follows the local fringe phase.
struct RayBundleSpec {
  RayIntegration mode = RayIntegration::quadrature;
  double max_panel_width = 991.25e-9 / 512.0;  // m
  double phase_step = 0.5;                     // rad of fringe phase per panel
  /// Near the walls the fringe phase winds faster than this fraction of the
  /// slit width per radian; that remainder is treated as a flat background.
  double tail_tolerance = 1e-4;
  std::size_t shifts = 64;
  std::size_t mc_rays = 1 << 20;
  std::uint64_t seed = 1;

  void validate() const;
  RayBundleSpec refined() const;  // halves panel width and phase step
};

/// Transverse velocity change at grating 2 for a molecule passing at x.
double vdw_kick(const GratingSpec& spec2, double x, double v, double mass);

/// Detected flux versus grating-3 shift, normalized like the quantum signal
/// (fully open gratings give 1).
std::vector<double> classical_signal(const Interferometer& ifm, double v, bool vdw,
                                     std::span<const double> shifts,
                                     const RayBundleSpec& rays = {});

/// Harmonics from a uniform shift scan over one period.
FringeSpectrum classical_spectrum(const Interferometer& ifm, double v, bool vdw,
                                  const RayBundleSpec& rays = {});

double classical_visibility(const Interferometer& ifm, double v, bool vdw,
                            const RayBundleSpec& rays = {});

AveragedFringe classical_velocity_averaged(const Interferometer& ifm,
                                           const VelocityDistribution& dist, bool vdw,
                                           const RayBundleSpec& rays = {});

VisibilityCurve classical_visibility_curve(const Interferometer& ifm,
                                           std::span<const double> centers,
                                           const DistributionModel& model, bool vdw,
                                           const RayBundleSpec& rays = {});

/// Thin-lens focal length of one slit from the kick linearized about its
/// center. Negative (diverging).
double classical_focal_length(const GratingSpec& spec2, double v, double mass);

/// Velocity at which |classical_focal_length| equals `distance`.
double focal_matching_velocity(const GratingSpec& spec2, double mass, double distance);

/// Contrast retained when two gratings are rotated by delta_theta relative to
/// each other over an illuminated height.
double tilt_visibility_factor(double delta_theta, double beam_height, double period);

}  // namespace talbot
