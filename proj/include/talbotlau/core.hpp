#pragma once

#include <numbers>
#include <string>

namespace talbot {

namespace constants {

inline constexpr double pi = std::numbers::pi;
// CODATA 2018, exact SI definitions where available.
inline constexpr double planck = 6.62607015e-34;          // J s
inline constexpr double hbar = planck / (2.0 * pi);        // J s
inline constexpr double amu = 1.66053906660e-27;           // kg
inline constexpr double electron_volt = 1.602176634e-19;   // J
inline constexpr double boltzmann = 1.380649e-23;          // J/K
inline constexpr double standard_gravity = 9.80665;        // m/s^2

// Average atomic weight of natural carbon, so C70 = 840.77 amu.
inline constexpr double carbon_atomic_weight = 12.011;

}  // namespace constants

/// Unit conversions used at the configuration boundary. Everything past the
/// boundary is SI.
namespace units {

inline constexpr double nm = 1e-9;
inline constexpr double pm = 1e-12;
inline constexpr double um = 1e-6;
inline constexpr double mrad = 1e-3;
/// 1 eV nm^3 expressed in J m^3.
inline constexpr double eV_nm3 = constants::electron_volt * 1e-27;

}  // namespace units

struct PhysConstants {
  double h;
  double hbar;
  double amu;
  double eV;

  static constexpr PhysConstants codata2018() {
    return {constants::planck, constants::hbar, constants::amu,
            constants::electron_volt};
  }
};

/// A molecular species. `dc_polarizability` is the polarizability volume in
/// cubic angstrom (the 4 pi eps0 factor is implied).
struct Species {
  std::string name;
  double mass = 0.0;               // kg
  double dc_polarizability = 0.0;  // A^3
  double c3_gold = 0.0;            // J m^3

  void validate() const;

  /// C70 with the natural-abundance carbon mass and the gold C3 extrapolated
  /// from its 97 A^3 polarizability.
  static Species c70();
};

/// Longitudinal layout of the three gratings and the table inclination.
struct Geometry {
  double L1 = 0.22;  // m, grating 1 -> 2
  double L2 = 0.22;  // m, grating 2 -> 3
  double tilt_alpha = 0.0;  // rad
  double g = constants::standard_gravity;

  void validate() const;
  /// The closed-form propagation assumes equal spacing.
  void require_symmetric() const;
};

double de_broglie_wavelength(double mass, double v);

double talbot_length(double period, double lambda);

/// Velocity at which the Talbot length of `period` equals `distance`.
double talbot_velocity(double mass, double period, double distance);

/// C3 against gold, scaled linearly from the C70 reference point
/// (97 A^3 -> 0.09 eV nm^3).
double c3_from_polarizability(double alpha_A3);

}  // namespace talbot
