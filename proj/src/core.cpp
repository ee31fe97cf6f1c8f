#include "talbotlau/core.hpp"

#include <cmath>

#include "talbotlau/errors.hpp"

namespace talbot {

namespace {

constexpr double kReferencePolarizability = 97.0;          // A^3, C70
constexpr double kReferenceC3 = 0.09 * units::eV_nm3;      // J m^3

}  // namespace

void Species::validate() const {
  if (!(mass > 0.0)) throw DomainError("species.mass must be positive");
  if (!(c3_gold >= 0.0)) throw DomainError("species.c3 must be non-negative");
  if (!(dc_polarizability >= 0.0))
    throw DomainError("species.polarizability must be non-negative");
}

Species Species::c70() {
  Species s;
  s.name = "C70";
  s.mass = 70.0 * constants::carbon_atomic_weight * constants::amu;
  s.dc_polarizability = kReferencePolarizability;
  s.c3_gold = c3_from_polarizability(kReferencePolarizability);
  return s;
}

void Geometry::validate() const {
  if (!(L1 > 0.0)) throw DomainError("geometry.L1 must be positive");
  if (!(L2 > 0.0)) throw DomainError("geometry.L2 must be positive");
  if (!std::isfinite(tilt_alpha)) throw DomainError("geometry.tilt must be finite");
  if (!std::isfinite(g)) throw DomainError("geometry.g must be finite");
}

void Geometry::require_symmetric() const {
  validate();
  if (std::abs(L1 - L2) > 1e-12 * L1)
    throw DomainError("Talbot-Lau propagation requires L1 == L2");
}

double de_broglie_wavelength(double mass, double v) {
  if (!(mass > 0.0)) throw DomainError("de_broglie_wavelength: mass must be positive");
  if (!(v > 0.0)) throw DomainError("de_broglie_wavelength: velocity must be positive");
  return constants::planck / (mass * v);
}

double talbot_length(double period, double lambda) {
  if (!(period > 0.0)) throw DomainError("talbot_length: period must be positive");
  if (!(lambda > 0.0)) throw DomainError("talbot_length: wavelength must be positive");
  return period * period / lambda;
}

double talbot_velocity(double mass, double period, double distance) {
  if (!(mass > 0.0) || !(period > 0.0) || !(distance > 0.0))
    throw DomainError("talbot_velocity: arguments must be positive");
  // L_T = d^2 m v / h = distance
  return constants::planck * distance / (mass * period * period);
}

double c3_from_polarizability(double alpha_A3) {
  if (!(alpha_A3 >= 0.0))
    throw DomainError("c3_from_polarizability: polarizability must be non-negative");
  return kReferenceC3 * (alpha_A3 / kReferencePolarizability);
}

}  // namespace talbot
