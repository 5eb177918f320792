#pragma once

#include "rotorsim/vehicle.hpp"

#include <vector>

namespace rotorsim::aero {

/// Aerodynamic wrench in the body frame with its per-term breakdown.
///
/// force  == parasitic + sum(rotor_drag)
/// moment == sum(flapping + rotor_positions[i] x rotor_drag[i])
struct AeroWrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  Vec3 parasitic = Vec3::Zero();
  std::vector<Vec3> rotor_drag;
  std::vector<Vec3> flapping;
};

/// Relative airspeed in the body frame: R^T (v - w).
Vec3 body_airspeed(const Vec3& velocity, const Vec3& wind, const Quat& attitude);

/// Airspeed seen at a rotor hub including the rigid-body rotation term.
Vec3 rotor_airspeed(const Vec3& body_airspeed, const Vec3& body_rate, const Vec3& rotor_position);

/// Quadratic airframe drag -C |v_a| v_a.
Vec3 parasitic_drag(const Vec3& body_airspeed, const Vec3& drag_diag);

/// Rotor drag -K eta v_ai with K = diag(k_d, k_d, k_z).
Vec3 rotor_drag(const Vec3& rotor_airspeed, double eta, const Vec3& rotor_drag_diag);

/// Blade flapping moment -k_flap eta (b3 x v_ai): tilts the disc away from
/// the relative wind, so forward airspeed pitches the nose up.
Vec3 flapping_moment(const Vec3& rotor_airspeed, double eta, double k_flap);

AeroWrench total_aero_wrench(const VehicleState& state, const Vec3& wind, const VehicleParams& params);

}  // namespace rotorsim::aero
