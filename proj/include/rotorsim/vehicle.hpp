#pragma once

#include "rotorsim/math.hpp"

#include <string>
#include <vector>

namespace rotorsim {

/// Physical description of a multirotor with co-planar rotors.
///
/// Units: SI throughout. Rotor positions are hub offsets from the center of
/// mass in the body frame (x forward, z up through the rotor plane). Spin
/// directions are +1 / -1; a positive spin produces positive yaw drag torque
/// along b3.
struct VehicleParams {
  std::string name = "custom";
  double mass = 1.0;
  Mat3 inertia = Mat3::Identity();
  std::vector<Vec3> rotor_positions;
  std::vector<int> rotor_spin;

  double k_eta = 0.0;   // thrust per rotor = k_eta * eta^2
  double k_m = 0.0;     // yaw torque per rotor = k_m * eta^2
  Vec3 parasitic_drag = Vec3::Zero();  // diag(c_Dx, c_Dy, c_Dz)
  double k_d = 0.0;     // in-plane rotor drag
  double k_z = 0.0;     // axial rotor drag
  double k_flap = 0.0;
  double tau_m = 0.005;
  double eta_min = 0.0;
  double eta_max = 1000.0;
  double gravity = kDefaultGravity;

  std::size_t num_rotors() const { return rotor_positions.size(); }
  Vec3 rotor_drag_diag() const { return Vec3(k_d, k_d, k_z); }

  /// Rotor speed at which the rotors exactly cancel gravity.
  double hover_rotor_speed() const;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

/// Symmetric X-configuration quadrotor, arm length measured hub to center.
std::vector<Vec3> x_configuration(double arm_length);

/// Preset approximating a small quadrotor at the midpoint of the randomized
/// mass range used for the wind-estimation study. Not measured data.
VehicleParams default_quadrotor();

/// Preset approximating a Crazyflie-class micro quadrotor. Not measured data.
VehicleParams crazyflie_like();

/// Look up a preset by name ("default", "crazyflie"); throws ConfigError.
VehicleParams vehicle_preset(const std::string& name);

struct VehicleState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Quat attitude = Quat::Identity();  // body -> world
  Vec3 body_rate = Vec3::Zero();
  VecX rotor_speed;
  double time = 0.0;

  Mat3 rotation() const { return attitude.toRotationMatrix(); }

  /// Hover at `position` with every rotor at the hover speed.
  static VehicleState hover(const VehicleParams& params, const Vec3& position = Vec3::Zero());

  /// Throws NonFiniteError naming the first non-finite field.
  void check_finite() const;
};

struct StateDerivative {
  Vec3 dx = Vec3::Zero();
  Vec3 dv = Vec3::Zero();
  Vec4 dq = Vec4::Zero();  // (w, x, y, z)
  Vec3 dOmega = Vec3::Zero();
  VecX deta;
};

/// Flat vector layout used by the integrators: [x, v, q(w,x,y,z), Omega, eta].
inline constexpr int kRigidBodyStateSize = 13;
VecX pack_state(const VehicleState& s);
VehicleState unpack_state(const VecX& y, double t);
VecX pack_derivative(const StateDerivative& d);

}  // namespace rotorsim
