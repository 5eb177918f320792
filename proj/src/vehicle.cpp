#include "rotorsim/vehicle.hpp"

#include "rotorsim/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>

namespace rotorsim {

double VehicleParams::hover_rotor_speed() const {
  return std::sqrt(mass * gravity / (static_cast<double>(num_rotors()) * k_eta));
}

void VehicleParams::validate() const {
  if (!(mass > 0.0)) throw ConfigError("mass", "must be > 0");
  if (!inertia.allFinite() || (inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12 * inertia.cwiseAbs().maxCoeff())
    throw ConfigError("inertia", "must be symmetric");
  if (Eigen::LLT<Mat3>(inertia).info() != Eigen::Success)
    throw ConfigError("inertia", "must be positive definite");
  if (num_rotors() == 0) throw ConfigError("rotor_positions", "at least one rotor required");
  if (rotor_spin.size() != num_rotors())
    throw ConfigError("rotor_spin", "length must match rotor_positions");
  for (int s : rotor_spin)
    if (s != 1 && s != -1) throw ConfigError("rotor_spin", "entries must be +1 or -1");
  if (!(k_eta > 0.0)) throw ConfigError("k_eta", "must be > 0");
  if (!(tau_m > 0.0)) throw ConfigError("tau_m", "must be > 0");
  if ((parasitic_drag.array() < 0.0).any()) throw ConfigError("parasitic_drag", "entries must be >= 0");
  if (k_d < 0.0) throw ConfigError("k_d", "must be >= 0");
  if (k_z < 0.0) throw ConfigError("k_z", "must be >= 0");
  if (k_flap < 0.0) throw ConfigError("k_flap", "must be >= 0");
  if (eta_min < 0.0 || !(eta_max > eta_min)) throw ConfigError("eta_max", "require 0 <= eta_min < eta_max");
  if (!(gravity > 0.0)) throw ConfigError("gravity", "must be > 0");
}

std::vector<Vec3> x_configuration(double arm_length) {
  std::vector<Vec3> r;
  for (int i = 0; i < 4; ++i) {
    const double a = std::numbers::pi / 4.0 + i * std::numbers::pi / 2.0;
    r.emplace_back(arm_length * std::cos(a), arm_length * std::sin(a), 0.0);
  }
  return r;
}

VehicleParams default_quadrotor() {
  VehicleParams p;
  p.name = "default";
  p.mass = 0.65625;
  p.inertia = Vec3(3.65e-3, 3.68e-3, 7.03e-3).asDiagonal();
  p.rotor_positions = x_configuration(0.17);
  p.rotor_spin = {1, -1, 1, -1};
  p.k_eta = 5.57e-6;
  p.k_m = 1.36e-7;
  p.parasitic_drag = Vec3(5.0e-4, 5.0e-4, 1.0e-2);
  p.k_d = 5.95e-4;
  p.k_z = 1.16e-3;
  p.k_flap = 1.0e-5;
  p.tau_m = 0.005;
  p.eta_min = 0.0;
  p.eta_max = 1000.0;  // hover at ~54 % of max
  return p;
}

VehicleParams crazyflie_like() {
  VehicleParams p;
  p.name = "crazyflie";
  p.mass = 0.03;
  p.inertia = Vec3(1.43e-5, 1.43e-5, 2.89e-5).asDiagonal();
  p.rotor_positions = x_configuration(0.043);
  p.rotor_spin = {1, -1, 1, -1};
  p.k_eta = 2.3e-8;
  p.k_m = 7.8e-10;
  p.parasitic_drag = Vec3(5.0e-4, 5.0e-4, 1.0e-3);
  p.k_d = 1.025e-6;
  p.k_z = 7.55e-7;
  p.k_flap = 0.0;
  p.tau_m = 0.005;
  p.eta_min = 0.0;
  p.eta_max = 2500.0;
  return p;
}

VehicleParams vehicle_preset(const std::string& name) {
  if (name == "default") return default_quadrotor();
  if (name == "crazyflie") return crazyflie_like();
  throw ConfigError("vehicle.preset", "unknown preset '" + name + "'");
}

VehicleState VehicleState::hover(const VehicleParams& params, const Vec3& position) {
  VehicleState s;
  s.position = position;
  s.rotor_speed = VecX::Constant(static_cast<Eigen::Index>(params.num_rotors()), params.hover_rotor_speed());
  return s;
}

void VehicleState::check_finite() const {
  if (!position.allFinite()) throw NonFiniteError("position");
  if (!velocity.allFinite()) throw NonFiniteError("velocity");
  if (!attitude.coeffs().allFinite()) throw NonFiniteError("attitude");
  if (!body_rate.allFinite()) throw NonFiniteError("body_rate");
  if (!rotor_speed.allFinite()) throw NonFiniteError("rotor_speed");
  if (!std::isfinite(time)) throw NonFiniteError("time");
}

VecX pack_state(const VehicleState& s) {
  VecX y(kRigidBodyStateSize + s.rotor_speed.size());
  y.segment<3>(0) = s.position;
  y.segment<3>(3) = s.velocity;
  y(6) = s.attitude.w();
  y.segment<3>(7) = s.attitude.vec();
  y.segment<3>(10) = s.body_rate;
  y.tail(s.rotor_speed.size()) = s.rotor_speed;
  return y;
}

VehicleState unpack_state(const VecX& y, double t) {
  VehicleState s;
  s.position = y.segment<3>(0);
  s.velocity = y.segment<3>(3);
  s.attitude = Quat(y(6), y(7), y(8), y(9));
  s.body_rate = y.segment<3>(10);
  s.rotor_speed = y.tail(y.size() - kRigidBodyStateSize);
  s.time = t;
  return s;
}

VecX pack_derivative(const StateDerivative& d) {
  VecX y(kRigidBodyStateSize + d.deta.size());
  y.segment<3>(0) = d.dx;
  y.segment<3>(3) = d.dv;
  y.segment<4>(6) = d.dq;
  y.segment<3>(10) = d.dOmega;
  y.tail(d.deta.size()) = d.deta;
  return y;
}

}  // namespace rotorsim
