#include "rotorsim/controller.hpp"

#include "rotorsim/error.hpp"

#include <cmath>

namespace rotorsim {

void GainSet::validate() const {
  for (const Vec3* g : {&k_x, &k_v, &k_R, &k_Omega})
    if (!((g->array() > 0.0).all())) throw ConfigError("gains", "all gains must be positive");
}

GainSet default_gains(const std::string& preset) {
  GainSet g;
  if (preset == "crazyflie") {
    g.k_x = Vec3(16.0, 16.0, 20.0);
    g.k_v = Vec3(8.0, 8.0, 10.0);
    g.k_R = Vec3::Constant(900.0);
    g.k_Omega = Vec3::Constant(60.0);
  }
  return g;
}

Se3Controller::Se3Controller(const VehicleParams& params, const GainSet& gains) : params_(params), gains_(gains) {
  gains_.validate();
}

ControlOutput Se3Controller::compute(const VehicleState& state, const FlatOutput& flat) {
  const double m = params_.mass;
  const Mat3 R = state.rotation();
  const Vec3 e_x = state.position - flat.position;
  const Vec3 e_v = state.velocity - flat.velocity;

  const Vec3 f_des = m * (-gains_.k_x.cwiseProduct(e_x) - gains_.k_v.cwiseProduct(e_v) + flat.acceleration +
                          params_.gravity * Vec3::UnitZ());
  ControlOutput out;
  const double f_norm = f_des.norm();
  Mat3 R_des;
  Vec3 omega_des = Vec3::Zero();

  const Vec3 b1_c(std::cos(flat.yaw), std::sin(flat.yaw), 0.0);
  const Vec3 b3_des = f_norm > 1e-6 * m * params_.gravity ? Vec3(f_des / f_norm) : Vec3::Zero();
  const Vec3 b2_raw = b3_des.cross(b1_c);

  if (f_norm <= 1e-6 * m * params_.gravity || b2_raw.norm() < 1e-6) {
    out.degenerate = true;
    R_des = last_attitude_des_.toRotationMatrix();
    const double eta_min = params_.eta_min;
    out.thrust = static_cast<double>(params_.num_rotors()) * params_.k_eta * eta_min * eta_min;
  } else {
    const Vec3 b2_des = b2_raw.normalized();
    const Vec3 b1_des = b2_des.cross(b3_des);
    R_des.col(0) = b1_des;
    R_des.col(1) = b2_des;
    R_des.col(2) = b3_des;
    out.thrust = f_des.dot(R.col(2));

    // feedforward body rates from d/dt of the thrust direction, using m * jerk
    const Vec3 f_dot = m * flat.jerk;
    const Vec3 b3_dot = (f_dot - b3_des * b3_des.dot(f_dot)) / f_norm;
    omega_des = Vec3(-b2_des.dot(b3_dot), b1_des.dot(b3_dot), flat.yaw_rate * b3_des.z());
    last_attitude_des_ = Quat(R_des);
  }

  const Vec3 e_R = 0.5 * vee(R_des.transpose() * R - R.transpose() * R_des);
  const Vec3 e_w = state.body_rate - R.transpose() * R_des * omega_des;
  const Vec3& w = state.body_rate;
  const Mat3& J = params_.inertia;
  out.moment = J * (-gains_.k_R.cwiseProduct(e_R) - gains_.k_Omega.cwiseProduct(e_w)) + w.cross(J * w);
  out.attitude_des = Quat(R_des).normalized();
  out.body_rate_des = omega_des;
  if (!std::isfinite(out.thrust) || !out.moment.allFinite()) throw NonFiniteError("control output");
  return out;
}

}  // namespace rotorsim
