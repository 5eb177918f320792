#include "rotorsim/aero.hpp"

namespace rotorsim::aero {

Vec3 body_airspeed(const Vec3& velocity, const Vec3& wind, const Quat& attitude) {
  return attitude.conjugate() * (velocity - wind);
}

Vec3 rotor_airspeed(const Vec3& body_airspeed, const Vec3& body_rate, const Vec3& rotor_position) {
  return body_airspeed + body_rate.cross(rotor_position);
}

Vec3 parasitic_drag(const Vec3& body_airspeed, const Vec3& drag_diag) {
  return -body_airspeed.norm() * drag_diag.cwiseProduct(body_airspeed);
}

Vec3 rotor_drag(const Vec3& rotor_airspeed, double eta, const Vec3& rotor_drag_diag) {
  return -eta * rotor_drag_diag.cwiseProduct(rotor_airspeed);
}

Vec3 flapping_moment(const Vec3& rotor_airspeed, double eta, double k_flap) {
  return -k_flap * eta * Vec3::UnitZ().cross(rotor_airspeed);
}

AeroWrench total_aero_wrench(const VehicleState& state, const Vec3& wind, const VehicleParams& params) {
  AeroWrench w;
  const std::size_t n = params.num_rotors();
  w.rotor_drag.resize(n);
  w.flapping.resize(n);

  const Vec3 va = body_airspeed(state.velocity, wind, state.attitude);
  w.parasitic = parasitic_drag(va, params.parasitic_drag);
  w.force = w.parasitic;

  const Vec3 kdiag = params.rotor_drag_diag();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& r = params.rotor_positions[i];
    const double eta = state.rotor_speed(static_cast<Eigen::Index>(i));
    const Vec3 vai = rotor_airspeed(va, state.body_rate, r);
    w.rotor_drag[i] = rotor_drag(vai, eta, kdiag);
    w.flapping[i] = flapping_moment(vai, eta, params.k_flap);
    w.force += w.rotor_drag[i];
    w.moment += w.flapping[i] + r.cross(w.rotor_drag[i]);
  }
  return w;
}

}  // namespace rotorsim::aero
