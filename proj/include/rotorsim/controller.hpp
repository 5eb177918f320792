#pragma once

#include "rotorsim/trajectory.hpp"
#include "rotorsim/vehicle.hpp"

namespace rotorsim {

/// Per-axis gains of the geometric tracking controller. Attitude gains are
/// scaled by the inertia tensor, position gains by the mass.
struct GainSet {
  Vec3 k_x = Vec3(6.5, 6.5, 15.0);
  Vec3 k_v = Vec3(4.0, 4.0, 9.0);
  Vec3 k_R = Vec3::Constant(544.0);
  Vec3 k_Omega = Vec3::Constant(46.64);

  void validate() const;
};

/// Gains tuned for a vehicle preset ("default", "crazyflie").
GainSet default_gains(const std::string& preset);

struct ControlOutput {
  double thrust = 0.0;           // N along b3
  Vec3 moment = Vec3::Zero();    // N m, body frame
  Quat attitude_des = Quat::Identity();
  Vec3 body_rate_des = Vec3::Zero();
  bool degenerate = false;       // desired force vanished; previous attitude held
};

/// Geometric tracking controller on SE(3).
///
/// The desired force m(-k_x e_x - k_v e_v + a_des + g e3) fixes the thrust
/// axis; yaw fixes the heading. Body-rate feedforward comes from the desired
/// jerk. When the desired force is near zero the last valid attitude is held
/// and the thrust drops to the rotor minimum.
class Se3Controller {
 public:
  Se3Controller(const VehicleParams& params, const GainSet& gains);

  ControlOutput compute(const VehicleState& state, const FlatOutput& flat);

 private:
  VehicleParams params_;
  GainSet gains_;
  Quat last_attitude_des_ = Quat::Identity();
};

}  // namespace rotorsim
