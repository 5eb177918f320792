#pragma once

#include "rotorsim/error.hpp"
#include "rotorsim/vehicle.hpp"

#include <functional>

namespace rotorsim {

/// Body-frame force/moment pair.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
};

/// World-frame wind as a function of (time, position).
using WindField = std::function<Vec3(double, const Vec3&)>;

/// Thrust and yaw drag of the rotors at the given speeds.
Wrench control_wrench(const VecX& rotor_speed, const VehicleParams& params);

/// Newton-Euler equations of motion with first-order rotor lag.
///
/// The attitude kinematics use q_dot = 0.5 q (x) (0, Omega). When
/// `aero_enabled` is false the aerodynamic wrench is identically zero.
/// Throws NonFiniteError naming the offending input.
StateDerivative dynamics(const VehicleState& state, const VecX& eta_cmd, const Vec3& wind,
                         const VehicleParams& params, bool aero_enabled = true);

struct IntegratorOptions {
  double rtol = 1e-6;
  double atol = 1e-8;
  bool aero_enabled = true;
  long max_steps = 1'000'000;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
  double last_step = 0.0;  // reused as the initial step guess on the next call
};

/// Raised when the adaptive step collapses. Carries the last accepted state.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, VehicleState last_good)
      : Error(what), last_good_(std::move(last_good)) {}
  const VehicleState& last_good() const { return last_good_; }
  double time() const { return last_good_.time; }

 private:
  VehicleState last_good_;
};

/// Advance `state` by `dt_out` seconds with a Dormand-Prince 5(4) embedded
/// pair and adaptive step size. The rotor command is held constant. After
/// every accepted step the attitude is renormalized and rotor speeds are
/// clamped to [eta_min, eta_max].
VehicleState integrate(const VehicleState& state, const VecX& eta_cmd, const WindField& wind,
                       const VehicleParams& params, double dt_out,
                       const IntegratorOptions& options = {}, IntegrationStats* stats = nullptr);

/// Convenience overload for a wind held constant over the interval.
VehicleState integrate(const VehicleState& state, const VecX& eta_cmd, const Vec3& wind,
                       const VehicleParams& params, double dt_out,
                       const IntegratorOptions& options = {}, IntegrationStats* stats = nullptr);

}  // namespace rotorsim
