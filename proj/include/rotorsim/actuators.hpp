#pragma once

#include "rotorsim/vehicle.hpp"

#include <Eigen/Core>

#include <vector>

namespace rotorsim {

struct MotorCommand {
  VecX eta_c;                   // rad/s, clamped to [eta_min, eta_max]
  std::vector<bool> saturated;  // pre-clamp command fell outside the bounds

  bool any_saturated() const;
};

/// Control allocation: inverts the thrust / moment map, which is linear in
/// the squared rotor speeds, with a Moore-Penrose pseudo-inverse.
class Mixer {
 public:
  /// Throws ConfigError if fewer than four rotors or the allocation matrix is rank deficient.
  explicit Mixer(const VehicleParams& params);

  MotorCommand mix(double thrust, const Vec3& moment) const;

  /// 4 x n map from squared rotor speeds to (collective thrust, body moment).
  const Eigen::MatrixXd& allocation() const { return allocation_; }

 private:
  double eta_min_;
  double eta_max_;
  Eigen::MatrixXd allocation_;
  Eigen::MatrixXd pinv_;
};

/// Closed-form response of the first-order rotor lag to a constant command.
double first_order_response(double eta0, double eta_c, double tau_m, double t);

}  // namespace rotorsim
