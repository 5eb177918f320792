#include "rotorsim/actuators.hpp"

#include "rotorsim/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace rotorsim {

bool MotorCommand::any_saturated() const {
  return std::any_of(saturated.begin(), saturated.end(), [](bool b) { return b; });
}

Mixer::Mixer(const VehicleParams& params) : eta_min_(params.eta_min), eta_max_(params.eta_max) {
  const auto n = static_cast<Eigen::Index>(params.num_rotors());
  if (n < 4) throw ConfigError("rotor_positions", "mixer needs at least four rotors");
  allocation_.resize(4, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& r = params.rotor_positions[static_cast<std::size_t>(i)];
    allocation_(0, i) = params.k_eta;
    allocation_(1, i) = params.k_eta * r.y();
    allocation_(2, i) = -params.k_eta * r.x();
    allocation_(3, i) = params.k_m * params.rotor_spin[static_cast<std::size_t>(i)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(allocation_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.minCoeff() <= 1e-9 * sv.maxCoeff())
    throw ConfigError("rotor_positions", "allocation matrix is rank deficient");
  pinv_ = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

MotorCommand Mixer::mix(double thrust, const Vec3& moment) const {
  Eigen::Vector4d wrench(thrust, moment.x(), moment.y(), moment.z());
  const VecX eta_sq = pinv_ * wrench;

  MotorCommand cmd;
  cmd.eta_c.resize(eta_sq.size());
  cmd.saturated.resize(static_cast<std::size_t>(eta_sq.size()));
  for (Eigen::Index i = 0; i < eta_sq.size(); ++i) {
    const double eta = std::sqrt(std::max(0.0, eta_sq(i)));
    cmd.saturated[static_cast<std::size_t>(i)] = eta < eta_min_ || eta > eta_max_;
    cmd.eta_c(i) = std::clamp(eta, eta_min_, eta_max_);
  }
  return cmd;
}

double first_order_response(double eta0, double eta_c, double tau_m, double t) {
  return eta_c + (eta0 - eta_c) * std::exp(-t / tau_m);
}

}  // namespace rotorsim
