#pragma once

#include "rotorsim/error.hpp"
#include "rotorsim/sensors.hpp"

#include <Eigen/Core>

#include <vector>

namespace rotorsim::ukf {

/// Error-state layout: [position, velocity, attitude (rotation vector), wind].
inline constexpr int kDim = 12;
inline constexpr int kPos = 0;
inline constexpr int kVel = 3;
inline constexpr int kAtt = 6;
inline constexpr int kWind = 9;

using ErrVec = Eigen::Matrix<double, kDim, 1>;
using ErrCov = Eigen::Matrix<double, kDim, kDim>;

/// Nominal (on-manifold) estimator state.
struct NavState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Quat attitude = Quat::Identity();
  Vec3 wind = Vec3::Zero();
};

/// state (+) delta, attitude perturbed on the right.
NavState retract(const NavState& s, const ErrVec& delta);
/// a (-) b such that retract(b, local(a, b)) == a.
ErrVec local(const NavState& a, const NavState& b);

struct UkfBelief {
  NavState mean;
  ErrCov cov = ErrCov::Identity();
  double t = 0.0;
};

struct Scaling {
  double alpha = 1e-1;
  double beta = 2.0;
  double kappa = 0.0;
};

struct SigmaPoints {
  std::vector<NavState> points;  // 2L + 1, points[0] is the mean
  std::vector<double> wm;
  std::vector<double> wc;
};

class CovarianceError : public Error {
 public:
  CovarianceError(const std::string& what, ErrCov cov) : Error(what), cov_(cov) {}
  const ErrCov& covariance() const { return cov_; }

 private:
  ErrCov cov_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, UkfBelief snapshot) : Error(what), snapshot_(std::move(snapshot)) {}
  const UkfBelief& snapshot() const { return snapshot_; }

 private:
  UkfBelief snapshot_;
};

/// Matrix square root S with S S^T = cov. Uses Cholesky, falling back to an
/// eigendecomposition for semidefinite input. Throws CovarianceError when an
/// eigenvalue is below -1e-10 (relative to the largest).
ErrCov covariance_sqrt(const ErrCov& cov);

SigmaPoints sigma_points(const UkfBelief& belief, const Scaling& scaling);

/// Weighted mean of on-manifold points; the attitude mean is taken in the
/// tangent space of points[0].
NavState weighted_mean(const std::vector<NavState>& points, const std::vector<double>& wm);

/// Process model parameters: believed mass, fitted quadratic drag, and
/// continuous-time process noise intensity (per second).
struct ProcessModelParams {
  double mass = 1.0;
  Vec3 drag = Vec3::Zero();  // diag(C_hat)
  ErrCov q = ErrCov::Zero();
  double attitude_time_constant = 0.05;  // s; first-order pull toward the commanded attitude
  bool freeze_attitude = false;
  double gravity = kDefaultGravity;

  void validate() const;
};

/// Continuous-time noise intensity with one variance per block.
ErrCov block_diagonal_noise(double position, double velocity, double attitude, double wind);

struct ControlInput {
  double thrust = 0.0;                  // N, collective along b3
  Quat attitude_cmd = Quat::Identity();
};

/// Specific force predicted by the process model in the body frame:
/// (T e3 - C_hat |v_a| v_a) / m_hat with v_a = R^T (v - w).
Vec3 predicted_specific_force(const NavState& s, double thrust, const ProcessModelParams& p);

/// One-step propagation of a single state through the process model.
NavState propagate(const NavState& s, const ControlInput& u, double dt, const ProcessModelParams& p);

UkfBelief predict(const UkfBelief& belief, const ControlInput& u, double dt, const ProcessModelParams& p,
                  const Scaling& scaling = {});

enum class UpdateStatus { Applied, SkippedSingular };

struct MocapModel {
  bool include_attitude = true;
};

/// Unscented update with an accelerometer sample.
UpdateStatus update_accel(UkfBelief& belief, const Vec3& accel, double thrust, const ProcessModelParams& p,
                          const Mat3& r_meas, const Scaling& scaling = {});

/// Unscented update with a motion-capture sample. `r_meas` is 9x9 over
/// (position, velocity, attitude) or 6x6 when attitude is excluded.
UpdateStatus update_mocap(UkfBelief& belief, const MocapSample& z, const Eigen::MatrixXd& r_meas,
                          const MocapModel& model = {}, const Scaling& scaling = {});

/// Dispatch on measurement kind. `thrust` feeds the accelerometer model.
UpdateStatus update(UkfBelief& belief, const SensorMeasurement& meas, double thrust, const ProcessModelParams& p,
                    const Mat3& r_accel, const Eigen::MatrixXd& r_mocap, const MocapModel& model = {},
                    const Scaling& scaling = {});

/// Symmetrize in place and verify the eigenvalue floor.
void enforce_symmetric(ErrCov& cov);
bool is_psd(const ErrCov& cov, double floor = -1e-10);

}  // namespace rotorsim::ukf
