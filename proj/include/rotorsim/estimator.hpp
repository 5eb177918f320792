#pragma once

#include "rotorsim/ukf.hpp"

#include <vector>

namespace rotorsim {

/// Tuning of the wind filter as used inside a simulation run.
struct EstimatorConfig {
  ukf::Scaling scaling;
  double attitude_time_constant = 0.05;
  // continuous-time process noise intensities (variance per second)
  double q_position = 1e-4;
  double q_velocity = 0.25;
  double q_attitude = 1e-2;
  double q_wind = 0.25;
  // accelerometer measurement variance, including model mismatch allowance
  double r_accel = 0.2 * 0.2;
  double r_position = 1e-3 * 1e-3;
  double r_velocity = 1e-2 * 1e-2;
  double r_attitude = 2e-3 * 2e-3;
  double initial_wind_sigma = 3.0;
  // ablation: feed the filter the true rotor thrust instead of the command
  bool use_true_thrust = false;

  void validate() const;
};

/// Recursive wind estimator: the UKF plus its bookkeeping (control hold,
/// time alignment, skipped-update log).
class WindEstimator {
 public:
  WindEstimator(const EstimatorConfig& cfg, double mass_hat, const Vec3& drag_hat, double gravity);

  bool initialized() const { return initialized_; }

  /// Seed the belief from a motion-capture sample.
  void initialize(const MocapSample& z, double t);

  /// Propagate to time t with the control held over the interval.
  void predict_to(double t, const ukf::ControlInput& u);

  /// Measurement must be within half a step of the belief time.
  ukf::UpdateStatus update(const SensorMeasurement& meas, double thrust);

  const ukf::UkfBelief& belief() const { return belief_; }
  const ukf::ProcessModelParams& process() const { return process_; }
  long skipped_updates() const { return skipped_; }

 private:
  EstimatorConfig cfg_;
  ukf::ProcessModelParams process_;
  Mat3 r_accel_;
  Eigen::MatrixXd r_mocap_;
  ukf::UkfBelief belief_;
  bool initialized_ = false;
  long skipped_ = 0;
  double last_dt_ = 0.0;
};

/// Flight data consumed by the drag fit. All vectors share one length.
struct CalibrationLog {
  std::vector<Vec3> velocity;   // world, ground truth
  std::vector<Quat> attitude;   // ground truth
  std::vector<Vec3> wind;       // world, ground truth (normally zero)
  std::vector<double> thrust;   // commanded collective thrust, N
  std::vector<Vec3> accel;      // accelerometer samples, body frame
};

struct CalibrationResult {
  Vec3 drag = Vec3::Zero();               // fitted diag(C_hat), clamped >= 0
  Vec3 residual_rms = Vec3::Zero();       // N, specific-force residual times mass
  Vec3 regressor_rms = Vec3::Zero();      // RMS of |v_a| v_a per axis, (m/s)^2
  Vec3 relative_uncertainty = Vec3::Zero();  // standard error / |coefficient|
  std::size_t samples = 0;
  bool warning = false;  // poor excitation, clamped, or unidentifiable coefficient
};

struct CalibrationOptions {
  double min_regressor_rms = 0.5;         // (m/s)^2
  double max_relative_uncertainty = 0.1;  // on the horizontal axes
};

/// Per-axis least-squares fit of quadratic drag coefficients from body-frame
/// specific force residuals against |v_a| v_a regressors.
CalibrationResult calibrate_drag(const CalibrationLog& log, double mass_hat, const CalibrationOptions& opts = {});

}  // namespace rotorsim
