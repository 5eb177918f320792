#pragma once

#include "rotorsim/vehicle.hpp"

#include <random>
#include <variant>

namespace rotorsim {

using Rng = std::mt19937_64;

struct ImuConfig {
  Vec3 lever_arm = Vec3::Zero();        // IMU position in the body frame, m
  Quat body_to_imu = Quat::Identity();  // rotation applied to the body-frame specific force
  Mat3 accel_noise_cov = Mat3::Identity() * (0.05 * 0.05);
  Mat3 gyro_noise_cov = Mat3::Identity() * (0.005 * 0.005);
  Vec3 accel_bias_rw = Vec3::Constant(1e-3);  // (m/s^2)/sqrt(s)
  Vec3 gyro_bias_rw = Vec3::Constant(1e-4);   // (rad/s)/sqrt(s)
  double rate_hz = 500.0;

  void validate() const;
};

struct MocapConfig {
  Mat3 position_cov = Mat3::Identity() * (1e-3 * 1e-3);
  Mat3 velocity_cov = Mat3::Identity() * (1e-2 * 1e-2);
  Mat3 attitude_cov = Mat3::Identity() * (2e-3 * 2e-3);  // small-angle perturbation, rad^2
  Mat3 body_rate_cov = Mat3::Identity() * (5e-3 * 5e-3);
  double rate_hz = 100.0;

  void validate() const;
};

struct ImuBias {
  Vec3 accel = Vec3::Zero();
  Vec3 gyro = Vec3::Zero();
};

struct ImuSample {
  Vec3 accel = Vec3::Zero();
  Vec3 gyro = Vec3::Zero();
};

struct MocapSample {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Quat attitude = Quat::Identity();
  Vec3 body_rate = Vec3::Zero();
};

struct SensorMeasurement {
  double t = 0.0;
  std::variant<ImuSample, MocapSample> data;

  bool is_imu() const { return std::holds_alternative<ImuSample>(data); }
  const ImuSample& imu() const { return std::get<ImuSample>(data); }
  const MocapSample& mocap() const { return std::get<MocapSample>(data); }
};

/// Zero-mean Gaussian draw with covariance `cov` (symmetric PSD).
Vec3 sample_gaussian(const Mat3& cov, Rng& rng);

/// Accelerometer and gyro reading.
///
/// accel = R_IB R^T (dv + g e3) + Omega x (Omega x r_IMU) + b_a + nu_a
/// gyro  = Omega + b_g + nu_g
///
/// `dv` is the world-frame acceleration from the equations of motion at the
/// sample instant. The lever-arm term is only the centripetal part; angular
/// acceleration of the body is not included.
SensorMeasurement imu_measure(const VehicleState& state, const Vec3& dv, const ImuConfig& cfg,
                              const ImuBias& bias, double gravity, Rng& rng);

/// Pose and twist with additive noise; attitude is perturbed on the right by exp(theta).
SensorMeasurement mocap_measure(const VehicleState& state, const MocapConfig& cfg, Rng& rng);

/// One step of the bias random walk: b + sqrt(dt) * rw .* n, n ~ N(0, I).
Vec3 bias_step(const Vec3& bias, const Vec3& rw, double dt, Rng& rng);

}  // namespace rotorsim
