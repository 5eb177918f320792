#include "rotorsim/sensors.hpp"

#include "rotorsim/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace rotorsim {

namespace {

void check_cov(const Mat3& c, const char* field) {
  if (!c.allFinite() || (c - c.transpose()).cwiseAbs().maxCoeff() > 1e-15)
    throw ConfigError(field, "covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> es(c, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-15) throw ConfigError(field, "covariance must be positive semidefinite");
}

}  // namespace

void ImuConfig::validate() const {
  check_cov(accel_noise_cov, "imu.accel_noise_cov");
  check_cov(gyro_noise_cov, "imu.gyro_noise_cov");
  if ((accel_bias_rw.array() < 0).any() || (gyro_bias_rw.array() < 0).any())
    throw ConfigError("imu.bias_rw", "must be >= 0");
  if (!(rate_hz > 0)) throw ConfigError("imu.rate_hz", "must be > 0");
}

void MocapConfig::validate() const {
  check_cov(position_cov, "mocap.position_cov");
  check_cov(velocity_cov, "mocap.velocity_cov");
  check_cov(attitude_cov, "mocap.attitude_cov");
  check_cov(body_rate_cov, "mocap.body_rate_cov");
  if (!(rate_hz > 0)) throw ConfigError("mocap.rate_hz", "must be > 0");
}

Vec3 sample_gaussian(const Mat3& cov, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vec3 n(normal(rng), normal(rng), normal(rng));
  if (cov.isZero(0.0)) return Vec3::Zero();
  if (cov.isDiagonal(0.0)) return cov.diagonal().cwiseSqrt().cwiseProduct(n);
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  const Vec3 sd = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * sd.cwiseProduct(n);
}

SensorMeasurement imu_measure(const VehicleState& state, const Vec3& dv, const ImuConfig& cfg,
                              const ImuBias& bias, double gravity, Rng& rng) {
  const Vec3& w = state.body_rate;
  const Vec3 specific_world = dv + gravity * Vec3::UnitZ();
  const Vec3 centripetal = w.cross(w.cross(cfg.lever_arm));

  ImuSample s;
  s.accel = cfg.body_to_imu * (state.attitude.conjugate() * specific_world) + centripetal + bias.accel +
            sample_gaussian(cfg.accel_noise_cov, rng);
  s.gyro = w + bias.gyro + sample_gaussian(cfg.gyro_noise_cov, rng);
  return SensorMeasurement{state.time, s};
}

SensorMeasurement mocap_measure(const VehicleState& state, const MocapConfig& cfg, Rng& rng) {
  MocapSample s;
  s.position = state.position + sample_gaussian(cfg.position_cov, rng);
  s.velocity = state.velocity + sample_gaussian(cfg.velocity_cov, rng);
  const Vec3 theta = sample_gaussian(cfg.attitude_cov, rng);
  s.attitude = theta.isZero(0.0) ? state.attitude : boxplus(state.attitude, theta);
  s.body_rate = state.body_rate + sample_gaussian(cfg.body_rate_cov, rng);
  return SensorMeasurement{state.time, s};
}

Vec3 bias_step(const Vec3& bias, const Vec3& rw, double dt, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vec3 n(normal(rng), normal(rng), normal(rng));
  return bias + std::sqrt(dt) * rw.cwiseProduct(n);
}

}  // namespace rotorsim
