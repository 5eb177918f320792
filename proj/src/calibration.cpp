#include "rotorsim/estimator.hpp"

#include "rotorsim/error.hpp"

#include <cmath>
#include <limits>

namespace rotorsim {

void EstimatorConfig::validate() const {
  for (double v : {q_position, q_velocity, q_attitude, q_wind})
    if (v < 0.0) throw ConfigError("estimator.process_noise", "must be >= 0");
  for (double v : {r_accel, r_position, r_velocity, r_attitude})
    if (!(v > 0.0)) throw ConfigError("estimator.measurement_noise", "must be > 0");
  if (!(attitude_time_constant > 0.0)) throw ConfigError("estimator.attitude_time_constant", "must be > 0");
  if (!(initial_wind_sigma > 0.0)) throw ConfigError("estimator.initial_wind_sigma", "must be > 0");
  if (!(scaling.alpha > 0.0)) throw ConfigError("estimator.alpha", "must be > 0");
}

WindEstimator::WindEstimator(const EstimatorConfig& cfg, double mass_hat, const Vec3& drag_hat, double gravity)
    : cfg_(cfg) {
  cfg_.validate();
  process_.mass = mass_hat;
  process_.drag = drag_hat;
  process_.gravity = gravity;
  process_.attitude_time_constant = cfg.attitude_time_constant;
  process_.q = ukf::block_diagonal_noise(cfg.q_position, cfg.q_velocity, cfg.q_attitude, cfg.q_wind);
  process_.validate();
  r_accel_ = Mat3::Identity() * cfg.r_accel;
  r_mocap_ = Eigen::MatrixXd::Zero(9, 9);
  r_mocap_.diagonal() << Vec3::Constant(cfg.r_position), Vec3::Constant(cfg.r_velocity),
      Vec3::Constant(cfg.r_attitude);
}

void WindEstimator::initialize(const MocapSample& z, double t) {
  belief_.mean.position = z.position;
  belief_.mean.velocity = z.velocity;
  belief_.mean.attitude = z.attitude;
  belief_.mean.wind.setZero();
  belief_.cov = ukf::block_diagonal_noise(cfg_.r_position, cfg_.r_velocity, cfg_.r_attitude,
                                          cfg_.initial_wind_sigma * cfg_.initial_wind_sigma);
  belief_.t = t;
  initialized_ = true;
}

void WindEstimator::predict_to(double t, const ukf::ControlInput& u) {
  const double dt = t - belief_.t;
  if (dt <= 0.0) return;
  belief_ = ukf::predict(belief_, u, dt, process_, cfg_.scaling);
  belief_.t = t;
  last_dt_ = dt;
}

ukf::UpdateStatus WindEstimator::update(const SensorMeasurement& meas, double thrust) {
  const double tol = last_dt_ > 0.0 ? 0.5 * last_dt_ : 1e-9;
  if (std::abs(meas.t - belief_.t) > tol + 1e-12) throw Error("WindEstimator::update: measurement not aligned with belief");
  const auto status = ukf::update(belief_, meas, thrust, process_, r_accel_, r_mocap_, {}, cfg_.scaling);
  if (status == ukf::UpdateStatus::SkippedSingular) ++skipped_;
  return status;
}

CalibrationResult calibrate_drag(const CalibrationLog& log, double mass_hat, const CalibrationOptions& opts) {
  const std::size_t n = log.velocity.size();
  if (n == 0 || log.attitude.size() != n || log.wind.size() != n || log.thrust.size() != n || log.accel.size() != n)
    throw Error("calibrate_drag: log columns empty or of unequal length");

  // Regression per axis: y = mass * a_meas - thrust e3 = -c |v_a| v_a
  Vec3 sxy = Vec3::Zero(), sxx = Vec3::Zero(), syy = Vec3::Zero();
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!log.accel[i].allFinite() || !std::isfinite(log.thrust[i])) continue;
    const Vec3 va = log.attitude[i].conjugate() * (log.velocity[i] - log.wind[i]);
    const Vec3 phi = -va.norm() * va;
    Vec3 y = mass_hat * log.accel[i];
    y.z() -= log.thrust[i];
    sxy += phi.cwiseProduct(y);
    sxx += phi.cwiseProduct(phi);
    syy += y.cwiseProduct(y);
    ++used;
  }
  if (used < 2) throw Error("calibrate_drag: not enough valid samples");

  CalibrationResult r;
  r.samples = used;
  const double nd = static_cast<double>(used);
  for (int k = 0; k < 3; ++k) {
    r.regressor_rms(k) = std::sqrt(sxx(k) / nd);
    double c = sxx(k) > 0.0 ? sxy(k) / sxx(k) : 0.0;
    const double sse = std::max(0.0, syy(k) - 2.0 * c * sxy(k) + c * c * sxx(k));
    r.residual_rms(k) = std::sqrt(sse / nd);
    const double stderr_c = sxx(k) > 0.0 ? std::sqrt(sse / std::max(1.0, nd - 1.0) / sxx(k))
                                         : std::numeric_limits<double>::infinity();
    if (c < 0.0) {
      c = 0.0;
      if (k < 2) r.warning = true;
    }
    r.drag(k) = c;
    r.relative_uncertainty(k) = c > 1e-12 ? stderr_c / c : std::numeric_limits<double>::infinity();
  }
  for (int k = 0; k < 2; ++k) {
    if (r.regressor_rms(k) < opts.min_regressor_rms) r.warning = true;
    if (!(r.relative_uncertainty(k) <= opts.max_relative_uncertainty)) r.warning = true;
  }
  return r;
}

}  // namespace rotorsim
