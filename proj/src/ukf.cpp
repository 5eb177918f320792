#include "rotorsim/ukf.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rotorsim::ukf {

NavState retract(const NavState& s, const ErrVec& d) {
  NavState r;
  r.position = s.position + d.segment<3>(kPos);
  r.velocity = s.velocity + d.segment<3>(kVel);
  r.attitude = boxplus(s.attitude, d.segment<3>(kAtt));
  r.wind = s.wind + d.segment<3>(kWind);
  return r;
}

ErrVec local(const NavState& a, const NavState& b) {
  ErrVec d;
  d.segment<3>(kPos) = a.position - b.position;
  d.segment<3>(kVel) = a.velocity - b.velocity;
  d.segment<3>(kAtt) = boxminus(a.attitude, b.attitude);
  d.segment<3>(kWind) = a.wind - b.wind;
  return d;
}

void enforce_symmetric(ErrCov& cov) { cov = 0.5 * (cov + cov.transpose()).eval(); }

bool is_psd(const ErrCov& cov, double floor) {
  if (!cov.allFinite()) return false;
  Eigen::SelfAdjointEigenSolver<ErrCov> es(cov, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= floor;
}

ErrCov covariance_sqrt(const ErrCov& cov) {
  if (!cov.allFinite()) throw CovarianceError("covariance has non-finite entries", cov);
  Eigen::LLT<ErrCov> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<ErrCov> es(cov);
  const auto& ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-10 * std::max(1.0, ev.maxCoeff()))
    throw CovarianceError("covariance is not positive semidefinite", cov);
  return es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

SigmaPoints sigma_points(const UkfBelief& belief, const Scaling& sc) {
  constexpr double L = kDim;
  const double lambda = sc.alpha * sc.alpha * (L + sc.kappa) - L;
  const double gamma = std::sqrt(L + lambda);
  const ErrCov S = covariance_sqrt(belief.cov);

  SigmaPoints sp;
  sp.points.reserve(2 * kDim + 1);
  sp.points.push_back(belief.mean);
  for (int i = 0; i < kDim; ++i) sp.points.push_back(retract(belief.mean, gamma * S.col(i)));
  for (int i = 0; i < kDim; ++i) sp.points.push_back(retract(belief.mean, -gamma * S.col(i)));

  const double wi = 1.0 / (2.0 * (L + lambda));
  sp.wm.assign(2 * kDim + 1, wi);
  sp.wc.assign(2 * kDim + 1, wi);
  sp.wm[0] = lambda / (L + lambda);
  sp.wc[0] = sp.wm[0] + 1.0 - sc.alpha * sc.alpha + sc.beta;
  return sp;
}

NavState weighted_mean(const std::vector<NavState>& pts, const std::vector<double>& wm) {
  NavState m;
  m.position.setZero();
  m.velocity.setZero();
  m.wind.setZero();
  Vec3 dtheta = Vec3::Zero();
  const Quat& ref = pts.front().attitude;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m.position += wm[i] * pts[i].position;
    m.velocity += wm[i] * pts[i].velocity;
    m.wind += wm[i] * pts[i].wind;
    dtheta += wm[i] * boxminus(pts[i].attitude, ref);
  }
  m.attitude = boxplus(ref, dtheta);
  return m;
}

void ProcessModelParams::validate() const {
  if (!(mass > 0.0)) throw ConfigError("estimator.mass", "must be > 0");
  if ((drag.array() < 0.0).any()) throw ConfigError("estimator.drag", "must be >= 0");
  if (!(attitude_time_constant > 0.0)) throw ConfigError("estimator.attitude_time_constant", "must be > 0");
  if (!is_psd(q, -1e-15)) throw ConfigError("estimator.process_noise", "must be positive semidefinite");
}

ErrCov block_diagonal_noise(double position, double velocity, double attitude, double wind) {
  ErrVec d;
  d << Vec3::Constant(position), Vec3::Constant(velocity), Vec3::Constant(attitude), Vec3::Constant(wind);
  return d.asDiagonal();
}

Vec3 predicted_specific_force(const NavState& s, double thrust, const ProcessModelParams& p) {
  const Vec3 va = s.attitude.conjugate() * (s.velocity - s.wind);
  const Vec3 drag = -va.norm() * p.drag.cwiseProduct(va);
  return (thrust * Vec3::UnitZ() + drag) / p.mass;
}

NavState propagate(const NavState& s, const ControlInput& u, double dt, const ProcessModelParams& p) {
  NavState r = s;
  const Vec3 accel = s.attitude * predicted_specific_force(s, u.thrust, p) - p.gravity * Vec3::UnitZ();
  r.position = s.position + s.velocity * dt + 0.5 * accel * dt * dt;
  r.velocity = s.velocity + accel * dt;
  if (!p.freeze_attitude) {
    const double frac = 1.0 - std::exp(-dt / p.attitude_time_constant);
    r.attitude = boxplus(s.attitude, frac * boxminus(u.attitude_cmd, s.attitude));
  }
  return r;
}

UkfBelief predict(const UkfBelief& belief, const ControlInput& u, double dt, const ProcessModelParams& p,
                  const Scaling& sc) {
  if (!(dt > 0.0)) throw Error("ukf::predict: dt must be > 0");
  SigmaPoints sp = sigma_points(belief, sc);
  for (NavState& x : sp.points) x = propagate(x, u, dt, p);

  UkfBelief out;
  out.t = belief.t + dt;
  out.mean = weighted_mean(sp.points, sp.wm);
  out.cov = p.q * dt;
  for (std::size_t i = 0; i < sp.points.size(); ++i) {
    const ErrVec d = local(sp.points[i], out.mean);
    out.cov += sp.wc[i] * d * d.transpose();
  }
  enforce_symmetric(out.cov);
  if (!out.cov.allFinite() || !out.mean.position.allFinite() || !out.mean.velocity.allFinite() ||
      !out.mean.wind.allFinite() || !out.mean.attitude.coeffs().allFinite())
    throw DivergenceError("ukf::predict: non-finite propagation", belief);
  return out;
}

namespace {

template <class Measure>
UpdateStatus unscented_update(UkfBelief& b, const Eigen::VectorXd& z, const Eigen::MatrixXd& r, Measure&& h,
                              const Scaling& sc) {
  const SigmaPoints sp = sigma_points(b, sc);
  const auto m = z.size();
  const std::size_t n = sp.points.size();

  std::vector<Eigen::VectorXd> zs(n);
  Eigen::VectorXd zbar = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < n; ++i) {
    zs[i] = h(sp.points[i]);
    zbar += sp.wm[i] * zs[i];
  }
  Eigen::MatrixXd s = r;
  Eigen::Matrix<double, kDim, Eigen::Dynamic> c = Eigen::Matrix<double, kDim, Eigen::Dynamic>::Zero(kDim, m);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd dz = zs[i] - zbar;
    s += sp.wc[i] * dz * dz.transpose();
    c += sp.wc[i] * local(sp.points[i], b.mean) * dz.transpose();
  }
  s = 0.5 * (s + s.transpose()).eval();

  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (!s.allFinite() || llt.info() != Eigen::Success) return UpdateStatus::SkippedSingular;
  const Eigen::MatrixXd diag = llt.matrixL().toDenseMatrix().diagonal();
  if (diag.minCoeff() <= 1e-12 * diag.maxCoeff()) return UpdateStatus::SkippedSingular;

  const Eigen::Matrix<double, kDim, Eigen::Dynamic> k = llt.solve(c.transpose()).transpose();
  const ErrVec delta = k * (z - zbar);
  b.mean = retract(b.mean, delta);
  b.cov -= k * s * k.transpose();
  enforce_symmetric(b.cov);
  return UpdateStatus::Applied;
}

}  // namespace

UpdateStatus update_accel(UkfBelief& belief, const Vec3& accel, double thrust, const ProcessModelParams& p,
                          const Mat3& r_meas, const Scaling& sc) {
  return unscented_update(
      belief, accel, r_meas,
      [&](const NavState& x) -> Eigen::VectorXd { return predicted_specific_force(x, thrust, p); }, sc);
}

UpdateStatus update_mocap(UkfBelief& belief, const MocapSample& z, const Eigen::MatrixXd& r_meas,
                          const MocapModel& model, const Scaling& sc) {
  const Eigen::Index m = model.include_attitude ? 9 : 6;
  if (r_meas.rows() != m || r_meas.cols() != m) throw Error("ukf::update_mocap: r_meas has wrong shape");
  const Quat ref = belief.mean.attitude;
  Eigen::VectorXd zv(m);
  zv.segment<3>(0) = z.position;
  zv.segment<3>(3) = z.velocity;
  if (model.include_attitude) zv.segment<3>(6) = boxminus(z.attitude, ref);
  return unscented_update(
      belief, zv, r_meas,
      [&](const NavState& x) -> Eigen::VectorXd {
        Eigen::VectorXd h(m);
        h.segment<3>(0) = x.position;
        h.segment<3>(3) = x.velocity;
        if (model.include_attitude) h.segment<3>(6) = boxminus(x.attitude, ref);
        return h;
      },
      sc);
}

UpdateStatus update(UkfBelief& belief, const SensorMeasurement& meas, double thrust, const ProcessModelParams& p,
                    const Mat3& r_accel, const Eigen::MatrixXd& r_mocap, const MocapModel& model,
                    const Scaling& sc) {
  if (meas.is_imu()) return update_accel(belief, meas.imu().accel, thrust, p, r_accel, sc);
  return update_mocap(belief, meas.mocap(), r_mocap, model, sc);
}

}  // namespace rotorsim::ukf
