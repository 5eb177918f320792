#include "oracles.hpp"
#include "rotorsim/dynamics.hpp"
#include "rotorsim/sensors.hpp"

#include <doctest.h>

using namespace rotorsim;

namespace {

ImuConfig noiseless_imu() {
  ImuConfig c;
  c.accel_noise_cov.setZero();
  c.gyro_noise_cov.setZero();
  return c;
}

MocapConfig noiseless_mocap() {
  MocapConfig c;
  c.position_cov.setZero();
  c.velocity_cov.setZero();
  c.attitude_cov.setZero();
  c.body_rate_cov.setZero();
  return c;
}

}  // namespace

TEST_CASE("hovering accelerometer reads +g along body z") {
  const VehicleParams p = default_quadrotor();
  const VehicleState s = VehicleState::hover(p);
  const StateDerivative d = dynamics(s, s.rotor_speed, Vec3::Zero(), p);
  Rng rng(1);
  const auto m = imu_measure(s, d.dv, noiseless_imu(), {}, p.gravity, rng);
  CHECK((m.imu().accel - Vec3(0, 0, p.gravity)).norm() < 1e-12);
  CHECK(m.imu().gyro.norm() == 0.0);
}

TEST_CASE("noiseless IMU equals the analytic specific force with lever arm and mounting") {
  std::mt19937_64 gen(30);
  Rng rng(2);
  ImuConfig c = noiseless_imu();
  c.lever_arm = Vec3(0.03, -0.02, 0.01);
  c.body_to_imu = quat_exp(Vec3(0.0, 0.0, std::numbers::pi / 2));
  const ImuBias bias{Vec3(0.01, -0.02, 0.03), Vec3(-0.001, 0.002, 0.0)};
  for (int i = 0; i < 200; ++i) {
    VehicleState s;
    s.attitude = oracle::random_attitude(gen);
    s.body_rate = oracle::random_vec(gen, 4.0);
    const Vec3 dv = oracle::random_vec(gen, 10.0);
    const auto m = imu_measure(s, dv, c, bias, 9.81, rng);
    const auto R = oracle::rotation(s.attitude);
    const auto Rib = oracle::rotation(c.body_to_imu);
    const oracle::Arr3 body = oracle::mul_transpose(R, {dv.x(), dv.y(), dv.z() + 9.81});
    const oracle::Arr3 imu = oracle::mul(Rib, body);
    const oracle::Arr3 w = oracle::arr(s.body_rate);
    const oracle::Arr3 cen = oracle::cross(w, oracle::cross(w, oracle::arr(c.lever_arm)));
    const Vec3 expected = oracle::vec(imu) + oracle::vec(cen) + bias.accel;
    CHECK((m.imu().accel - expected).norm() < 1e-12);
    CHECK((m.imu().gyro - (s.body_rate + bias.gyro)).norm() < 1e-15);
  }
}

TEST_CASE("noiseless mocap returns the true state bit for bit") {
  std::mt19937_64 gen(31);
  Rng rng(3);
  VehicleState s;
  s.position = oracle::random_vec(gen, 3.0);
  s.velocity = oracle::random_vec(gen, 3.0);
  s.attitude = oracle::random_attitude(gen);
  s.body_rate = oracle::random_vec(gen, 3.0);
  const auto m = mocap_measure(s, noiseless_mocap(), rng);
  CHECK(m.mocap().position == s.position);
  CHECK(m.mocap().velocity == s.velocity);
  CHECK(m.mocap().attitude.coeffs() == s.attitude.coeffs());
  CHECK(m.mocap().body_rate == s.body_rate);
}

TEST_CASE("accelerometer noise has the configured covariance") {
  ImuConfig c;
  c.accel_noise_cov << 0.04, 0.01, 0.0, 0.01, 0.02, 0.0, 0.0, 0.0, 0.09;
  Rng rng(4);
  const VehicleState s = VehicleState::hover(default_quadrotor());
  const int n = 200000;
  Mat3 cov = Mat3::Zero();
  Vec3 mean = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec3 e = imu_measure(s, Vec3::Zero(), c, {}, 9.81, rng).imu().accel - Vec3(0, 0, 9.81);
    mean += e;
    cov += e * e.transpose();
  }
  mean /= n;
  cov /= n;
  CHECK(mean.norm() < 3e-3);
  CHECK((cov - c.accel_noise_cov).cwiseAbs().maxCoeff() < 2e-3);
}

TEST_CASE("bias random walk variance grows linearly in time") {
  Rng rng(5);
  const Vec3 rw(0.1, 0.2, 0.3);
  const int runs = 4000, steps = 100;
  const double dt = 0.01;
  Vec3 var = Vec3::Zero();
  for (int r = 0; r < runs; ++r) {
    Vec3 b = Vec3::Zero();
    for (int k = 0; k < steps; ++k) b = bias_step(b, rw, dt, rng);
    var += b.cwiseProduct(b);
  }
  var /= runs;
  const Vec3 expected = rw.cwiseProduct(rw) * (steps * dt);
  for (int k = 0; k < 3; ++k) CHECK(var(k) == doctest::Approx(expected(k)).epsilon(0.08));
}

TEST_CASE("mocap attitude noise has the configured angle spread") {
  MocapConfig c = noiseless_mocap();
  c.attitude_cov = Mat3::Identity() * 1e-4;
  Rng rng(6);
  std::mt19937_64 gen(32);
  VehicleState s;
  s.attitude = oracle::random_attitude(gen);
  const int n = 50000;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = angle_between(s.attitude, mocap_measure(s, c, rng).mocap().attitude);
    sum_sq += a * a;
  }
  // the squared angle of a 3-D isotropic perturbation has mean 3 sigma^2
  CHECK(sum_sq / n == doctest::Approx(3e-4).epsilon(0.03));
}
