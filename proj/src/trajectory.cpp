#include "rotorsim/trajectory.hpp"

#include "rotorsim/error.hpp"

#include <cmath>
#include <numbers>

namespace rotorsim {

Eigen::Vector4d ramped_phase(double rate, double ramp, double t) {
  if (t <= 0.0) return Eigen::Vector4d::Zero();
  if (ramp <= 0.0) return Eigen::Vector4d(rate * t, rate, 0.0, 0.0);
  if (t >= ramp) return Eigen::Vector4d(0.5 * rate * ramp + rate * (t - ramp), rate, 0.0, 0.0);
  const double u = t / ramp;
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u;
  const double integral = 2.5 * u4 - 3.0 * u4 * u + u4 * u2;
  const double s = 10.0 * u3 - 15.0 * u4 + 6.0 * u4 * u;
  const double ds = 30.0 * u2 - 60.0 * u3 + 30.0 * u4;
  const double dds = 60.0 * u - 180.0 * u2 + 120.0 * u3;
  return Eigen::Vector4d(rate * ramp * integral, rate * s, rate * ds / ramp, rate * dds / (ramp * ramp));
}

namespace {

// a sin(n theta + phase) and its first three time derivatives given theta derivatives.
Eigen::Vector4d harmonic(double a, double n, double phase, const Eigen::Vector4d& th) {
  const double arg = n * th(0) + phase;
  const double s = std::sin(arg), c = std::cos(arg);
  const double w = th(1), wd = th(2), wdd = th(3);
  return Eigen::Vector4d(a * s,
                         a * n * c * w,
                         -a * n * n * s * w * w + a * n * c * wd,
                         -a * n * n * n * c * w * w * w - 3.0 * a * n * n * s * w * wd + a * n * c * wdd);
}

FlatOutput lissajous(const Vec3& center, const Vec3& amplitude, const Vec3& multiplier, const Vec3& phase,
                     const Eigen::Vector4d& th) {
  FlatOutput f;
  f.position = center;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector4d h = harmonic(amplitude(i), multiplier(i), phase(i), th);
    f.position(i) += h(0);
    f.velocity(i) = h(1);
    f.acceleration(i) = h(2);
    f.jerk(i) = h(3);
  }
  return f;
}

}  // namespace

FlatOutput circle_trajectory(const CircleSpec& spec, double t) {
  if (!(spec.radius > 0.0) || spec.speed < 0.0) throw ConfigError("trajectory", "circle needs radius > 0 and speed >= 0");
  const Eigen::Vector4d th = ramped_phase(spec.speed / spec.radius, spec.ramp_time, t);
  // x = r cos(theta) = r sin(theta + pi/2)
  return lissajous(spec.center, Vec3(spec.radius, spec.radius, 0.0), Vec3(1.0, 1.0, 0.0),
                   Vec3(std::numbers::pi / 2.0, 0.0, 0.0), th);
}

FlatOutput figure_eight_trajectory(const FigureEightSpec& spec, double t) {
  const Eigen::Vector4d th = ramped_phase(spec.max_phase_rate, spec.sweep_time, t);
  return lissajous(spec.center, spec.amplitude, Vec3(1.0, 2.0, 3.0), Vec3::Zero(), th);
}

FlatOutput evaluate(const TrajectorySpec& spec, double t) {
  return std::visit(
      [t](const auto& s) -> FlatOutput {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HoverSpec>) {
          FlatOutput f;
          f.position = s.position;
          f.yaw = s.yaw;
          return f;
        } else if constexpr (std::is_same_v<T, CircleSpec>) {
          return circle_trajectory(s, t);
        } else {
          return figure_eight_trajectory(s, t);
        }
      },
      spec);
}

Vec3 start_position(const TrajectorySpec& spec) { return evaluate(spec, 0.0).position; }

}  // namespace rotorsim
