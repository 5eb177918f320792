#pragma once

#include "rotorsim/math.hpp"

#include <variant>

namespace rotorsim {

/// Desired flat outputs and their derivatives.
struct FlatOutput {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Vec3 jerk = Vec3::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
};

struct HoverSpec {
  Vec3 position = Vec3(0.0, 0.0, 1.0);
  double yaw = 0.0;
};

/// Constant-speed circle in the horizontal plane, starting from rest at
/// center + (radius, 0, 0) and spinning up smoothly over `ramp_time`.
struct CircleSpec {
  Vec3 center = Vec3(0.0, 0.0, 1.0);
  double radius = 1.5;
  double speed = 2.5;
  double ramp_time = 2.0;
};

/// Lissajous figure-eight whose phase rate sweeps from rest to
/// `max_phase_rate` over `sweep_time`. Used to excite drag for calibration.
struct FigureEightSpec {
  Vec3 center = Vec3(0.0, 0.0, 1.5);
  Vec3 amplitude = Vec3(2.0, 1.0, 0.2);  // x ~ sin(t), y ~ sin(2t), z ~ sin(3t)
  double max_phase_rate = 1.0;           // rad/s
  double sweep_time = 10.0;
};

using TrajectorySpec = std::variant<HoverSpec, CircleSpec, FigureEightSpec>;

/// Phase angle theta(t) whose rate ramps from 0 to `rate` with a quintic
/// smoothstep over `ramp`, then stays constant. Returns (theta, d1, d2, d3).
Eigen::Vector4d ramped_phase(double rate, double ramp, double t);

FlatOutput circle_trajectory(const CircleSpec& spec, double t);
FlatOutput figure_eight_trajectory(const FigureEightSpec& spec, double t);
FlatOutput evaluate(const TrajectorySpec& spec, double t);

/// Position at t = 0, where the vehicle is initialized at rest.
Vec3 start_position(const TrajectorySpec& spec);

}  // namespace rotorsim
