#pragma once

#include "rotorsim/math.hpp"
#include "rotorsim/sensors.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace rotorsim {

struct ConstantWind {
  Vec3 wind = Vec3::Zero();
};

struct StepWind {
  Vec3 before = Vec3::Zero();
  Vec3 after = Vec3::Zero();
  double t_step = 0.0;
};

struct SinusoidWind {
  Vec3 mean = Vec3::Zero();
  Vec3 amplitude = Vec3::Zero();
  Vec3 frequency_hz = Vec3::Ones();
  Vec3 phase = Vec3::Zero();  // rad
};

enum class TurbulenceClass { None, Light, Moderate, Severe };

/// Dryden turbulence superimposed on a mean wind. Intensities and scale
/// lengths follow the low-altitude military-specification forms; `sigma`
/// overrides the class intensities as (longitudinal, lateral, vertical).
struct DrydenWind {
  Vec3 mean = Vec3::Zero();
  double altitude = 2.0;  // m
  TurbulenceClass intensity = TurbulenceClass::Light;
  std::optional<Vec3> sigma;
  std::uint64_t seed = 0;
};

using WindProfile = std::variant<ConstantWind, StepWind, SinusoidWind, DrydenWind>;

/// Dryden scale lengths and intensities resolved for a given profile.
struct DrydenParameters {
  Vec3 sigma = Vec3::Zero();         // m/s, (u, v, w)
  Vec3 scale_length = Vec3::Ones();  // m, (L_u, L_v, L_w)
  double convection_speed = 1.0;     // m/s, mean wind speed with a floor
};

DrydenParameters dryden_parameters(const DrydenWind& profile);

/// Forming filters for the three Dryden components, discretized exactly at
/// a fixed rate. The longitudinal component is first order, lateral and
/// vertical are second order. The filter state starts from its stationary
/// distribution, so no burn-in is needed.
class DrydenFilter {
 public:
  static constexpr double kRateHz = 100.0;

  DrydenFilter(const DrydenParameters& params, std::uint64_t seed);

  /// Advance one tick; returns turbulence in the mean-wind frame (u, v, w).
  Vec3 step();
  Vec3 current() const;

 private:
  struct SecondOrder {
    Eigen::Matrix2d phi;
    Eigen::Matrix2d noise_chol;
    Eigen::Vector2d out;  // output row
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    double a = 1.0;  // inverse time constant
  };
  static SecondOrder make_second_order(double sigma, double time_constant, double dt);

  Rng rng_;
  double u_decay_ = 0.0;
  double u_noise_ = 0.0;
  double u_ = 0.0;
  SecondOrder lateral_;
  SecondOrder vertical_;
};

/// Stateful evaluator for a wind profile. The result is a deterministic
/// function of (profile, t, seed); Dryden output is held between the fixed
/// 100 Hz internal ticks. Requests earlier than the last tick replay the
/// stream from the start.
class WindModel {
 public:
  explicit WindModel(WindProfile profile);

  Vec3 sample(double t, const Vec3& position);
  const WindProfile& profile() const { return profile_; }

 private:
  Vec3 dryden_sample(const DrydenWind& d, double t);

  WindProfile profile_;
  std::optional<DrydenFilter> filter_;
  DrydenParameters dryden_;
  Mat3 mean_frame_ = Mat3::Identity();
  long tick_ = -1;
  Vec3 turbulence_ = Vec3::Zero();
};

const char* to_string(TurbulenceClass c);
TurbulenceClass turbulence_class_from_string(const std::string& s);

}  // namespace rotorsim
