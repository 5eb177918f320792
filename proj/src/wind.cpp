#include "rotorsim/wind.hpp"

#include "rotorsim/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>

namespace rotorsim {

namespace {

constexpr double kFeetPerMeter = 3.280839895;
constexpr double kKnot = 0.514444;
constexpr double kMinConvectionSpeed = 0.5;  // m/s
constexpr double kMinAltitudeFt = 10.0;

double w20_knots(TurbulenceClass c) {
  switch (c) {
    case TurbulenceClass::None: return 0.0;
    case TurbulenceClass::Light: return 15.0;
    case TurbulenceClass::Moderate: return 30.0;
    case TurbulenceClass::Severe: return 45.0;
  }
  return 0.0;
}

}  // namespace

const char* to_string(TurbulenceClass c) {
  switch (c) {
    case TurbulenceClass::None: return "none";
    case TurbulenceClass::Light: return "light";
    case TurbulenceClass::Moderate: return "moderate";
    case TurbulenceClass::Severe: return "severe";
  }
  return "none";
}

TurbulenceClass turbulence_class_from_string(const std::string& s) {
  if (s == "none") return TurbulenceClass::None;
  if (s == "light") return TurbulenceClass::Light;
  if (s == "moderate") return TurbulenceClass::Moderate;
  if (s == "severe") return TurbulenceClass::Severe;
  throw ConfigError("wind.intensity", "unknown turbulence class '" + s + "'");
}

DrydenParameters dryden_parameters(const DrydenWind& profile) {
  DrydenParameters p;
  const double h = std::max(kMinAltitudeFt, profile.altitude * kFeetPerMeter);
  const double denom = 0.177 + 0.000823 * h;
  const double l_uv = h / std::pow(denom, 1.2) / kFeetPerMeter;
  const double l_w = h / kFeetPerMeter;
  p.scale_length = Vec3(l_uv, l_uv, l_w);
  if (profile.sigma) {
    p.sigma = *profile.sigma;
  } else {
    const double sigma_w = 0.1 * w20_knots(profile.intensity) * kKnot;
    const double sigma_uv = sigma_w / std::pow(denom, 0.4);
    p.sigma = Vec3(sigma_uv, sigma_uv, sigma_w);
  }
  p.convection_speed = std::max(kMinConvectionSpeed, profile.mean.head<2>().norm());
  return p;
}

DrydenFilter::SecondOrder DrydenFilter::make_second_order(double sigma, double time_constant, double dt) {
  // x1' = x2, x2' = -a^2 x1 - 2a x2 + xi, y = K (a^2 x1 + sqrt(3) a x2),
  // xi unit-intensity white noise. Stationary Var(y) = K^2 a, so K = sigma / sqrt(a).
  const double a = 1.0 / time_constant;
  SecondOrder f;
  f.a = a;
  const double e = std::exp(-a * dt);
  f.phi << e * (1.0 + a * dt), e * dt, -e * a * a * dt, e * (1.0 - a * dt);
  Eigen::Matrix2d p_inf;
  p_inf << 1.0 / (4.0 * a * a * a), 0.0, 0.0, 1.0 / (4.0 * a);
  Eigen::Matrix2d qd = p_inf - f.phi * p_inf * f.phi.transpose();
  qd = 0.5 * (qd + qd.transpose());
  f.noise_chol = Eigen::LLT<Eigen::Matrix2d>(qd).matrixL();
  const double k = sigma / std::sqrt(a);
  f.out << k * a * a, k * std::sqrt(3.0) * a;
  return f;
}

DrydenFilter::DrydenFilter(const DrydenParameters& params, std::uint64_t seed) : rng_(seed) {
  const double dt = 1.0 / kRateHz;
  const double v = params.convection_speed;
  u_decay_ = std::exp(-dt * v / params.scale_length.x());
  u_noise_ = params.sigma.x() * std::sqrt(1.0 - u_decay_ * u_decay_);
  lateral_ = make_second_order(params.sigma.y(), params.scale_length.y() / v, dt);
  vertical_ = make_second_order(params.sigma.z(), params.scale_length.z() / v, dt);

  // draw the initial state from the stationary distribution
  std::normal_distribution<double> normal(0.0, 1.0);
  u_ = params.sigma.x() * normal(rng_);
  for (SecondOrder* f : {&lateral_, &vertical_}) {
    const double a = f->a;
    const Eigen::Vector2d n(normal(rng_), normal(rng_));
    f->x = Eigen::Vector2d(std::sqrt(1.0 / (4.0 * a * a * a)) * n(0), std::sqrt(1.0 / (4.0 * a)) * n(1));
  }
}

Vec3 DrydenFilter::current() const {
  return Vec3(u_, lateral_.out.dot(lateral_.x), vertical_.out.dot(vertical_.x));
}

Vec3 DrydenFilter::step() {
  std::normal_distribution<double> normal(0.0, 1.0);
  u_ = u_decay_ * u_ + u_noise_ * normal(rng_);
  for (SecondOrder* f : {&lateral_, &vertical_}) {
    const Eigen::Vector2d n(normal(rng_), normal(rng_));
    f->x = f->phi * f->x + f->noise_chol * n;
  }
  return current();
}

WindModel::WindModel(WindProfile profile) : profile_(std::move(profile)) {
  if (const auto* s = std::get_if<SinusoidWind>(&profile_)) {
    if ((s->frequency_hz.array() <= 0.0).any()) throw ConfigError("wind.frequency_hz", "must be > 0");
  }
  if (const auto* d = std::get_if<DrydenWind>(&profile_)) {
    if (!(d->altitude > 0.0)) throw ConfigError("wind.altitude", "must be > 0");
    if (d->sigma && (d->sigma->array() < 0.0).any()) throw ConfigError("wind.sigma", "must be >= 0");
    dryden_ = dryden_parameters(*d);
    const double heading = d->mean.head<2>().norm() > 1e-9 ? std::atan2(d->mean.y(), d->mean.x()) : 0.0;
    mean_frame_ = Eigen::AngleAxisd(heading, Vec3::UnitZ()).toRotationMatrix();
  }
}

Vec3 WindModel::dryden_sample(const DrydenWind& d, double t) {
  const long tick = static_cast<long>(std::floor(t * DrydenFilter::kRateHz + 1e-9));
  if (!filter_ || tick < tick_) {
    filter_.emplace(dryden_, d.seed);
    tick_ = 0;
    turbulence_ = filter_->current();
  }
  while (tick_ < tick) {
    turbulence_ = filter_->step();
    ++tick_;
  }
  return d.mean + mean_frame_ * turbulence_;
}

Vec3 WindModel::sample(double t, const Vec3& /*position*/) {
  return std::visit(
      [&](const auto& p) -> Vec3 {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConstantWind>) {
          return p.wind;
        } else if constexpr (std::is_same_v<T, StepWind>) {
          return t < p.t_step ? p.before : p.after;
        } else if constexpr (std::is_same_v<T, SinusoidWind>) {
          const Vec3 arg = 2.0 * std::numbers::pi * t * p.frequency_hz + p.phase;
          return p.mean + p.amplitude.cwiseProduct(arg.array().sin().matrix());
        } else {
          return dryden_sample(p, t);
        }
      },
      profile_);
}

}  // namespace rotorsim
