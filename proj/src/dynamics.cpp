#include "rotorsim/dynamics.hpp"

#include "rotorsim/aero.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rotorsim {

Wrench control_wrench(const VecX& rotor_speed, const VehicleParams& params) {
  Wrench w;
  double yaw_torque = 0.0;
  for (std::size_t i = 0; i < params.num_rotors(); ++i) {
    const double eta = rotor_speed(static_cast<Eigen::Index>(i));
    const double eta2 = eta * eta;
    const Vec3 thrust_i(0.0, 0.0, params.k_eta * eta2);
    w.force += thrust_i;
    yaw_torque += params.k_m * params.rotor_spin[i] * eta2;
    w.moment += params.rotor_positions[i].cross(thrust_i);
  }
  w.moment.z() += yaw_torque;
  return w;
}

StateDerivative dynamics(const VehicleState& state, const VecX& eta_cmd, const Vec3& wind,
                         const VehicleParams& params, bool aero_enabled) {
  state.check_finite();
  if (!eta_cmd.allFinite()) throw NonFiniteError("eta_cmd");
  if (!wind.allFinite()) throw NonFiniteError("wind");
  if (eta_cmd.size() != static_cast<Eigen::Index>(params.num_rotors()) ||
      state.rotor_speed.size() != eta_cmd.size())
    throw Error("rotor count mismatch between state, command, and params");

  const Quat q = state.attitude.normalized();
  const Mat3 R = q.toRotationMatrix();
  const Wrench wc = control_wrench(state.rotor_speed, params);

  Vec3 fa = Vec3::Zero();
  Vec3 ma = Vec3::Zero();
  if (aero_enabled) {
    VehicleState s = state;
    s.attitude = q;
    const aero::AeroWrench wa = aero::total_aero_wrench(s, wind, params);
    fa = wa.force;
    ma = wa.moment;
  }

  StateDerivative d;
  d.dx = state.velocity;
  d.dv = R * (wc.force + fa) / params.mass - params.gravity * Vec3::UnitZ();

  const Quat omega_q(0.0, state.body_rate.x(), state.body_rate.y(), state.body_rate.z());
  const Quat qdot = state.attitude * omega_q;
  d.dq = 0.5 * Vec4(qdot.w(), qdot.x(), qdot.y(), qdot.z());

  const Vec3& w = state.body_rate;
  d.dOmega = params.inertia.ldlt().solve(wc.moment + ma - w.cross(params.inertia * w));
  d.deta = (eta_cmd - state.rotor_speed) / params.tau_m;
  return d;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat (5th minus embedded 4th order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;

class Rhs {
 public:
  Rhs(const VecX& eta_cmd, const WindField& wind, const VehicleParams& params, bool aero, IntegrationStats& st)
      : eta_cmd_(eta_cmd), wind_(wind), params_(params), aero_(aero), stats_(st) {}

  VecX operator()(double t, const VecX& y) const {
    ++stats_.evaluations;
    const VehicleState s = unpack_state(y, t);
    return pack_derivative(dynamics(s, eta_cmd_, wind_(t, s.position), params_, aero_));
  }

 private:
  const VecX& eta_cmd_;
  const WindField& wind_;
  const VehicleParams& params_;
  bool aero_;
  IntegrationStats& stats_;
};

double rms_norm(const VecX& err, const VecX& y0, const VecX& y1, double rtol, double atol) {
  const VecX scale = (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
  return std::sqrt((err.cwiseQuotient(scale)).squaredNorm() / static_cast<double>(err.size()));
}

double initial_step(const Rhs& f, double t, const VecX& y, const VecX& f0, double rtol, double atol,
                    double max_step) {
  const VecX scale = (atol + rtol * y.cwiseAbs().array()).matrix();
  const double n = static_cast<double>(y.size());
  const double d0 = std::sqrt(y.cwiseQuotient(scale).squaredNorm() / n);
  const double d1 = std::sqrt(f0.cwiseQuotient(scale).squaredNorm() / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, max_step);
  const VecX y1 = y + h0 * f0;
  const VecX f1 = f(t + h0, y1);
  const double d2 = std::sqrt((f1 - f0).cwiseQuotient(scale).squaredNorm() / n) / h0;
  const double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                  : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
  return std::min({100.0 * h0, h1, max_step});
}

// Renormalize the quaternion and clamp rotor speeds in place. Returns true if y changed.
bool project(VecX& y, const VehicleParams& params) {
  const VecX before = y;
  y.segment<4>(6).normalize();
  const Eigen::Index n = y.size() - kRigidBodyStateSize;
  y.tail(n) = y.tail(n).cwiseMax(params.eta_min).cwiseMin(params.eta_max);
  return y != before;
}

}  // namespace

VehicleState integrate(const VehicleState& state, const VecX& eta_cmd, const WindField& wind,
                       const VehicleParams& params, double dt_out, const IntegratorOptions& options,
                       IntegrationStats* stats) {
  if (!(dt_out > 0.0)) throw Error("integrate: dt_out must be > 0");
  if (!(options.rtol > 0.0) || !(options.atol > 0.0)) throw Error("integrate: rtol and atol must be > 0");
  state.check_finite();

  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;
  const Rhs f(eta_cmd, wind, params, options.aero_enabled, st);

  const double t0 = state.time;
  const double t_end = t0 + dt_out;
  double t = t0;
  VecX y = pack_state(state);
  project(y, params);
  VecX k1 = f(t, y);

  double h = st.last_step > 0.0 ? std::min(st.last_step, dt_out) : initial_step(f, t, y, k1, options.rtol, options.atol, dt_out);
  long steps = 0;
  VehicleState last_good = unpack_state(y, t);

  while (t < t_end) {
    if (++steps > options.max_steps) throw IntegrationError("integrate: step budget exhausted", last_good);
    const double min_step = 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < min_step) throw IntegrationError("integrate: step size underflow", last_good);

    bool last = false;
    if (t + h >= t_end || t_end - (t + h) < min_step) {
      h = t_end - t;
      last = true;
    }

    VecX y_new, k7;
    double err_norm = std::numeric_limits<double>::infinity();
    try {
      const VecX k2 = f(t + c2 * h, y + h * (a21 * k1));
      const VecX k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const VecX k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const VecX k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const VecX k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = f(t + h, y_new);
      const VecX err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      err_norm = rms_norm(err, y, y_new, options.rtol, options.atol);
      if (!std::isfinite(err_norm)) err_norm = std::numeric_limits<double>::infinity();
    } catch (const NonFiniteError&) {
      // a stage left the finite domain; shrink the step
    }

    if (err_norm <= 1.0) {
      t = last ? t_end : t + h;
      y = std::move(y_new);
      k1 = project(y, params) ? f(t, y) : k7;
      last_good = unpack_state(y, t);
      ++st.accepted;
      const double factor = err_norm == 0.0 ? kMaxFactor
                                            : std::min(kMaxFactor, kSafety * std::pow(err_norm, -0.2));
      if (!last) st.last_step = h;
      h *= factor;
    } else {
      ++st.rejected;
      const double factor = std::isfinite(err_norm) ? std::max(kMinFactor, kSafety * std::pow(err_norm, -0.2))
                                                    : kMinFactor;
      h *= factor;
    }
  }
  if (st.last_step <= 0.0) st.last_step = dt_out;
  return last_good;
}

VehicleState integrate(const VehicleState& state, const VecX& eta_cmd, const Vec3& wind,
                       const VehicleParams& params, double dt_out, const IntegratorOptions& options,
                       IntegrationStats* stats) {
  const WindField constant = [&wind](double, const Vec3&) { return wind; };
  return integrate(state, eta_cmd, constant, params, dt_out, options, stats);
}

}  // namespace rotorsim
