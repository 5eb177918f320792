// Acceptance checks. One line per criterion: PASS/FAIL, measured value,
// pinned threshold, wall time. Exit status is nonzero if any criterion fails,
// unless the failing set equals the one given with --expect-fail N[,N...].

#include "oracles.hpp"
#include "rotorsim/aero.hpp"
#include "rotorsim/montecarlo.hpp"
#include "rotorsim/sensors.hpp"
#include "rotorsim/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <numeric>
#include <sstream>
#include <string>

#ifndef ROTORSIM_CONFIG_DIR
#define ROTORSIM_CONFIG_DIR "configs"
#endif

using namespace rotorsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

ScenarioConfig config(const std::string& name) { return load_scenario(fs::path(ROTORSIM_CONFIG_DIR) / (name + ".json")); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string csv_of(const ResultsTable& t) {
  std::ostringstream os;
  t.write_csv(os);
  return os.str();
}

// 1: adaptive RK45 against fixed-step RK4 (h = 1e-4), closed loop on the circle benchmark.
Outcome rk45_vs_rk4() {
  const ScenarioConfig cfg = config("circle_benchmark");
  const VehicleParams& p = cfg.vehicle;
  const Vec3 still = Vec3::Zero();
  auto rk45 = [&](const IntegratorOptions& o) {
    return oracle::closed_loop(cfg, 2.0, [&](const VehicleState& s, const VecX& cmd, double dt) {
      return integrate(s, cmd, still, p, dt, o);
    });
  };
  const auto ref = oracle::closed_loop(cfg, 2.0, [&](const VehicleState& s, const VecX& cmd, double dt) {
    return oracle::rk4_plant(s, cmd, still, p, dt, 1e-4, cfg.aero_enabled);
  });
  IntegratorOptions tight = cfg.integrator;
  tight.rtol = 1e-8;
  tight.atol = 1e-10;
  const auto a = rk45(cfg.integrator), b = rk45(tight);

  double body = 0, rotor_rel = 0, tight_abs = 0;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    const VecX yr = pack_state(ref[k]), ya = pack_state(a[k]), yb = pack_state(b[k]);
    const long n = yr.size() - kRigidBodyStateSize;
    body = std::max(body, (ya - yr).head<kRigidBodyStateSize>().cwiseAbs().maxCoeff());
    rotor_rel = std::max(rotor_rel, ((ya - yr).tail(n).array() / yr.tail(n).array()).abs().maxCoeff());
    tight_abs = std::max(tight_abs, (yb - yr).cwiseAbs().maxCoeff());
  }
  return {body <= 1e-5 && rotor_rel <= 1e-5 && tight_abs <= 1e-5,
          fmt("default tol: rigid body %.2e abs, rotors %.2e rel; rtol 1e-8: %.2e abs (limit 1e-5, %zu ticks)", body,
              rotor_rel, tight_abs, ref.size())};
}

// 2: rotor speed against the closed-form first-order response.
Outcome rotor_lag() {
  const VehicleParams p = default_quadrotor();
  VehicleState s = VehicleState::hover(p);
  const double eta0 = s.rotor_speed(0), eta_c = 780.0;
  const VecX cmd = VecX::Constant(static_cast<long>(p.num_rotors()), eta_c);
  const IntegratorOptions o;
  double worst = 0, allowed = 0;
  for (int k = 1; k <= 10; ++k) {
    const double t = 0.1 * p.tau_m * std::pow(1.5, k);
    s = integrate(s, cmd, Vec3(0, 0, 0), p, t - s.time, o);
    const double expected = eta_c + (eta0 - eta_c) * std::exp(-t / p.tau_m);
    for (long i = 0; i < s.rotor_speed.size(); ++i) worst = std::max(worst, std::abs(s.rotor_speed(i) - expected));
    allowed = std::max(allowed, 10.0 * (o.rtol * expected + o.atol));
  }
  return {worst <= allowed, fmt("max error %.2e rad/s over 10 checkpoints (limit 10 (rtol |eta| + atol) = %.2e)",
                                worst, allowed)};
}

// 3: aerodynamic property checks on random inputs.
Outcome aero_properties() {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> speed(300.0, 900.0);
  const VehicleParams base = default_quadrotor();
  VehicleParams p = base;
  p.parasitic_drag = Vec3(1e-3, 1e-3, 2e-2);
  p.k_d = 1.19e-3;
  p.k_z = 2.32e-3;
  p.k_flap = 1e-5;
  const int n = 10000;
  double worst_power = -1e300, worst_zero = 0, worst_perp = 0;
  for (int i = 0; i < n; ++i) {
    VehicleState s = VehicleState::hover(p);
    s.attitude = oracle::random_attitude(gen);
    s.velocity = oracle::random_vec(gen, 8.0);
    const Vec3 wind = oracle::random_vec(gen, 5.0);
    const Vec3 va = aero::body_airspeed(s.velocity, wind, s.attitude);

    // dissipation: equal rotor speeds and no rotation, so every rotor sees v_a
    s.rotor_speed.setConstant(speed(gen));
    const auto w = aero::total_aero_wrench(s, wind, p);
    worst_power = std::max(worst_power, w.force.dot(va) / (1.0 + w.force.norm() * va.norm()));

    // flapping moments have no component along the rotor axis
    s.body_rate = oracle::random_vec(gen, 5.0);
    for (long r = 0; r < s.rotor_speed.size(); ++r) s.rotor_speed(r) = speed(gen);
    const auto wf = aero::total_aero_wrench(s, wind, p);
    for (const Vec3& m : wf.flapping) worst_perp = std::max(worst_perp, std::abs(m.z()) / (1e-300 + m.norm()));

    // zero airspeed and rate: zero wrench
    s.body_rate.setZero();
    const auto w0 = aero::total_aero_wrench(s, s.velocity, p);
    worst_zero = std::max({worst_zero, w0.force.norm(), w0.moment.norm()});
  }
  const bool ok = worst_power <= 1e-12 && worst_zero == 0.0 && worst_perp <= 1e-12;
  return {ok, fmt("%d samples: max normalized f.v %.2e (<= 0), zero-airspeed wrench %.1e (== 0), "
                  "flapping |m.b3|/|m| %.1e (<= 1e-12)",
                  n, worst_power, worst_zero, worst_perp)};
}

// 4: noiseless sensors against analytic forms.
Outcome sensor_forms() {
  std::mt19937_64 gen(77);
  Rng rng(1);
  ImuConfig imu;
  imu.accel_noise_cov.setZero();
  imu.gyro_noise_cov.setZero();
  imu.lever_arm = Vec3(0.02, 0.01, -0.03);
  imu.body_to_imu = quat_exp(Vec3(0.1, -0.2, 0.3));
  MocapConfig mc;
  mc.position_cov.setZero();
  mc.velocity_cov.setZero();
  mc.attitude_cov.setZero();
  mc.body_rate_cov.setZero();
  const double g = kDefaultGravity;
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    VehicleState s;
    s.position = oracle::random_vec(gen, 5.0);
    s.velocity = oracle::random_vec(gen, 5.0);
    s.attitude = oracle::random_attitude(gen);
    s.body_rate = oracle::random_vec(gen, 3.0);
    const Vec3 dv = oracle::random_vec(gen, 10.0);
    const ImuBias bias{oracle::random_vec(gen, 0.1), oracle::random_vec(gen, 0.01)};
    const auto m = imu_measure(s, dv, imu, bias, g, rng).imu();
    const auto R = oracle::rotation(s.attitude);
    const oracle::Arr3 body = oracle::mul_transpose(R, {dv.x(), dv.y(), dv.z() + g});
    const oracle::Arr3 w = oracle::arr(s.body_rate);
    const oracle::Arr3 cen = oracle::cross(w, oracle::cross(w, oracle::arr(imu.lever_arm)));
    const Vec3 accel = oracle::vec(oracle::mul(oracle::rotation(imu.body_to_imu), body)) + oracle::vec(cen) + bias.accel;
    worst = std::max({worst, (m.accel - accel).norm(), (m.gyro - (s.body_rate + bias.gyro)).norm()});
    const auto z = mocap_measure(s, mc, rng).mocap();
    worst = std::max({worst, (z.position - s.position).norm(), (z.velocity - s.velocity).norm(),
                      z.attitude.angularDistance(s.attitude), (z.body_rate - s.body_rate).norm()});
  }
  const VehicleParams p = default_quadrotor();
  const VehicleState h = VehicleState::hover(p);
  ImuConfig plain;
  plain.accel_noise_cov.setZero();
  plain.gyro_noise_cov.setZero();
  const Vec3 hover = imu_measure(h, dynamics(h, h.rotor_speed, Vec3::Zero(), p).dv, plain, {}, p.gravity, rng).imu().accel;
  const double hover_err = (hover - Vec3(0, 0, p.gravity)).norm();
  return {worst <= 1e-12 && hover_err <= 1e-12,
          fmt("1000 states: max deviation %.2e (limit 1e-12); hover accel error %.2e", worst, hover_err)};
}

// 5: drag signature on the body horizontal specific force.
Outcome circle_drag_signature() {
  ScenarioConfig cfg = config("circle_benchmark");
  auto signature = [&](bool aero, double& frac_above) {
    cfg.aero_enabled = aero;
    const RunResult r = run(cfg);
    if (!r.ok()) throw Error("circle run failed: " + r.failure->reason);
    const auto t = r.table.column("t"), ax = r.table.column("accel_x"), ay = r.table.column("accel_y");
    std::vector<double> sx, sy;
    std::vector<double> mag;
    const std::size_t win = static_cast<std::size_t>(std::lround(0.1 * cfg.imu.rate_hz));
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (std::isnan(ax[i]) || t[i] < cfg.rmse_window_start) continue;
      sx.push_back(ax[i]);
      sy.push_back(ay[i]);
      if (sx.size() >= win) {
        const double mx = std::accumulate(sx.end() - win, sx.end(), 0.0) / win;
        const double my = std::accumulate(sy.end() - win, sy.end(), 0.0) / win;
        mag.push_back(std::hypot(mx, my));
      }
    }
    frac_above = std::count_if(mag.begin(), mag.end(), [](double m) { return m > 0.1; }) / double(mag.size());
    return std::accumulate(mag.begin(), mag.end(), 0.0) / mag.size();
  };
  double on_frac = 0, off_frac = 0;
  const double on = signature(true, on_frac), off = signature(false, off_frac);
  return {on >= 0.2 && on_frac >= 0.9 && off < 0.05,
          fmt("0.1 s mean |a_xy| over t >= %.0f s: aero on %.3f m/s^2 (>= 0.2, %.0f%% of window > 0.1, need 90%%), "
              "aero off %.4f m/s^2 (< 0.05)",
              cfg.rmse_window_start, on, 100 * on_frac, off)};
}

// 6: unscented filter against a closed-form Kalman filter on a linear case.
Outcome ukf_vs_kf() {
  const double d = oracle::ukf_vs_kalman(100, 11);
  return {d <= 1e-8, fmt("max |difference| in mean and covariance over 100 steps %.2e (limit 1e-8)", d)};
}

// 7: wind estimate in constant wind with calibrated drag.
Outcome constant_wind() {
  const ScenarioConfig cfg = config("wind_estimation");
  const RunResult r = run(cfg);
  if (!r.ok()) return {false, "run failed: " + r.failure->reason};
  const double e = run_metrics(cfg, r).wind_rmse;
  const bool sat = r.saturated_ticks == 0;
  return {e <= 0.5 && sat && r.calibration && !r.calibration->warning,
          fmt("wind RMSE %.3f m/s for t >= %.0f s (limit 0.5); fitted C = (%.2e, %.2e, %.2e); saturated ticks %ld",
              e, cfg.rmse_window_start, r.drag_hat.x(), r.drag_hat.y(), r.drag_hat.z(), r.saturated_ticks)};
}

// 8 and 10b share one randomized study.
std::vector<TrialResult> g_serial;

Outcome monte_carlo() {
  const MonteCarloSpec spec = load_montecarlo(fs::path(ROTORSIM_CONFIG_DIR) / "wind_study.json");
  g_serial = run_montecarlo_serial(spec);
  const MonteCarloSummary s = summarize(spec, g_serial);
  return {s.success_fraction >= 0.4 && s.decile_p_value < 0.05,
          fmt("%d/%d trials RMSE <= %.1f (%.0f%%, need 40%%); decile medians low-drag %.3f vs high-drag %.3f, "
              "one-sided p = %.3f (need < 0.05)",
              s.successes, s.trials, spec.success_rmse, 100 * s.success_fraction, s.low_drag_median_rmse,
              s.high_drag_median_rmse, s.decile_p_value)};
}

// 9: saturation inflates the error; feeding true thrust removes most of the gap.
Outcome saturation() {
  auto wind_rmse = [](const std::string& name, long* sat = nullptr) {
    const ScenarioConfig c = config(name);
    const RunResult r = run(c);
    if (sat) *sat = r.saturated_ticks;
    return r.ok() ? run_metrics(c, r).wind_rmse : std::numeric_limits<double>::infinity();
  };
  long sat_ticks = 0;
  const double saturated = wind_rmse("saturation", &sat_ticks);
  const double matched = wind_rmse("saturation_matched");
  const double oracle_mode = wind_rmse("saturation_oracle");
  const double ratio = saturated / matched;
  const double closed = (saturated - oracle_mode) / (saturated - matched);
  return {ratio >= 2.0 && closed > 0.5,
          fmt("saturated %.3f vs matched %.3f m/s (ratio %.2f, need >= 2; %ld saturated ticks); true-thrust %.3f m/s "
              "closes %.0f%% of the gap (need > 50%%)",
              saturated, matched, ratio, sat_ticks, oracle_mode, 100 * closed)};
}

// 10: byte-identical reruns and parallel == serial.
Outcome determinism() {
  const MonteCarloSpec spec = load_montecarlo(fs::path(ROTORSIM_CONFIG_DIR) / "wind_study.json");
  ScenarioConfig cfg = trial_config(spec, 0);
  cfg.duration = 10.0;
  const std::string a = csv_of(run(cfg).table), b = csv_of(run(cfg).table);
  if (g_serial.empty()) g_serial = run_montecarlo_serial(spec);
  const auto par = run_montecarlo_parallel(spec, 4);
  const fs::path dir = fs::temp_directory_path() / "rotorsim_acceptance";
  fs::remove_all(dir);
  write_montecarlo(spec, g_serial, summarize(spec, g_serial), dir / "serial");
  write_montecarlo(spec, par, summarize(spec, par), dir / "parallel");
  auto slurp = [](const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const bool same_files = slurp(dir / "serial" / "trials.csv") == slurp(dir / "parallel" / "trials.csv");
  fs::remove_all(dir);
  const bool ok = a == b && !a.empty() && par == g_serial && same_files;
  return {ok, fmt("rerun CSV %s (%zu bytes, fnv %016llx); parallel (4 threads) trials %s serial",
                  a == b ? "identical" : "DIFFERENT", a.size(), static_cast<unsigned long long>(fnv1a64(a)),
                  par == g_serial && same_files ? "==" : "!=")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--expect-fail") {
      std::stringstream ss(argv[i + 1]);
      for (std::string tok; std::getline(ss, tok, ',');) expected.insert(std::stoi(tok));
    }

  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"1 RK45 vs RK4 oracle", 30, rk45_vs_rk4},
      {"2 rotor first-order lag", 10, rotor_lag},
      {"3 aero properties", 10, aero_properties},
      {"4 noiseless sensors", 10, sensor_forms},
      {"5 circle drag signature", 60, circle_drag_signature},
      {"6 UKF vs Kalman filter", 10, ukf_vs_kf},
      {"7 constant wind estimate", 60, constant_wind},
      {"8 Monte Carlo study", 1200, monte_carlo},
      {"9 saturation", 120, saturation},
      {"10 determinism", 1200, determinism},
  };
  int failed = 0;
  std::set<int> failing;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && wall <= c.budget_s;
    failed += !pass;
    if (!pass) failing.insert(static_cast<int>(i) + 1);
    std::printf("%s  %-26s %s [%.1f s, budget %.0f s]\n", pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), wall,
                c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  if (!expected.empty()) {
    const bool match = failing == expected;
    std::printf("expected failures %s the observed set\n", match ? "match" : "do NOT match");
    return match ? 0 : 1;
  }
  return failed ? 1 : 0;
}
