#include "rotorsim/simulate.hpp"

#include "rotorsim/actuators.hpp"
#include "rotorsim/controller.hpp"
#include "rotorsim/metrics.hpp"

#include <cmath>
#include <fstream>

namespace rotorsim {

using nlohmann::json;

namespace {

// Seed streams derived from the scenario seed.
constexpr std::uint64_t kSensorStream = 1;
constexpr std::uint64_t kBiasStream = 2;
constexpr std::uint64_t kWindStream = 3;
constexpr std::uint64_t kCalibrationStream = 7;

struct Columns {
  std::size_t t, x, v, q, omega, eta, thrust_true;
  std::size_t x_des, v_des, a_des, j_des, yaw_des, yaw_rate_des;
  std::size_t thrust_cmd, m_cmd, q_des, eta_cmd, sat;
  std::size_t wind, accel, gyro;
  std::size_t mocap_x, mocap_v, mocap_q, mocap_omega;
  std::size_t est_x, est_v, est_q, est_wind, est_wind_std;

  explicit Columns(const ResultsTable& tb)
      : t(tb.index("t")), x(tb.index("x")), v(tb.index("vx")), q(tb.index("qw")), omega(tb.index("omega_x")),
        eta(tb.index("eta_0")), thrust_true(tb.index("thrust_true")), x_des(tb.index("x_des")),
        v_des(tb.index("vx_des")), a_des(tb.index("ax_des")), j_des(tb.index("jx_des")),
        yaw_des(tb.index("yaw_des")), yaw_rate_des(tb.index("yaw_rate_des")), thrust_cmd(tb.index("thrust_cmd")),
        m_cmd(tb.index("mx_cmd")), q_des(tb.index("qw_des")), eta_cmd(tb.index("eta_cmd_0")),
        sat(tb.index("sat_0")), wind(tb.index("wind_x")), accel(tb.index("accel_x")), gyro(tb.index("gyro_x")),
        mocap_x(tb.index("mocap_x")), mocap_v(tb.index("mocap_vx")), mocap_q(tb.index("mocap_qw")),
        mocap_omega(tb.index("mocap_omega_x")), est_x(tb.index("est_x")), est_v(tb.index("est_vx")),
        est_q(tb.index("est_qw")), est_wind(tb.index("est_wind_x")), est_wind_std(tb.index("est_wind_std_x")) {}
};

void put(double* row, std::size_t c, const Vec3& v) {
  row[c] = v.x();
  row[c + 1] = v.y();
  row[c + 2] = v.z();
}

void put(double* row, std::size_t c, const Quat& q) {
  row[c] = q.w();
  row[c + 1] = q.x();
  row[c + 2] = q.y();
  row[c + 3] = q.z();
}

Vec3 get3(const ResultsTable& tb, std::size_t r, std::size_t c) {
  return Vec3(tb.at(r, c), tb.at(r, c + 1), tb.at(r, c + 2));
}

long ticks_per_sample(double control_rate, double sensor_rate) {
  return std::max(1L, std::lround(control_rate / sensor_rate));
}

double collective_thrust(const VecX& eta, const VehicleParams& p) { return p.k_eta * eta.squaredNorm(); }

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

ScenarioConfig calibration_scenario(const ScenarioConfig& cfg) {
  ScenarioConfig c = cfg;
  c.name = cfg.name + "_calibration";
  c.trajectory = cfg.estimator.calibration_trajectory;
  c.wind = ConstantWind{};
  c.estimator.enabled = false;
  c.duration = cfg.estimator.calibration_duration;
  c.seed = mix_seed(cfg.seed, kCalibrationStream);
  return c;
}

CalibrationLog calibration_log(const ResultsTable& tb) {
  const Columns c(tb);
  CalibrationLog log;
  for (std::size_t r = 0; r < tb.rows(); ++r) {
    const Vec3 accel = get3(tb, r, c.accel);
    if (!accel.allFinite()) continue;
    log.velocity.push_back(get3(tb, r, c.v));
    log.attitude.push_back(Quat(tb.at(r, c.q), tb.at(r, c.q + 1), tb.at(r, c.q + 2), tb.at(r, c.q + 3)));
    log.wind.push_back(get3(tb, r, c.wind));
    log.thrust.push_back(tb.at(r, c.thrust_cmd));
    log.accel.push_back(accel);
  }
  return log;
}

RunResult run(const ScenarioConfig& cfg) {
  cfg.validate();
  const VehicleParams& params = cfg.vehicle;
  const std::size_t n_rotors = params.num_rotors();

  RunResult result;
  result.mass_hat = cfg.estimator.mass.value_or(params.mass);

  std::optional<WindEstimator> estimator;
  if (cfg.estimator.enabled) {
    if (cfg.estimator.drag) {
      result.drag_hat = *cfg.estimator.drag;
    } else {
      const RunResult cal = run(calibration_scenario(cfg));
      if (!cal.ok()) {
        result.failure = FailureRecord{"calibration flight failed: " + cal.failure->reason, cal.failure->time,
                                       cal.failure->last_good};
        return result;
      }
      result.calibration = calibrate_drag(calibration_log(cal.table), result.mass_hat);
      result.drag_hat = result.calibration->drag;
    }
    estimator.emplace(cfg.estimator.tuning, result.mass_hat, result.drag_hat, params.gravity);
  }

  WindProfile profile = cfg.wind;
  if (auto* d = std::get_if<DrydenWind>(&profile)) d->seed = mix_seed(mix_seed(cfg.seed, kWindStream), d->seed);
  // Wind is sampled once per control tick and held over the interval.
  WindModel wind(profile);

  Rng sensor_rng(mix_seed(cfg.seed, kSensorStream));
  Rng bias_rng(mix_seed(cfg.seed, kBiasStream));
  ImuBias bias;

  Se3Controller controller(params, cfg.gains);
  const Mixer mixer(params);

  const double dt = 1.0 / cfg.control_rate_hz;
  const long steps = std::lround(cfg.duration * cfg.control_rate_hz);
  const long imu_every = ticks_per_sample(cfg.control_rate_hz, cfg.imu.rate_hz);
  const long mocap_every = ticks_per_sample(cfg.control_rate_hz, cfg.mocap.rate_hz);

  IntegratorOptions iopt = cfg.integrator;
  iopt.aero_enabled = cfg.aero_enabled;

  result.table = ResultsTable(results_schema(n_rotors));
  result.table.reserve(static_cast<std::size_t>(steps + 1));
  const Columns col(result.table);

  VehicleState state = VehicleState::hover(params, start_position(cfg.trajectory));
  ukf::ControlInput u_prev{params.mass * params.gravity, state.attitude};
  double true_thrust_prev = collective_thrust(state.rotor_speed, params);

  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    state.time = t;
    double* row = result.table.append_row();
    row[col.t] = t;

    try {
      state.check_finite();
      const FlatOutput flat = evaluate(cfg.trajectory, t);
      const ControlOutput ctrl = controller.compute(state, flat);
      const MotorCommand cmd = mixer.mix(ctrl.thrust, ctrl.moment);
      if (cmd.any_saturated()) ++result.saturated_ticks;
      const Vec3 w = wind.sample(t, state.position);
      const StateDerivative deriv = dynamics(state, cmd.eta_c, w, params, cfg.aero_enabled);
      const double true_thrust = collective_thrust(state.rotor_speed, params);

      put(row, col.x, state.position);
      put(row, col.v, state.velocity);
      put(row, col.q, state.attitude);
      put(row, col.omega, state.body_rate);
      for (std::size_t i = 0; i < n_rotors; ++i) {
        row[col.eta + i] = state.rotor_speed(static_cast<Eigen::Index>(i));
        row[col.eta_cmd + i] = cmd.eta_c(static_cast<Eigen::Index>(i));
        row[col.sat + i] = cmd.saturated[i] ? 1.0 : 0.0;
      }
      row[col.thrust_true] = true_thrust;
      put(row, col.x_des, flat.position);
      put(row, col.v_des, flat.velocity);
      put(row, col.a_des, flat.acceleration);
      put(row, col.j_des, flat.jerk);
      row[col.yaw_des] = flat.yaw;
      row[col.yaw_rate_des] = flat.yaw_rate;
      row[col.thrust_cmd] = ctrl.thrust;
      put(row, col.m_cmd, ctrl.moment);
      put(row, col.q_des, ctrl.attitude_des);
      put(row, col.wind, w);

      std::optional<SensorMeasurement> imu, mocap;
      if (k % imu_every == 0) {
        imu = imu_measure(state, deriv.dv, cfg.imu, bias, params.gravity, sensor_rng);
        put(row, col.accel, imu->imu().accel);
        put(row, col.gyro, imu->imu().gyro);
        const double dt_imu = static_cast<double>(imu_every) * dt;
        bias.accel = bias_step(bias.accel, cfg.imu.accel_bias_rw, dt_imu, bias_rng);
        bias.gyro = bias_step(bias.gyro, cfg.imu.gyro_bias_rw, dt_imu, bias_rng);
      }
      if (k % mocap_every == 0) {
        mocap = mocap_measure(state, cfg.mocap, sensor_rng);
        put(row, col.mocap_x, mocap->mocap().position);
        put(row, col.mocap_v, mocap->mocap().velocity);
        put(row, col.mocap_q, mocap->mocap().attitude);
        put(row, col.mocap_omega, mocap->mocap().body_rate);
      }

      if (estimator) {
        // The filter sees the command issued on the previous tick (or, in
        // the oracle ablation, the rotor thrust that actually acted).
        ukf::ControlInput u = u_prev;
        if (cfg.estimator.tuning.use_true_thrust) u.thrust = true_thrust_prev;
        const double accel_thrust = cfg.estimator.tuning.use_true_thrust ? true_thrust : u_prev.thrust;
        if (!estimator->initialized()) {
          if (mocap) estimator->initialize(mocap->mocap(), t);
        } else {
          estimator->predict_to(t, u);
          if (imu) estimator->update(*imu, accel_thrust);
          if (mocap) estimator->update(*mocap, accel_thrust);
        }
        if (estimator->initialized()) {
          const ukf::UkfBelief& b = estimator->belief();
          put(row, col.est_x, b.mean.position);
          put(row, col.est_v, b.mean.velocity);
          put(row, col.est_q, b.mean.attitude);
          put(row, col.est_wind, b.mean.wind);
          put(row, col.est_wind_std, Vec3(b.cov.diagonal().segment<3>(ukf::kWind).cwiseSqrt()));
        }
      }
      u_prev = {ctrl.thrust, ctrl.attitude_des};
      true_thrust_prev = true_thrust;

      if (k == steps) break;
      state = integrate(state, cmd.eta_c, w, params, dt, iopt, &result.integration);
    } catch (const IntegrationError& e) {
      result.failure = FailureRecord{e.what(), e.time(), e.last_good()};
      break;
    } catch (const Error& e) {
      result.failure = FailureRecord{e.what(), t, state};
      break;
    }
  }
  if (estimator) result.skipped_updates = estimator->skipped_updates();
  return result;
}

RunMetrics run_metrics(const ScenarioConfig& cfg, const RunResult& r) {
  RunMetrics m;
  m.position_rmse = rmse(r.table, {"x", "y", "z"}, {"x_des", "y_des", "z_des"}, cfg.rmse_window_start);
  m.wind_rmse = cfg.estimator.enabled
                    ? rmse(r.table, {"est_wind_x", "est_wind_y", "est_wind_z"}, {"wind_x", "wind_y", "wind_z"},
                           cfg.rmse_window_start)
                    : std::nan("");
  return m;
}

json failure_to_json(const FailureRecord& f) {
  const VehicleState& s = f.last_good;
  json eta = json::array();
  for (Eigen::Index i = 0; i < s.rotor_speed.size(); ++i) eta.push_back(s.rotor_speed(i));
  return {{"reason", f.reason},
          {"time", f.time},
          {"last_good_state",
           {{"time", s.time},
            {"position", vec_json(s.position)},
            {"velocity", vec_json(s.velocity)},
            {"attitude_wxyz", json::array({s.attitude.w(), s.attitude.x(), s.attitude.y(), s.attitude.z()})},
            {"body_rate", vec_json(s.body_rate)},
            {"rotor_speed", eta}}}};
}

json run_sidecar(const ScenarioConfig& cfg, const RunResult& r) {
  const RunMetrics m = run_metrics(cfg, r);
  auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["results_schema_version"] = kResultsSchemaVersion;
  j["library_version"] = kLibraryVersion;
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.seed;
  j["rows"] = r.table.rows();
  j["columns"] = r.table.columns();
  j["units"] = "SI; world frame ENU (z up); quaternions body-to-world (w, x, y, z); NaN where a sensor has no sample";
  j["integrator"] = {{"accepted_steps", r.integration.accepted},
                     {"rejected_steps", r.integration.rejected},
                     {"evaluations", r.integration.evaluations}};
  j["saturated_ticks"] = r.saturated_ticks;
  j["metrics"] = {{"position_rmse", num(m.position_rmse)},
                  {"wind_rmse", num(m.wind_rmse)},
                  {"window_start", cfg.rmse_window_start}};
  if (cfg.estimator.enabled) {
    j["estimator"] = {{"mass_hat", r.mass_hat},
                      {"drag_hat", vec_json(r.drag_hat)},
                      {"skipped_updates", r.skipped_updates}};
    if (r.calibration) {
      const CalibrationResult& c = *r.calibration;
      j["estimator"]["calibration"] = {{"drag", vec_json(c.drag)},
                                       {"residual_rms", vec_json(c.residual_rms)},
                                       {"regressor_rms", vec_json(c.regressor_rms)},
                                       {"relative_uncertainty", vec_json(c.relative_uncertainty)},
                                       {"samples", c.samples},
                                       {"warning", c.warning}};
    }
  }
  j["status"] = r.ok() ? "ok" : "failed";
  if (r.failure) j["failure"] = failure_to_json(*r.failure);
  j["config"] = scenario_to_json(cfg);
  return j;
}

std::optional<std::filesystem::path> write_run(const ScenarioConfig& cfg, const RunResult& r,
                                               const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / (stem + ".csv"));
    if (!os) throw Error("cannot write " + (dir / (stem + ".csv")).string());
    r.table.write_csv(os);
  }
  {
    std::ofstream os(dir / (stem + ".json"));
    os << run_sidecar(cfg, r).dump(2) << '\n';
  }
  if (!r.failure) return std::nullopt;
  const auto path = dir / (stem + ".failure.json");
  json f = failure_to_json(*r.failure);
  f["config_hash"] = config_hash(cfg);
  f["seed"] = cfg.seed;
  std::ofstream os(path);
  os << f.dump(2) << '\n';
  return path;
}

}  // namespace rotorsim
