#include "rotorsim/scenario.hpp"

#include "rotorsim/error.hpp"
#include "rotorsim/results.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace rotorsim {

using nlohmann::json;

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  int line = 1;
  for (std::size_t i = 0; i < offset; ++i)
    if (text[i] == '\n') ++line;
  return line;
}

// Reads one JSON object, rejecting keys that are never consumed.
class Reader {
 public:
  Reader(const json& j, std::string path, const std::string& text) : j_(j), path_(std::move(path)), text_(text) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) fail(child(key), "expected a number");
    return v.get<double>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(child(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) fail(child(key), "expected a string");
    return v.get<std::string>();
  }

  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      fail(child(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  // Accepts [a, b, c] or a scalar broadcast to all three axes.
  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (v.is_number()) return Vec3::Constant(v.get<double>());
    if (!v.is_array() || v.size() != 3) fail(child(key), "expected a number or an array of 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      if (!v[static_cast<std::size_t>(i)].is_number()) fail(child(key), "array entries must be numbers");
      out(i) = v[static_cast<std::size_t>(i)].get<double>();
    }
    return out;
  }

  // Diagonal covariance from standard deviations.
  Mat3 cov_from_std(const std::string& key, const Mat3& fallback) {
    if (!has(key)) return fallback;
    const Vec3 sd = vec3(key, Vec3::Zero());
    if ((sd.array() < 0).any()) fail(child(key), "standard deviations must be >= 0");
    return sd.cwiseProduct(sd).asDiagonal();
  }

  Reader object(const std::string& key) {
    const json& v = raw(key);
    return Reader(v, child(key), text_);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(child(it.key()), "unknown field");
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    const std::string leaf = field.substr(field.find_last_of('.') + 1);
    const auto pos = text_.find("\"" + leaf + "\"");
    throw ConfigError(field, what, pos == std::string::npos ? -1 : line_of_offset(text_, pos));
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  const std::string& text_;
  std::set<std::string> seen_;
};

VehicleParams parse_vehicle(Reader r) {
  VehicleParams p = vehicle_preset(r.string("preset", "default"));
  p.name = r.string("name", p.name);
  p.mass = r.number("mass", p.mass);
  if (r.has("inertia")) {
    const json& v = r.raw("inertia");
    if (v.is_array() && v.size() == 3 && v[0].is_array()) {
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) p.inertia(i, k) = v[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
    } else if (v.is_array() && v.size() == 3) {
      p.inertia = Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>()).asDiagonal();
    } else {
      r.fail(r.child("inertia"), "expected [Ixx, Iyy, Izz] or a 3x3 array");
    }
  }
  if (r.has("arm_length")) p.rotor_positions = x_configuration(r.number("arm_length", 0.0));
  if (r.has("rotor_positions")) {
    const json& v = r.raw("rotor_positions");
    if (!v.is_array()) r.fail(r.child("rotor_positions"), "expected an array of [x, y, z]");
    p.rotor_positions.clear();
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 3) r.fail(r.child("rotor_positions"), "expected [x, y, z] entries");
      p.rotor_positions.emplace_back(e[0].get<double>(), e[1].get<double>(), e[2].get<double>());
    }
  }
  if (r.has("rotor_spin")) {
    const json& v = r.raw("rotor_spin");
    if (!v.is_array()) r.fail(r.child("rotor_spin"), "expected an array of +1/-1");
    p.rotor_spin.clear();
    for (const auto& e : v) p.rotor_spin.push_back(e.get<int>());
  }
  p.k_eta = r.number("k_eta", p.k_eta);
  p.k_m = r.number("k_m", p.k_m);
  p.parasitic_drag = r.vec3("parasitic_drag", p.parasitic_drag);
  p.k_d = r.number("k_d", p.k_d);
  p.k_z = r.number("k_z", p.k_z);
  p.k_flap = r.number("k_flap", p.k_flap);
  p.tau_m = r.number("tau_m", p.tau_m);
  p.eta_min = r.number("eta_min", p.eta_min);
  p.eta_max = r.number("eta_max", p.eta_max);
  p.gravity = r.number("gravity", p.gravity);
  r.finish();
  try {
    p.validate();
  } catch (const ConfigError& e) {
    r.fail(r.child(e.field()), e.what());
  }
  return p;
}

GainSet parse_gains(Reader r, GainSet g) {
  g.k_x = r.vec3("k_x", g.k_x);
  g.k_v = r.vec3("k_v", g.k_v);
  g.k_R = r.vec3("k_R", g.k_R);
  g.k_Omega = r.vec3("k_Omega", g.k_Omega);
  r.finish();
  return g;
}

FigureEightSpec parse_figure_eight(Reader& r) {
  FigureEightSpec s;
  s.center = r.vec3("center", s.center);
  s.amplitude = r.vec3("amplitude", s.amplitude);
  s.max_phase_rate = r.number("max_phase_rate", s.max_phase_rate);
  s.sweep_time = r.number("sweep_time", s.sweep_time);
  return s;
}

TrajectorySpec parse_trajectory(Reader r) {
  const std::string type = r.string("type", "hover");
  TrajectorySpec out;
  if (type == "hover") {
    HoverSpec s;
    s.position = r.vec3("position", s.position);
    s.yaw = r.number("yaw", s.yaw);
    out = s;
  } else if (type == "circle") {
    CircleSpec s;
    s.center = r.vec3("center", s.center);
    s.radius = r.number("radius", s.radius);
    s.speed = r.number("speed", s.speed);
    s.ramp_time = r.number("ramp_time", s.ramp_time);
    if (!(s.radius > 0.0)) r.fail(r.child("radius"), "must be > 0");
    if (s.speed < 0.0) r.fail(r.child("speed"), "must be >= 0");
    out = s;
  } else if (type == "figure_eight") {
    out = parse_figure_eight(r);
  } else {
    r.fail(r.child("type"), "unknown trajectory type '" + type + "'");
  }
  r.finish();
  return out;
}

WindProfile parse_wind(Reader r) {
  const std::string type = r.string("type", "none");
  WindProfile out;
  if (type == "none") {
    out = ConstantWind{};
  } else if (type == "constant") {
    out = ConstantWind{r.vec3("wind", Vec3::Zero())};
  } else if (type == "step") {
    StepWind s;
    s.before = r.vec3("before", s.before);
    s.after = r.vec3("after", s.after);
    s.t_step = r.number("t_step", s.t_step);
    out = s;
  } else if (type == "sinusoid") {
    SinusoidWind s;
    s.mean = r.vec3("mean", s.mean);
    s.amplitude = r.vec3("amplitude", s.amplitude);
    s.frequency_hz = r.vec3("frequency_hz", s.frequency_hz);
    s.phase = r.vec3("phase", s.phase);
    if ((s.frequency_hz.array() <= 0.0).any()) r.fail(r.child("frequency_hz"), "must be > 0");
    out = s;
  } else if (type == "dryden") {
    DrydenWind d;
    d.mean = r.vec3("mean", d.mean);
    d.altitude = r.number("altitude", d.altitude);
    try {
      d.intensity = turbulence_class_from_string(r.string("intensity", "light"));
    } catch (const ConfigError& e) {
      r.fail(r.child("intensity"), e.what());
    }
    if (r.has("sigma")) d.sigma = r.vec3("sigma", Vec3::Zero());
    d.seed = r.unsigned_int("seed", 0);
    out = d;
  } else {
    r.fail(r.child("type"), "unknown wind type '" + type + "'");
  }
  r.finish();
  return out;
}

ImuConfig parse_imu(Reader r) {
  ImuConfig c;
  c.rate_hz = r.number("rate_hz", c.rate_hz);
  c.accel_noise_cov = r.cov_from_std("accel_noise_std", c.accel_noise_cov);
  c.gyro_noise_cov = r.cov_from_std("gyro_noise_std", c.gyro_noise_cov);
  c.accel_bias_rw = r.vec3("accel_bias_rw", c.accel_bias_rw);
  c.gyro_bias_rw = r.vec3("gyro_bias_rw", c.gyro_bias_rw);
  c.lever_arm = r.vec3("lever_arm", c.lever_arm);
  if (r.has("rotation_rpy")) {
    const Vec3 rpy = r.vec3("rotation_rpy", Vec3::Zero());
    c.body_to_imu = Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
                    Eigen::AngleAxisd(rpy.x(), Vec3::UnitX());
  }
  r.finish();
  return c;
}

MocapConfig parse_mocap(Reader r) {
  MocapConfig c;
  c.rate_hz = r.number("rate_hz", c.rate_hz);
  c.position_cov = r.cov_from_std("position_std", c.position_cov);
  c.velocity_cov = r.cov_from_std("velocity_std", c.velocity_cov);
  c.attitude_cov = r.cov_from_std("attitude_std", c.attitude_cov);
  c.body_rate_cov = r.cov_from_std("body_rate_std", c.body_rate_cov);
  r.finish();
  return c;
}

EstimatorSettings parse_estimator(Reader r) {
  EstimatorSettings s;
  s.enabled = r.boolean("enabled", s.enabled);
  if (r.has("drag")) s.drag = r.vec3("drag", Vec3::Zero());
  if (r.has("mass")) s.mass = r.number("mass", 0.0);
  s.calibration_duration = r.number("calibration_duration", s.calibration_duration);
  if (r.has("calibration_trajectory")) {
    Reader t = r.object("calibration_trajectory");
    s.calibration_trajectory = parse_figure_eight(t);
    t.finish();
  }
  EstimatorConfig& e = s.tuning;
  e.scaling.alpha = r.number("alpha", e.scaling.alpha);
  e.scaling.beta = r.number("beta", e.scaling.beta);
  e.scaling.kappa = r.number("kappa", e.scaling.kappa);
  e.attitude_time_constant = r.number("attitude_time_constant", e.attitude_time_constant);
  e.q_position = r.number("q_position", e.q_position);
  e.q_velocity = r.number("q_velocity", e.q_velocity);
  e.q_attitude = r.number("q_attitude", e.q_attitude);
  e.q_wind = r.number("q_wind", e.q_wind);
  e.r_accel = r.number("r_accel", e.r_accel);
  e.r_position = r.number("r_position", e.r_position);
  e.r_velocity = r.number("r_velocity", e.r_velocity);
  e.r_attitude = r.number("r_attitude", e.r_attitude);
  e.initial_wind_sigma = r.number("initial_wind_sigma", e.initial_wind_sigma);
  e.use_true_thrust = r.boolean("use_true_thrust", e.use_true_thrust);
  r.finish();
  return s;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json std_json(const Mat3& cov) {
  const Vec3 sd = cov.diagonal().cwiseSqrt();
  return vec_json(sd);
}

}  // namespace

void ScenarioConfig::validate() const {
  if (schema_version != kConfigSchemaVersion)
    throw ConfigError("schema_version", "unsupported schema version " + std::to_string(schema_version));
  if (!(duration > 0.0)) throw ConfigError("duration", "must be > 0");
  if (!(control_rate_hz > 0.0)) throw ConfigError("control_rate_hz", "must be > 0");
  vehicle.validate();
  gains.validate();
  imu.validate();
  mocap.validate();
  for (auto [rate, field] : {std::pair{imu.rate_hz, "imu.rate_hz"}, std::pair{mocap.rate_hz, "mocap.rate_hz"}}) {
    const double ratio = control_rate_hz / rate;
    if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-9)
      throw ConfigError(field, "must divide the control rate");
  }
  if (integrator.max_steps < 1) throw ConfigError("integrator.max_steps", "must be >= 1");
  if (!(integrator.rtol > 0.0) || !(integrator.atol > 0.0)) throw ConfigError("integrator", "rtol and atol must be > 0");
  if (estimator.enabled) {
    estimator.tuning.validate();
    if (estimator.drag && (estimator.drag->array() < 0.0).any()) throw ConfigError("estimator.drag", "must be >= 0");
    if (estimator.mass && !(*estimator.mass > 0.0)) throw ConfigError("estimator.mass", "must be > 0");
    if (!(estimator.calibration_duration > 0.0)) throw ConfigError("estimator.calibration_duration", "must be > 0");
  }
}

int locate_field_line(const std::string& text, const std::string& field) {
  const std::string leaf = field.substr(field.find_last_of('.') + 1);
  const auto pos = text.find("\"" + leaf + "\"");
  return pos == std::string::npos ? -1 : line_of_offset(text, pos);
}

ScenarioConfig parse_scenario(const std::string& text, const std::vector<std::string>& extra_keys) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("JSON syntax error: ") + e.what(), line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0));
  }

  ScenarioConfig cfg;
  Reader r(doc, "", text);
  try {
    if (!r.has("schema_version")) r.fail("schema_version", "required field missing");
    cfg.schema_version = static_cast<int>(r.unsigned_int("schema_version", 0));
    if (cfg.schema_version != kConfigSchemaVersion)
      r.fail("schema_version", "unsupported schema version " + std::to_string(cfg.schema_version));
    cfg.name = r.string("name", cfg.name);
    cfg.description = r.string("description", cfg.description);
    cfg.duration = r.number("duration", cfg.duration);
    cfg.seed = r.unsigned_int("seed", cfg.seed);
    cfg.control_rate_hz = r.number("control_rate_hz", cfg.control_rate_hz);
    cfg.aero_enabled = r.boolean("aero", cfg.aero_enabled);
    cfg.rmse_window_start = r.number("rmse_window_start", cfg.rmse_window_start);

    std::string preset = "default";
    if (r.has("vehicle")) {
      Reader v = r.object("vehicle");
      preset = v.has("preset") ? v.string("preset", preset) : preset;
      Reader v2 = Reader(doc.at("vehicle"), "vehicle", text);
      cfg.vehicle = parse_vehicle(std::move(v2));
    }
    cfg.gains = default_gains(preset);
    if (r.has("gains")) cfg.gains = parse_gains(r.object("gains"), cfg.gains);
    if (r.has("trajectory")) cfg.trajectory = parse_trajectory(r.object("trajectory"));
    if (r.has("wind")) cfg.wind = parse_wind(r.object("wind"));
    if (r.has("imu")) cfg.imu = parse_imu(r.object("imu"));
    if (r.has("mocap")) cfg.mocap = parse_mocap(r.object("mocap"));
    if (r.has("estimator")) cfg.estimator = parse_estimator(r.object("estimator"));
    if (r.has("integrator")) {
      Reader in = r.object("integrator");
      cfg.integrator.rtol = in.number("rtol", cfg.integrator.rtol);
      cfg.integrator.atol = in.number("atol", cfg.integrator.atol);
      cfg.integrator.max_steps = static_cast<long>(in.unsigned_int("max_steps", static_cast<std::uint64_t>(cfg.integrator.max_steps)));
      in.finish();
    }
    for (const auto& key : extra_keys)
      if (r.has(key)) r.raw(key);
    r.finish();
  } catch (const json::exception& e) {
    throw ConfigError("", std::string("malformed value: ") + e.what());
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    const int line = locate_field_line(text, e.field());
    if (e.line() >= 0 || line < 0) throw;
    throw ConfigError(e.field(), std::string(e.what()).substr(e.field().size() + 2), line);
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["description"] = c.description;
  j["duration"] = c.duration;
  j["seed"] = c.seed;
  j["control_rate_hz"] = c.control_rate_hz;
  j["aero"] = c.aero_enabled;
  j["rmse_window_start"] = c.rmse_window_start;
  j["integrator"] = {{"rtol", c.integrator.rtol}, {"atol", c.integrator.atol}, {"max_steps", c.integrator.max_steps}};

  const VehicleParams& v = c.vehicle;
  json rp = json::array();
  for (const auto& r : v.rotor_positions) rp.push_back(vec_json(r));
  json inertia = json::array();
  for (int i = 0; i < 3; ++i) inertia.push_back(json::array({v.inertia(i, 0), v.inertia(i, 1), v.inertia(i, 2)}));
  j["vehicle"] = {{"name", v.name},         {"mass", v.mass},         {"inertia", inertia},
                  {"rotor_positions", rp},  {"rotor_spin", v.rotor_spin}, {"k_eta", v.k_eta},
                  {"k_m", v.k_m},           {"parasitic_drag", vec_json(v.parasitic_drag)},
                  {"k_d", v.k_d},           {"k_z", v.k_z},           {"k_flap", v.k_flap},
                  {"tau_m", v.tau_m},       {"eta_min", v.eta_min},   {"eta_max", v.eta_max},
                  {"gravity", v.gravity}};
  j["gains"] = {{"k_x", vec_json(c.gains.k_x)},
                {"k_v", vec_json(c.gains.k_v)},
                {"k_R", vec_json(c.gains.k_R)},
                {"k_Omega", vec_json(c.gains.k_Omega)}};

  std::visit(
      [&j](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, HoverSpec>) {
          j["trajectory"] = {{"type", "hover"}, {"position", vec_json(t.position)}, {"yaw", t.yaw}};
        } else if constexpr (std::is_same_v<T, CircleSpec>) {
          j["trajectory"] = {{"type", "circle"}, {"center", vec_json(t.center)}, {"radius", t.radius},
                             {"speed", t.speed}, {"ramp_time", t.ramp_time}};
        } else {
          j["trajectory"] = {{"type", "figure_eight"}, {"center", vec_json(t.center)},
                             {"amplitude", vec_json(t.amplitude)}, {"max_phase_rate", t.max_phase_rate},
                             {"sweep_time", t.sweep_time}};
        }
      },
      c.trajectory);

  std::visit(
      [&j](const auto& w) {
        using T = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<T, ConstantWind>) {
          j["wind"] = {{"type", "constant"}, {"wind", vec_json(w.wind)}};
        } else if constexpr (std::is_same_v<T, StepWind>) {
          j["wind"] = {{"type", "step"}, {"before", vec_json(w.before)}, {"after", vec_json(w.after)},
                       {"t_step", w.t_step}};
        } else if constexpr (std::is_same_v<T, SinusoidWind>) {
          j["wind"] = {{"type", "sinusoid"}, {"mean", vec_json(w.mean)}, {"amplitude", vec_json(w.amplitude)},
                       {"frequency_hz", vec_json(w.frequency_hz)}, {"phase", vec_json(w.phase)}};
        } else {
          j["wind"] = {{"type", "dryden"}, {"mean", vec_json(w.mean)}, {"altitude", w.altitude},
                       {"intensity", to_string(w.intensity)}, {"seed", w.seed}};
          if (w.sigma) j["wind"]["sigma"] = vec_json(*w.sigma);
        }
      },
      c.wind);

  const Vec3 rpy = c.imu.body_to_imu.toRotationMatrix().eulerAngles(2, 1, 0).reverse();
  j["imu"] = {{"rate_hz", c.imu.rate_hz},
              {"accel_noise_std", std_json(c.imu.accel_noise_cov)},
              {"gyro_noise_std", std_json(c.imu.gyro_noise_cov)},
              {"accel_bias_rw", vec_json(c.imu.accel_bias_rw)},
              {"gyro_bias_rw", vec_json(c.imu.gyro_bias_rw)},
              {"lever_arm", vec_json(c.imu.lever_arm)},
              {"rotation_rpy", vec_json(rpy)}};
  j["mocap"] = {{"rate_hz", c.mocap.rate_hz},
                {"position_std", std_json(c.mocap.position_cov)},
                {"velocity_std", std_json(c.mocap.velocity_cov)},
                {"attitude_std", std_json(c.mocap.attitude_cov)},
                {"body_rate_std", std_json(c.mocap.body_rate_cov)}};

  const EstimatorSettings& e = c.estimator;
  const EstimatorConfig& t = e.tuning;
  j["estimator"] = {{"enabled", e.enabled},
                    {"calibration_duration", e.calibration_duration},
                    {"calibration_trajectory",
                     {{"center", vec_json(e.calibration_trajectory.center)},
                      {"amplitude", vec_json(e.calibration_trajectory.amplitude)},
                      {"max_phase_rate", e.calibration_trajectory.max_phase_rate},
                      {"sweep_time", e.calibration_trajectory.sweep_time}}},
                    {"alpha", t.scaling.alpha},
                    {"beta", t.scaling.beta},
                    {"kappa", t.scaling.kappa},
                    {"attitude_time_constant", t.attitude_time_constant},
                    {"q_position", t.q_position},
                    {"q_velocity", t.q_velocity},
                    {"q_attitude", t.q_attitude},
                    {"q_wind", t.q_wind},
                    {"r_accel", t.r_accel},
                    {"r_position", t.r_position},
                    {"r_velocity", t.r_velocity},
                    {"r_attitude", t.r_attitude},
                    {"initial_wind_sigma", t.initial_wind_sigma},
                    {"use_true_thrust", t.use_true_thrust}};
  if (e.drag) j["estimator"]["drag"] = vec_json(*e.drag);
  if (e.mass) j["estimator"]["mass"] = *e.mass;
  return j;
}

std::string config_hash(const ScenarioConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(scenario_to_json(cfg).dump())));
  return buf;
}

}  // namespace rotorsim
