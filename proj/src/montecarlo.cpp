#include "rotorsim/montecarlo.hpp"

#include "rotorsim/error.hpp"
#include "rotorsim/metrics.hpp"
#include "rotorsim/results.hpp"
#include "rotorsim/simulate.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace rotorsim {

using nlohmann::json;

namespace {

constexpr std::uint64_t kParameterStream = 11;
constexpr std::uint64_t kScenarioStream = 12;

double draw(const Range& r, Rng& rng) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); }

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void MonteCarloSpec::validate() const {
  base.validate();
  if (trials < 1) throw ConfigError("montecarlo.trials", "must be >= 1");
  for (auto [r, name] : {std::pair{mass, "mass"}, std::pair{parasitic_xy, "parasitic_xy"},
                         std::pair{parasitic_z, "parasitic_z"}, std::pair{k_d, "k_d"}, std::pair{k_z, "k_z"},
                         std::pair{wind_speed, "wind_speed"}}) {
    if (!(r.lo <= r.hi) || r.lo < 0.0) throw ConfigError(std::string("montecarlo.ranges.") + name, "need 0 <= lo <= hi");
  }
  if (!(mass.lo > 0.0)) throw ConfigError("montecarlo.ranges.mass", "must be > 0");
}

double drag_score(const VehicleParams& p, double reference_airspeed) {
  const double c_xy = 0.5 * (p.parasitic_drag.x() + p.parasitic_drag.y());
  const double n = static_cast<double>(p.num_rotors());
  return (n * p.k_d * p.hover_rotor_speed() + 2.0 * c_xy * reference_airspeed) / p.mass;
}

ScenarioConfig trial_config(const MonteCarloSpec& spec, int i) {
  const std::uint64_t trial_seed = mix_seed(spec.seed, static_cast<std::uint64_t>(i));
  Rng rng(mix_seed(trial_seed, kParameterStream));
  ScenarioConfig cfg = spec.base;
  cfg.name = spec.base.name + "_trial" + std::to_string(i);
  cfg.seed = mix_seed(trial_seed, kScenarioStream);
  VehicleParams& v = cfg.vehicle;
  v.mass = draw(spec.mass, rng);
  v.parasitic_drag.x() = draw(spec.parasitic_xy, rng);
  v.parasitic_drag.y() = draw(spec.parasitic_xy, rng);
  v.parasitic_drag.z() = draw(spec.parasitic_z, rng);
  v.k_d = draw(spec.k_d, rng);
  v.k_z = draw(spec.k_z, rng);
  const double speed = draw(spec.wind_speed, rng);
  const double heading = draw({0.0, 2.0 * std::numbers::pi}, rng);
  const Vec3 mean(speed * std::cos(heading), speed * std::sin(heading), 0.0);
  if (auto* d = std::get_if<DrydenWind>(&cfg.wind))
    d->mean = mean;
  else
    cfg.wind = ConstantWind{mean};
  return cfg;
}

TrialResult run_trial(const MonteCarloSpec& spec, int i) {
  const ScenarioConfig cfg = trial_config(spec, i);
  TrialResult t;
  t.index = i;
  t.seed = cfg.seed;
  t.mass = cfg.vehicle.mass;
  t.parasitic = cfg.vehicle.parasitic_drag;
  t.k_d = cfg.vehicle.k_d;
  t.k_z = cfg.vehicle.k_z;
  std::visit([&t](const auto& w) {
    using T = std::decay_t<decltype(w)>;
    if constexpr (std::is_same_v<T, DrydenWind>) t.wind_mean = w.mean;
    else if constexpr (std::is_same_v<T, ConstantWind>) t.wind_mean = w.wind;
  }, cfg.wind);
  t.drag_score = drag_score(cfg.vehicle, spec.reference_airspeed);

  RunResult r;
  try {
    r = run(cfg);
  } catch (const Error& e) {
    t.failure = e.what();
    return t;
  }
  t.ok = r.ok();
  if (r.failure) t.failure = r.failure->reason;
  const RunMetrics m = run_metrics(cfg, r);
  t.wind_rmse = m.wind_rmse;
  t.position_rmse = m.position_rmse;
  t.drag_hat = r.drag_hat;
  t.calibration_warning = r.calibration && r.calibration->warning;
  t.saturated_ticks = r.saturated_ticks;
  return t;
}

std::vector<TrialResult> run_montecarlo_serial(const MonteCarloSpec& spec) {
  spec.validate();
  std::vector<TrialResult> out;
  out.reserve(static_cast<std::size_t>(spec.trials));
  for (int i = 0; i < spec.trials; ++i) out.push_back(run_trial(spec, i));
  return out;
}

std::vector<TrialResult> run_montecarlo_parallel(const MonteCarloSpec& spec, int threads) {
  spec.validate();
  std::vector<TrialResult> out(static_cast<std::size_t>(spec.trials));
  if (threads <= 0) threads = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < spec.trials; ++i) out[static_cast<std::size_t>(i)] = run_trial(spec, i);
  return out;
}

MonteCarloSummary summarize(const MonteCarloSpec& spec, const std::vector<TrialResult>& trials) {
  MonteCarloSummary s;
  s.trials = static_cast<int>(trials.size());
  std::vector<double> rmse(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const TrialResult& t = trials[i];
    if (t.ok) ++s.completed;
    if (t.success(spec.success_rmse)) ++s.successes;
    rmse[i] = t.ok && std::isfinite(t.wind_rmse) ? t.wind_rmse : std::numeric_limits<double>::infinity();
  }
  s.success_fraction = s.trials ? static_cast<double>(s.successes) / s.trials : 0.0;
  s.median_rmse = median(rmse);

  const std::size_t decile = trials.size() / 10;
  if (decile == 0) return s;
  std::vector<std::size_t> order(trials.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&trials](std::size_t a, std::size_t b) { return trials[a].drag_score < trials[b].drag_score; });
  std::vector<double> low, high;
  for (std::size_t k = 0; k < decile; ++k) {
    const std::size_t lo = order[k], hi = order[order.size() - 1 - k];
    s.low_drag.push_back(trials[lo].index);
    s.high_drag.push_back(trials[hi].index);
    low.push_back(rmse[lo]);
    high.push_back(rmse[hi]);
  }
  s.low_drag_median_rmse = median(low);
  s.high_drag_median_rmse = median(high);
  s.decile_p_value = mann_whitney_greater(low, high);
  return s;
}

MonteCarloSpec parse_montecarlo(const std::string& text) {
  MonteCarloSpec spec;
  spec.base = parse_scenario(text, {"montecarlo"});
  const json doc = json::parse(text);
  if (!doc.contains("montecarlo")) return spec;
  const json& mc = doc.at("montecarlo");
  auto fail = [&text](const std::string& field, const std::string& what) {
    throw ConfigError(field, what, locate_field_line(text, field));
  };
  if (!mc.is_object()) fail("montecarlo", "expected an object");
  for (auto it = mc.begin(); it != mc.end(); ++it) {
    const std::string key = it.key();
    const std::string field = "montecarlo." + key;
    const json& v = it.value();
    if (key == "trials") {
      if (!v.is_number_integer() || v.get<long long>() < 1) fail(field, "expected a positive integer");
      spec.trials = v.get<int>();
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) fail(field, "expected a non-negative integer");
      spec.seed = v.get<std::uint64_t>();
    } else if (key == "success_rmse" || key == "reference_airspeed") {
      if (!v.is_number()) fail(field, "expected a number");
      (key == "success_rmse" ? spec.success_rmse : spec.reference_airspeed) = v.get<double>();
    } else if (key == "ranges") {
      if (!v.is_object()) fail(field, "expected an object");
      for (auto r = v.begin(); r != v.end(); ++r) {
        const std::string rf = field + "." + r.key();
        Range* target = nullptr;
        if (r.key() == "mass") target = &spec.mass;
        else if (r.key() == "parasitic_xy") target = &spec.parasitic_xy;
        else if (r.key() == "parasitic_z") target = &spec.parasitic_z;
        else if (r.key() == "k_d") target = &spec.k_d;
        else if (r.key() == "k_z") target = &spec.k_z;
        else if (r.key() == "wind_speed") target = &spec.wind_speed;
        else fail(rf, "unknown field");
        const json& a = r.value();
        if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) fail(rf, "expected [lo, hi]");
        *target = {a[0].get<double>(), a[1].get<double>()};
      }
    } else {
      fail(field, "unknown field");
    }
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    if (e.line() >= 0) throw;
    throw ConfigError(e.field(), std::string(e.what()).substr(e.field().size() + 2),
                      locate_field_line(text, e.field()));
  }
  return spec;
}

MonteCarloSpec load_montecarlo(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_montecarlo(ss.str());
}

json summary_to_json(const MonteCarloSpec& spec, const MonteCarloSummary& s) {
  auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  auto range = [](const Range& r) { return json::array({r.lo, r.hi}); };
  return {{"results_schema_version", kResultsSchemaVersion},
          {"library_version", kLibraryVersion},
          {"config_hash", config_hash(spec.base)},
          {"seed", spec.seed},
          {"trials", s.trials},
          {"completed", s.completed},
          {"successes", s.successes},
          {"success_fraction", s.success_fraction},
          {"success_rmse", spec.success_rmse},
          {"median_wind_rmse", num(s.median_rmse)},
          {"drag_deciles",
           {{"low", s.low_drag},
            {"high", s.high_drag},
            {"low_median_rmse", num(s.low_drag_median_rmse)},
            {"high_median_rmse", num(s.high_drag_median_rmse)},
            {"p_value_low_greater", s.decile_p_value},
            {"reference_airspeed", spec.reference_airspeed}}},
          {"ranges",
           {{"mass", range(spec.mass)},
            {"parasitic_xy", range(spec.parasitic_xy)},
            {"parasitic_z", range(spec.parasitic_z)},
            {"k_d", range(spec.k_d)},
            {"k_z", range(spec.k_z)},
            {"wind_speed", range(spec.wind_speed)}}},
          {"base_config", scenario_to_json(spec.base)}};
}

void write_montecarlo(const MonteCarloSpec& spec, const std::vector<TrialResult>& trials,
                      const MonteCarloSummary& summary, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / "trials.csv");
  if (!os) throw Error("cannot write " + (dir / "trials.csv").string());
  os << "trial,seed,mass,c_dx,c_dy,c_dz,k_d,k_z,wind_x,wind_y,wind_z,drag_score,ok,wind_rmse,position_rmse,"
        "c_hat_x,c_hat_y,c_hat_z,calibration_warning,saturated_ticks,failure\n";
  for (const TrialResult& t : trials) {
    os << t.index << ',' << t.seed;
    for (double v : {t.mass, t.parasitic.x(), t.parasitic.y(), t.parasitic.z(), t.k_d, t.k_z, t.wind_mean.x(),
                      t.wind_mean.y(), t.wind_mean.z(), t.drag_score})
      os << ',' << format_number(v);
    os << ',' << (t.ok ? 1 : 0) << ',' << format_number(t.wind_rmse) << ',' << format_number(t.position_rmse);
    for (int k = 0; k < 3; ++k) os << ',' << format_number(t.drag_hat(k));
    std::string reason = t.failure;
    std::replace(reason.begin(), reason.end(), ',', ';');
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    os << ',' << (t.calibration_warning ? 1 : 0) << ',' << t.saturated_ticks << ',' << reason << '\n';
  }
  std::ofstream js(dir / "summary.json");
  js << summary_to_json(spec, summary).dump(2) << '\n';
}

}  // namespace rotorsim
