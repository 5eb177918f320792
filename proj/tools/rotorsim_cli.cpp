#include "rotorsim/error.hpp"
#include "rotorsim/montecarlo.hpp"
#include "rotorsim/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#ifndef ROTORSIM_CONFIG_DIR
#define ROTORSIM_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;
using namespace rotorsim;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kSimulation = 3, kUsage = 64 };

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int parallel = 1;
  bool no_aero = false;
};

class SimulationFailed : public Error {
 public:
  SimulationFailed(const std::string& what, fs::path record) : Error(what), record_(std::move(record)) {}
  const fs::path& record() const { return record_; }

 private:
  fs::path record_;
};

// A bare name resolves to a bundled config.
fs::path resolve_config(const std::string& arg) {
  fs::path p(arg);
  if (fs::exists(p)) return p;
  fs::path bundled = fs::path(ROTORSIM_CONFIG_DIR) / p;
  if (!bundled.has_extension()) bundled += ".json";
  if (fs::exists(bundled)) return bundled;
  throw ConfigError("--config", "no such file or bundled scenario: " + arg);
}

void apply_overrides(ScenarioConfig& cfg, const Options& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.no_aero) cfg.aero_enabled = false;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_run(const ScenarioConfig& cfg, const RunResult& r, double wall, const fs::path& dir, const std::string& stem) {
  const RunMetrics m = run_metrics(cfg, r);
  const double simulated = r.table.rows() ? r.table.at(r.table.rows() - 1, 0) : 0.0;
  std::printf("%-22s simulated %.3f s in %.2f s wall  position RMSE %.4f m", stem.c_str(), simulated, wall,
              m.position_rmse);
  if (std::isfinite(m.wind_rmse)) std::printf("  wind RMSE %.3f m/s", m.wind_rmse);
  if (r.saturated_ticks) std::printf("  saturated ticks %ld", r.saturated_ticks);
  std::printf("\n  -> %s\n", (dir / (stem + ".csv")).string().c_str());
}

void run_and_write(const ScenarioConfig& cfg, const fs::path& dir, const std::string& stem) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run(cfg);
  const double wall = seconds_since(t0);
  const auto failure = write_run(cfg, r, dir, stem);
  print_run(cfg, r, wall, dir, stem);
  if (failure) throw SimulationFailed(r.failure->reason, *failure);
}

void cmd_run(const Options& o) {
  ScenarioConfig cfg = load_scenario(resolve_config(o.config));
  apply_overrides(cfg, o);
  run_and_write(cfg, o.out, cfg.name);
}

void cmd_benchmark_circle(const Options& o) {
  ScenarioConfig cfg = load_scenario(resolve_config(o.config.empty() ? "circle_benchmark" : o.config));
  if (o.seed) cfg.seed = *o.seed;
  cfg.aero_enabled = true;
  run_and_write(cfg, o.out, cfg.name + "_aero_on");
  cfg.aero_enabled = false;
  run_and_write(cfg, o.out, cfg.name + "_aero_off");
}

void cmd_calibrate(const Options& o) {
  ScenarioConfig cfg = load_scenario(resolve_config(o.config));
  apply_overrides(cfg, o);
  const ScenarioConfig cal = calibration_scenario(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run(cal);
  const double wall = seconds_since(t0);
  const auto failure = write_run(cal, r, o.out, cal.name);
  print_run(cal, r, wall, o.out, cal.name);
  if (failure) throw SimulationFailed(r.failure->reason, *failure);

  const double mass_hat = cfg.estimator.mass.value_or(cfg.vehicle.mass);
  const CalibrationResult c = calibrate_drag(calibration_log(r.table), mass_hat);
  auto v = [](const Vec3& x) { return nlohmann::json::array({x.x(), x.y(), x.z()}); };
  const nlohmann::json j = {{"config_hash", config_hash(cfg)},
                            {"seed", cal.seed},
                            {"mass_hat", mass_hat},
                            {"drag", v(c.drag)},
                            {"residual_rms", v(c.residual_rms)},
                            {"regressor_rms", v(c.regressor_rms)},
                            {"relative_uncertainty", v(c.relative_uncertainty)},
                            {"samples", c.samples},
                            {"warning", c.warning}};
  std::ofstream(fs::path(o.out) / "calibration.json") << j.dump(2) << '\n';
  std::printf("C_hat = (%.4g, %.4g, %.4g)  relative uncertainty (%.3g, %.3g, %.3g)%s\n", c.drag.x(), c.drag.y(),
              c.drag.z(), c.relative_uncertainty.x(), c.relative_uncertainty.y(), c.relative_uncertainty.z(),
              c.warning ? "  WARNING: poorly identified" : "");
}

void cmd_montecarlo(const Options& o) {
  MonteCarloSpec spec = load_montecarlo(resolve_config(o.config.empty() ? "wind_study" : o.config));
  if (o.seed) spec.seed = *o.seed;
  if (o.trials) spec.trials = *o.trials;
  if (o.no_aero) spec.base.aero_enabled = false;
  const auto t0 = std::chrono::steady_clock::now();
  const auto trials = o.parallel > 1 ? run_montecarlo_parallel(spec, o.parallel) : run_montecarlo_serial(spec);
  const double wall = seconds_since(t0);
  const MonteCarloSummary s = summarize(spec, trials);
  write_montecarlo(spec, trials, s, o.out);
  std::printf("%d trials (%d completed) of %.1f s each in %.1f s wall\n", s.trials, s.completed, spec.base.duration,
              wall);
  std::printf("wind RMSE <= %.2f m/s: %d/%d (%.0f %%), median %.3f m/s\n", spec.success_rmse, s.successes, s.trials,
              100.0 * s.success_fraction, s.median_rmse);
  std::printf("drag deciles: low median %.3f m/s, high median %.3f m/s, one-sided p = %.4f\n",
              s.low_drag_median_rmse, s.high_drag_median_rmse, s.decile_p_value);
  std::printf("  -> %s\n", (fs::path(o.out) / "summary.json").string().c_str());
}

void cmd_list() {
  const fs::path dir(ROTORSIM_CONFIG_DIR);
  if (!fs::is_directory(dir)) {
    std::printf("no bundled scenarios at %s\n", dir.string().c_str());
    return;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    std::string kind = j.contains("montecarlo") ? "montecarlo" : "scenario";
    std::string desc = j.is_object() && j.contains("description") ? j["description"].get<std::string>() : "";
    std::printf("%-22s %-10s %s\n", f.stem().string().c_str(), kind.c_str(), desc.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotorsim: multirotor flight simulation batch tool"};
  app.require_subcommand(1);
  app.footer(
      "Flags: --config, --out, --seed, --trials, --parallel, --no-aero (see <subcommand> --help).\n"
      "Exit codes: 0 ok, 1 I/O or internal error, 2 config error, 3 simulation failure, 64 usage error.");

  Options o;
  auto add_common = [&o](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "scenario JSON file or bundled scenario name");
    if (config_required) c->required();
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "override the scenario seed");
  };

  auto* run_cmd = app.add_subcommand("run", "simulate one scenario; writes <name>.csv and <name>.json");
  add_common(run_cmd, true);
  run_cmd->add_flag("--no-aero", o.no_aero, "disable aerodynamic wrenches");

  auto* mc_cmd = app.add_subcommand("montecarlo", "randomized wind-estimation study; writes trials.csv and summary.json");
  add_common(mc_cmd, false);
  mc_cmd->add_option("--trials", o.trials, "override the trial count")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--parallel", o.parallel, "worker threads; 1 runs the serial reference")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  mc_cmd->add_flag("--no-aero", o.no_aero, "disable aerodynamic wrenches");

  auto* bench_cmd =
      app.add_subcommand("benchmark-circle", "1.5 m / 2.5 m/s circle with aero on and off; writes both tables");
  add_common(bench_cmd, false);

  auto* cal_cmd = app.add_subcommand("calibrate", "fly the calibration trajectory and fit drag coefficients");
  add_common(cal_cmd, true);
  cal_cmd->add_flag("--no-aero", o.no_aero, "disable aerodynamic wrenches");

  auto* list_cmd = app.add_subcommand("list-scenarios", "list bundled scenario configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) cmd_run(o);
    else if (*mc_cmd) cmd_montecarlo(o);
    else if (*bench_cmd) cmd_benchmark_circle(o);
    else if (*cal_cmd) cmd_calibrate(o);
    else if (*list_cmd) cmd_list();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const SimulationFailed& e) {
    std::fprintf(stderr, "simulation failed: %s\nfailure record: %s\n", e.what(), e.record().string().c_str());
    return kSimulation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kOther;
  }
  return kOk;
}
