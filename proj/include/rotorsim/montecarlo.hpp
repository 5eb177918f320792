#pragma once

#include "rotorsim/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace rotorsim {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Randomized study: every trial draws vehicle mass, drag coefficients and
/// mean wind uniformly from the ranges below and flies `base` with them.
struct MonteCarloSpec {
  ScenarioConfig base;
  int trials = 50;
  std::uint64_t seed = 0;
  Range mass{0.375, 0.9375};
  Range parasitic_xy{0.0, 1e-3};
  Range parasitic_z{0.0, 2e-2};
  Range k_d{0.0, 1.19e-3};
  Range k_z{0.0, 2.32e-3};
  Range wind_speed{0.0, 5.0};  // horizontal, direction uniform
  double success_rmse = 0.5;   // m/s
  double reference_airspeed = 2.5;  // m/s, used by drag_score

  void validate() const;
};

struct TrialResult {
  int index = 0;
  std::uint64_t seed = 0;
  double mass = 0.0;
  Vec3 parasitic = Vec3::Zero();
  double k_d = 0.0;
  double k_z = 0.0;
  Vec3 wind_mean = Vec3::Zero();
  double drag_score = 0.0;
  bool ok = false;
  std::string failure;
  double wind_rmse = 0.0;
  double position_rmse = 0.0;
  Vec3 drag_hat = Vec3::Zero();
  bool calibration_warning = false;
  long saturated_ticks = 0;

  bool success(double threshold) const { return ok && wind_rmse <= threshold; }
  bool operator==(const TrialResult&) const = default;
};

/// Horizontal drag sensitivity d(accel)/d(airspeed) at hover with the given
/// coefficients: (n k_d eta_hover + 2 c_xy V_ref) / m, with c_xy the mean of
/// the x/y parasitic coefficients.
double drag_score(const VehicleParams& p, double reference_airspeed);

/// Scenario for trial `i`; depends only on (spec, i).
ScenarioConfig trial_config(const MonteCarloSpec& spec, int i);
TrialResult run_trial(const MonteCarloSpec& spec, int i);

/// Reference implementation: trials in index order on the calling thread.
std::vector<TrialResult> run_montecarlo_serial(const MonteCarloSpec& spec);
/// OpenMP over trials. Output is identical to the serial version.
std::vector<TrialResult> run_montecarlo_parallel(const MonteCarloSpec& spec, int threads = 0);

struct MonteCarloSummary {
  int trials = 0;
  int completed = 0;
  int successes = 0;
  double success_fraction = 0.0;
  double median_rmse = 0.0;
  std::vector<int> low_drag;   // trial indices in the lowest decile of drag_score
  std::vector<int> high_drag;  // highest decile
  double low_drag_median_rmse = 0.0;
  double high_drag_median_rmse = 0.0;
  double decile_p_value = 1.0;  // one-sided: low-drag RMSE > high-drag RMSE
};

/// Failed trials count as unsuccessful and enter the rank test with
/// infinite RMSE.
MonteCarloSummary summarize(const MonteCarloSpec& spec, const std::vector<TrialResult>& trials);

/// Scenario document plus a top-level "montecarlo" block.
MonteCarloSpec parse_montecarlo(const std::string& text);
MonteCarloSpec load_montecarlo(const std::filesystem::path& path);

nlohmann::json summary_to_json(const MonteCarloSpec& spec, const MonteCarloSummary& s);

/// Writes `trials.csv` and `summary.json` into `dir`.
void write_montecarlo(const MonteCarloSpec& spec, const std::vector<TrialResult>& trials,
                      const MonteCarloSummary& summary, const std::filesystem::path& dir);

}  // namespace rotorsim
