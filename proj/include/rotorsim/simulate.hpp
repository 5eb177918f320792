#pragma once

#include "rotorsim/estimator.hpp"
#include "rotorsim/results.hpp"
#include "rotorsim/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace rotorsim {

/// Why a run stopped early, with the last state the integrator accepted.
struct FailureRecord {
  std::string reason;
  double time = 0.0;
  VehicleState last_good;
};

struct RunResult {
  ResultsTable table;
  IntegrationStats integration;
  double mass_hat = 0.0;
  Vec3 drag_hat = Vec3::Zero();
  std::optional<CalibrationResult> calibration;
  long skipped_updates = 0;
  long saturated_ticks = 0;
  std::optional<FailureRecord> failure;

  bool ok() const { return !failure.has_value(); }
};

/// Simulate one scenario. Never throws for in-flight failures; those end up
/// in RunResult::failure with the rows recorded so far.
RunResult run(const ScenarioConfig& cfg);

/// The excitation flight used to fit drag coefficients when the scenario
/// does not supply them: figure-eight, still air, estimator off.
ScenarioConfig calibration_scenario(const ScenarioConfig& cfg);

/// Pull the calibration inputs (truth velocity/attitude/wind, commanded
/// thrust, accelerometer) out of a results table. Rows without an IMU
/// sample are skipped.
CalibrationLog calibration_log(const ResultsTable& table);

/// Position tracking and wind estimate RMSE over the scenario window.
struct RunMetrics {
  double position_rmse = 0.0;
  double wind_rmse = 0.0;  // NaN without an estimator
};

RunMetrics run_metrics(const ScenarioConfig& cfg, const RunResult& r);

/// Metadata sidecar describing a results table.
nlohmann::json run_sidecar(const ScenarioConfig& cfg, const RunResult& r);

/// Writes `<stem>.csv` and `<stem>.json` into `dir`; on failure also
/// `<stem>.failure.json`. Returns the path of the failure record if written.
std::optional<std::filesystem::path> write_run(const ScenarioConfig& cfg, const RunResult& r,
                                               const std::filesystem::path& dir, const std::string& stem);

nlohmann::json failure_to_json(const FailureRecord& f);

}  // namespace rotorsim
