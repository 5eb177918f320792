#pragma once

#include "rotorsim/controller.hpp"
#include "rotorsim/dynamics.hpp"
#include "rotorsim/estimator.hpp"
#include "rotorsim/sensors.hpp"
#include "rotorsim/trajectory.hpp"
#include "rotorsim/vehicle.hpp"
#include "rotorsim/wind.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rotorsim {

inline constexpr int kConfigSchemaVersion = 1;

struct EstimatorSettings {
  bool enabled = false;
  EstimatorConfig tuning;
  std::optional<Vec3> drag;     // C_hat; fitted from a calibration flight when absent
  std::optional<double> mass;   // believed mass; defaults to the true mass
  double calibration_duration = 30.0;
  FigureEightSpec calibration_trajectory;
};

/// Everything needed to reproduce one simulation run.
struct ScenarioConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name = "scenario";
  std::string description;
  VehicleParams vehicle = default_quadrotor();
  GainSet gains = default_gains("default");
  TrajectorySpec trajectory = HoverSpec{};
  WindProfile wind = ConstantWind{};
  ImuConfig imu;
  MocapConfig mocap;
  EstimatorSettings estimator;
  double duration = 10.0;
  std::uint64_t seed = 0;
  double control_rate_hz = 500.0;
  bool aero_enabled = true;
  IntegratorOptions integrator;
  double rmse_window_start = 5.0;

  /// Throws ConfigError on the first violated invariant.
  void validate() const;
};

/// Parse a JSON scenario document. Errors carry the offending field and,
/// where it can be located, the line number.
/// `extra_keys` are top-level keys tolerated and ignored (used by wrappers
/// that embed a scenario in a larger document).
ScenarioConfig parse_scenario(const std::string& text, const std::vector<std::string>& extra_keys = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Line of the first occurrence of the field's last path component, or -1.
int locate_field_line(const std::string& text, const std::string& field);

/// Canonical JSON echo of a configuration (all resolved values).
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

/// Hash of the canonical echo; identifies the configuration in artifacts.
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace rotorsim
