#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "champ/drive_log.hpp"
#include "champ/evaluation.hpp"
#include "champ/geodesy.hpp"

namespace champ {

// Route families. kStraightPass doubles as the nighttime case: the geometry is
// the same, only the (absent) detector differs, so its windows are labeled
// "nighttime".
enum class ScenarioKind { kStraightPass, kBlindTurn, kOcclusion };

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view name);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kStraightPass;
  std::uint64_t seed = 0;
  GeoPoint origin{32.8801, -117.2340};
  double speed_kmh = 40.0;
  double gps_hz = 10.0;
  // Seconds of the training drives during which pedestrians were seen.
  std::vector<std::int64_t> ped_seconds;
  double noise_m = 0.0;  // GPS jitter standard deviation per axis
  int train_drives = 2;
  double detection_fps = 30.0;
  // Path offset at which the test drive starts, meters.
  double test_start_offset_m = 0.0;

  // Throws InvalidParams.
  void validate() const;
};

// Seeded defaults per kind: speed, pedestrian seconds and test start offset.
ScenarioSpec default_scenario(ScenarioKind kind, std::uint64_t seed,
                              double noise_m = 0.0);

struct Scenario {
  std::vector<DriveLog> train_logs;
  DriveLog test_log;  // carries no detections
  GroundTruth ground_truth;
  // Noise-free ego position at each pedestrian second's median fix time.
  std::vector<GeoPoint> pedestrian_sites;
};

// Deterministic in `spec` (including seed) on every platform.
Scenario generate(const ScenarioSpec& spec);

}  // namespace champ
