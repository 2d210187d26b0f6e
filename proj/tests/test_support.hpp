#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "champ/advisory.hpp"
#include "champ/drive_log.hpp"
#include "champ/evaluation.hpp"
#include "champ/geodesy.hpp"
#include "champ/hotspot_map.hpp"
#include "champ/scenario.hpp"

namespace champ::testing {

inline GeoPoint random_point(std::mt19937_64& rng, double max_abs_lat = 90.0) {
  std::uniform_real_distribution<double> lat(-max_abs_lat, max_abs_lat);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  return {lat(rng), lon(rng)};
}

// Uniform point within roughly `half_span_m` of `center` (local box).
inline GeoPoint random_nearby(std::mt19937_64& rng, const GeoPoint& center,
                              double half_span_m) {
  std::uniform_real_distribution<double> u(-half_span_m, half_span_m);
  const double m_per_deg = kEarthRadiusM * deg_to_rad(1.0);
  return {center.lat_deg + u(rng) / m_per_deg,
          center.lon_deg +
              u(rng) / (m_per_deg * std::cos(deg_to_rad(center.lat_deg)))};
}

// Northbound straight drive: one fix every `spacing_m`, one per `dt_s`.
inline DriveLog straight_drive(const GeoPoint& start, std::size_t fixes,
                               double spacing_m, double dt_s,
                               std::string clip_id = "straight") {
  DriveLog log;
  log.clip_id = std::move(clip_id);
  for (std::size_t i = 0; i < fixes; ++i) {
    log.fixes.push_back(
        {static_cast<double>(i) * dt_s,
         destination_point(start, BearingDeg::normalized(0.0),
                           static_cast<double>(i) * spacing_m),
         std::nullopt});
  }
  return log;
}

// Map from the training drives, replay of the test drive, score.
inline EvalReport run_pipeline(const Scenario& sc,
                               const AdvisoryParams& p = {}) {
  const HotspotMap map = build_map(sc.train_logs, kDefaultClusterRadiusM);
  return evaluate_run(replay(sc.test_log, map, p), sc.ground_truth);
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("champ_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace champ::testing
