#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "champ/geodesy.hpp"

namespace champ {

// Largest allowed time gap between consecutive GPS fixes, seconds.
inline constexpr double kMaxFixGapS = 5.0;

struct GpsFix {
  double t = 0.0;  // seconds since clip start
  GeoPoint pos;
  std::optional<double> speed_kmh;

  friend bool operator==(const GpsFix&, const GpsFix&) = default;
};

struct DetectionFrame {
  double t = 0.0;
  std::int64_t ped_count = 0;

  friend bool operator==(const DetectionFrame&, const DetectionFrame&) =
      default;
};

struct DriveLog {
  std::string clip_id;
  std::vector<GpsFix> fixes;
  std::vector<DetectionFrame> detections;

  friend bool operator==(const DriveLog&, const DriveLog&) = default;
};

// One-second association window [k, k+1) and everything that fell in it.
struct AssociationInterval {
  std::int64_t k = 0;
  std::vector<GpsFix> fixes_in_interval;
  std::int64_t ped_count = 0;  // max per-frame count inside the window

  bool empty() const { return fixes_in_interval.empty(); }
};

enum class LogFormat { kCsv, kJsonl };

// Throws ValidationError describing the first violated invariant.
void validate(const DriveLog& log);

// Parses a drive log, sorts rows by time and validates the result.
// Throws ParseError for malformed rows and ValidationError for invariant
// breaches (range, duplicate timestamps, fix gaps above kMaxFixGapS).
DriveLog parse_drive_log(std::string_view content, LogFormat format,
                         std::string clip_id);

// Format from the extension (.csv / .jsonl), clip id from the file stem.
DriveLog load_drive_log(const std::filesystem::path& path);

std::string to_jsonl(const DriveLog& log);
std::string to_csv(const DriveLog& log);

std::vector<AssociationInterval> split_intervals(const DriveLog& log);

// Vehicle speed at time `t`. Uses the recorded speed of the latest fix at or
// before `t` when present; otherwise distance over time between the two fixes
// bracketing `t`. Throws OutOfRange outside [first fix, last fix] and
// ValidationError when the log has fewer than two fixes.
double estimate_speed_kmh(const DriveLog& log, double t);

}  // namespace champ
