#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "champ/advisory.hpp"
#include "json.hpp"

namespace champ {

// Interval during which an advisory should have been active.
struct GroundTruthWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  std::string label;

  friend bool operator==(const GroundTruthWindow&, const GroundTruthWindow&) =
      default;
};

struct GroundTruth {
  std::string clip_id;
  std::vector<GroundTruthWindow> windows;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct MatchCounts {
  std::int64_t correct = 0;           // episodes overlapping some window
  std::int64_t false_advisories = 0;  // episodes overlapping no window
  std::int64_t missed = 0;            // windows overlapped by no episode
  std::int64_t covered_windows = 0;   // windows overlapped by some episode

  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct EvalReport {
  std::string clip_id;
  double sampling_distance_m = 0.0;
  double duration_min = 0.0;
  std::string scenario;  // window labels, '+'-joined
  std::int64_t correct = 0;
  std::int64_t false_advisories = 0;
  std::int64_t missed = 0;
  std::int64_t covered_windows = 0;
  double precision = 1.0;
  double recall = 1.0;
};

// Closed-interval overlap in both directions: episodes count as correct or
// false, windows as covered or missed. Independent of input order.
MatchCounts match_episodes(std::span<const AdvisoryEpisode> episodes,
                           std::span<const GroundTruthWindow> windows);

// correct / (correct + false); 1.0 when nothing was issued.
double precision(std::int64_t correct, std::int64_t false_advisories);
// covered / (covered + missed); 1.0 when there was nothing to cover.
double recall(std::int64_t covered_windows, std::int64_t missed);

// Throws ClipMismatch when the clip ids differ.
EvalReport evaluate_run(const ReplayResult& advisories,
                        const GroundTruth& truth);

// Pools counts across clips before computing the ratios (micro-average).
EvalReport aggregate(std::span<const EvalReport> reports);

std::string save_ground_truth(const GroundTruth& truth);
// Throws FormatError on corrupt input or windows with t_start >= t_end.
GroundTruth load_ground_truth(std::string_view bytes);

nlohmann::ordered_json report_to_json(const EvalReport& report);
// Table-style rows: clip, duration, scenario, sampling distance, precision,
// recall.
std::string reports_to_csv(std::span<const EvalReport> reports);

}  // namespace champ
