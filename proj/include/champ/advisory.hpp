#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "champ/drive_log.hpp"
#include "champ/geodesy.hpp"
#include "champ/hotspot_map.hpp"
#include "champ/spatial_index.hpp"
#include "json.hpp"

namespace champ {

// Tunables of the advisory rule. Defaults are the CLI defaults.
struct AdvisoryParams {
  double reaction_time_s = 1.5;      // t
  double friction = 0.7;             // f, dry road
  double grade = 0.0;                // G, flat road
  double offset = 1.5;               // b, multiplicative safety factor
  double sampling_distance_m = 2.0;  // K
  double fov_half_angle_deg = 90.0;  // theta bound
  std::int64_t min_weight = 1;       // hotspot weight threshold

  // Throws InvalidParams naming the first violated constraint.
  void validate() const;

  friend bool operator==(const AdvisoryParams&, const AdvisoryParams&) =
      default;
};

struct SamplePoint {
  double t = 0.0;
  GeoPoint pos;
  std::optional<BearingDeg> heading;  // absent until the vehicle first moves
};

struct AdvisorySample {
  double t = 0.0;
  GeoPoint pos;
  double speed_kmh = 0.0;
  double stopping_distance_m = 0.0;
  std::optional<NearestResult> nearest;
  std::optional<double> heading_angle_deg;
  bool active = false;

  friend bool operator==(const AdvisorySample&, const AdvisorySample&) =
      default;
};

struct AdvisoryEpisode {
  double t_start = 0.0;
  double t_end = 0.0;
  std::int64_t sample_count = 0;

  friend bool operator==(const AdvisoryEpisode&, const AdvisoryEpisode&) =
      default;
};

struct ReplayResult {
  std::string clip_id;
  AdvisoryParams params;
  std::vector<AdvisorySample> samples;
  std::vector<AdvisoryEpisode> episodes;

  friend bool operator==(const ReplayResult&, const ReplayResult&) = default;
};

// Stopping distance in meters:
//   s = b * ((0.278 * t * v) + v^2) / (254 * (f + G)),  v in km/h.
// The reaction term is divided by 254 (f + G) together with v^2.
// Throws InvalidParams when f + G <= 0 or v < 0.
double stopping_distance(double v_kmh, const AdvisoryParams& p);

// Decision points every `sampling_distance_m` of travelled path, always
// including the first fix.
std::vector<SamplePoint> sample_points(const DriveLog& log,
                                       double sampling_distance_m);

// Applies the advisory rule at one decision point against an index built
// over the weight-filtered map.
AdvisorySample evaluate_sample(double t, const GeoPoint& pos,
                               std::optional<BearingDeg> heading, double v_kmh,
                               const SpatialIndex& index,
                               const AdvisoryParams& p);

// Maximal runs of consecutive active samples.
std::vector<AdvisoryEpisode> build_episodes(
    std::span<const AdvisorySample> samples);

// Replays against an index that is already filtered by p.min_weight. Node
// indices in the result refer to that filtered node list.
ReplayResult replay(const DriveLog& log, const SpatialIndex& index,
                    const AdvisoryParams& p);

// Filters `map` by p.min_weight, indexes it, and replays.
ReplayResult replay(const DriveLog& log, const HotspotMap& map,
                    const AdvisoryParams& p);

nlohmann::ordered_json params_to_json(const AdvisoryParams& p);
std::string save_advisories(const ReplayResult& result);
// Throws FormatError on corrupt input.
ReplayResult load_advisories(std::string_view bytes);

// LineString features, one per episode, through the episode's sample points.
nlohmann::ordered_json episode_features(const ReplayResult& result);

}  // namespace champ
