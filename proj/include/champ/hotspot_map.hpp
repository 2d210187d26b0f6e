#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "champ/drive_log.hpp"
#include "champ/geodesy.hpp"
#include "json.hpp"

namespace champ {

inline constexpr double kDefaultClusterRadiusM = 5.0;

// Median ego position over one association interval, with the pedestrian
// count seen during that second.
struct MedianSample {
  GeoPoint pos;
  std::int64_t ped_count = 0;

  friend bool operator==(const MedianSample&, const MedianSample&) = default;
};

// A clustered EGO-VEHICLE position at which pedestrians were detected. The
// node does not locate the pedestrians themselves; it marks where a vehicle
// was when it saw them.
struct HotspotNode {
  GeoPoint pos;
  std::int64_t weight = 0;   // total pedestrian sightings folded in
  std::int64_t samples = 0;  // median samples folded in

  friend bool operator==(const HotspotNode&, const HotspotNode&) = default;
};

struct HotspotMap {
  std::vector<HotspotNode> nodes;
  double cluster_radius_m = kDefaultClusterRadiusM;
  std::set<std::string> source_clips;

  std::int64_t total_weight() const;

  friend bool operator==(const HotspotMap&, const HotspotMap&) = default;
};

std::vector<MedianSample> associate(
    std::span<const AssociationInterval> intervals);

// Greedy incremental clustering in input order. A sample within epsilon_m of
// an existing node folds into the nearest such node (lowest index on exact
// ties); the node moves to the weight-weighted mean position. Otherwise the
// sample starts a new node. Nodes come back in creation order.
HotspotMap cluster(std::span<const MedianSample> samples, double epsilon_m);

// associate(split_intervals(log)) over logs in clip_id order, then cluster.
// Nodes come back in canonical order.
HotspotMap build_map(std::span<const DriveLog> logs, double epsilon_m);

// Re-clusters the union of both node sets. Throws RadiusMismatch when the
// maps were built with different radii.
HotspotMap merge_maps(const HotspotMap& a, const HotspotMap& b);

HotspotMap filter_by_weight(const HotspotMap& map, std::int64_t min_weight);

// Sorts nodes by (lat, lon, weight, samples).
void canonicalize(HotspotMap& map);

std::string save_map(const HotspotMap& map);
// Throws FormatError on corrupt input.
HotspotMap load_map(std::string_view bytes);

// FeatureCollection of Point features with weight, samples and a weight band.
nlohmann::ordered_json map_to_geojson(const HotspotMap& map);

}  // namespace champ
