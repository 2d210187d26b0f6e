#include "champ/hotspot_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "champ/errors.hpp"

namespace champ {

namespace {

using json = nlohmann::ordered_json;

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

// Folds one weighted point into `nodes`; shared by cluster and merge.
void fold(std::vector<HotspotNode>& nodes, const GeoPoint& pos,
          std::int64_t weight, std::int64_t samples, double epsilon_m) {
  std::size_t best = nodes.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double d = haversine_distance(nodes[i].pos, pos);
    if (d <= epsilon_m && d < best_d) {
      best = i;
      best_d = d;
    }
  }
  if (best == nodes.size()) {
    nodes.push_back({pos, weight, samples});
    return;
  }
  HotspotNode& node = nodes[best];
  const auto total = static_cast<double>(node.weight + weight);
  const auto w_old = static_cast<double>(node.weight);
  const auto w_new = static_cast<double>(weight);
  node.pos.lat_deg = (node.pos.lat_deg * w_old + pos.lat_deg * w_new) / total;
  node.pos.lon_deg = (node.pos.lon_deg * w_old + pos.lon_deg * w_new) / total;
  node.weight += weight;
  node.samples += samples;
}

void require_radius(double epsilon_m) {
  if (!(epsilon_m > 0.0) || !std::isfinite(epsilon_m)) {
    throw InvalidParams("cluster radius must be a positive finite number");
  }
}

const char* weight_band(std::int64_t weight) {
  if (weight >= 5) return "high";
  if (weight >= 2) return "medium";
  return "low";
}

const char* band_color(std::string_view band) {
  if (band == "high") return "#d62728";
  if (band == "medium") return "#ff7f0e";
  return "#2ca02c";
}

template <typename T>
T require_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw FormatError(std::string("map file: missing '") + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("map file: bad type for '") + key + "'");
  }
}

}  // namespace

std::int64_t HotspotMap::total_weight() const {
  std::int64_t total = 0;
  for (const HotspotNode& node : nodes) total += node.weight;
  return total;
}

std::vector<MedianSample> associate(
    std::span<const AssociationInterval> intervals) {
  std::vector<MedianSample> out;
  for (const AssociationInterval& interval : intervals) {
    if (interval.empty() || interval.ped_count < 1) continue;
    std::vector<double> lats;
    std::vector<double> lons;
    lats.reserve(interval.fixes_in_interval.size());
    lons.reserve(interval.fixes_in_interval.size());
    for (const GpsFix& fix : interval.fixes_in_interval) {
      lats.push_back(fix.pos.lat_deg);
      lons.push_back(fix.pos.lon_deg);
    }
    out.push_back({{median(std::move(lats)), median(std::move(lons))},
                   interval.ped_count});
  }
  return out;
}

HotspotMap cluster(std::span<const MedianSample> samples, double epsilon_m) {
  require_radius(epsilon_m);
  HotspotMap map;
  map.cluster_radius_m = epsilon_m;
  for (const MedianSample& sample : samples) {
    fold(map.nodes, sample.pos, sample.ped_count, 1, epsilon_m);
  }
  return map;
}

HotspotMap build_map(std::span<const DriveLog> logs, double epsilon_m) {
  std::vector<const DriveLog*> ordered;
  ordered.reserve(logs.size());
  for (const DriveLog& log : logs) ordered.push_back(&log);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const DriveLog* a, const DriveLog* b) {
                     return a->clip_id < b->clip_id;
                   });

  std::vector<MedianSample> samples;
  std::set<std::string> clips;
  for (const DriveLog* log : ordered) {
    const auto intervals = split_intervals(*log);
    const auto clip_samples = associate(intervals);
    samples.insert(samples.end(), clip_samples.begin(), clip_samples.end());
    clips.insert(log->clip_id);
  }

  HotspotMap map = cluster(samples, epsilon_m);
  map.source_clips = std::move(clips);
  canonicalize(map);
  return map;
}

HotspotMap merge_maps(const HotspotMap& a, const HotspotMap& b) {
  if (a.cluster_radius_m != b.cluster_radius_m) {
    throw RadiusMismatch("cannot merge maps with cluster radii " +
                         std::to_string(a.cluster_radius_m) + " and " +
                         std::to_string(b.cluster_radius_m));
  }
  std::vector<HotspotNode> pool = a.nodes;
  pool.insert(pool.end(), b.nodes.begin(), b.nodes.end());
  std::sort(pool.begin(), pool.end(),
            [](const HotspotNode& x, const HotspotNode& y) {
              return std::tie(x.pos.lat_deg, x.pos.lon_deg, x.weight) <
                     std::tie(y.pos.lat_deg, y.pos.lon_deg, y.weight);
            });

  HotspotMap merged;
  merged.cluster_radius_m = a.cluster_radius_m;
  for (const HotspotNode& node : pool) {
    fold(merged.nodes, node.pos, node.weight, node.samples,
         merged.cluster_radius_m);
  }
  merged.source_clips = a.source_clips;
  merged.source_clips.insert(b.source_clips.begin(), b.source_clips.end());
  canonicalize(merged);
  return merged;
}

HotspotMap filter_by_weight(const HotspotMap& map, std::int64_t min_weight) {
  if (min_weight < 1) throw InvalidParams("min_weight must be >= 1");
  HotspotMap out;
  out.cluster_radius_m = map.cluster_radius_m;
  out.source_clips = map.source_clips;
  std::copy_if(map.nodes.begin(), map.nodes.end(),
               std::back_inserter(out.nodes),
               [&](const HotspotNode& n) { return n.weight >= min_weight; });
  return out;
}

void canonicalize(HotspotMap& map) {
  std::sort(map.nodes.begin(), map.nodes.end(),
            [](const HotspotNode& x, const HotspotNode& y) {
              return std::tie(x.pos.lat_deg, x.pos.lon_deg, x.weight,
                              x.samples) < std::tie(y.pos.lat_deg,
                                                    y.pos.lon_deg, y.weight,
                                                    y.samples);
            });
}

std::string save_map(const HotspotMap& map) {
  HotspotMap sorted = map;
  canonicalize(sorted);

  json doc;
  doc["cluster_radius_m"] = sorted.cluster_radius_m;
  doc["source_clips"] = json::array();
  for (const std::string& clip : sorted.source_clips) {
    doc["source_clips"].push_back(clip);
  }
  doc["nodes"] = json::array();
  for (const HotspotNode& node : sorted.nodes) {
    json entry;
    entry["lat"] = node.pos.lat_deg;
    entry["lon"] = node.pos.lon_deg;
    entry["weight"] = node.weight;
    entry["samples"] = node.samples;
    doc["nodes"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

HotspotMap load_map(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("map file: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("map file: top level is not an object");

  HotspotMap map;
  map.cluster_radius_m = require_field<double>(doc, "cluster_radius_m");
  if (!(map.cluster_radius_m > 0.0)) {
    throw FormatError("map file: cluster_radius_m must be positive");
  }
  for (const auto& clip :
       require_field<std::vector<std::string>>(doc, "source_clips")) {
    map.source_clips.insert(clip);
  }
  const auto nodes = doc.find("nodes");
  if (nodes == doc.end() || !nodes->is_array()) {
    throw FormatError("map file: missing 'nodes' array");
  }
  for (const json& entry : *nodes) {
    if (!entry.is_object()) throw FormatError("map file: node is not an object");
    HotspotNode node;
    node.pos.lat_deg = require_field<double>(entry, "lat");
    node.pos.lon_deg = require_field<double>(entry, "lon");
    node.weight = require_field<std::int64_t>(entry, "weight");
    node.samples = require_field<std::int64_t>(entry, "samples");
    if (!is_valid(node.pos)) throw FormatError("map file: node out of range");
    if (node.weight < 1 || node.samples < 1) {
      throw FormatError("map file: node weight and samples must be >= 1");
    }
    map.nodes.push_back(node);
  }
  return map;
}

json map_to_geojson(const HotspotMap& map) {
  json collection;
  collection["type"] = "FeatureCollection";
  collection["features"] = json::array();
  for (std::size_t i = 0; i < map.nodes.size(); ++i) {
    const HotspotNode& node = map.nodes[i];
    const std::string band = weight_band(node.weight);
    json feature;
    feature["type"] = "Feature";
    feature["geometry"] = {{"type", "Point"},
                           {"coordinates", {node.pos.lon_deg, node.pos.lat_deg}}};
    feature["properties"] = {{"kind", "hotspot"},
                             {"node_index", i},
                             {"weight", node.weight},
                             {"samples", node.samples},
                             {"band", band},
                             {"marker-color", band_color(band)}};
    collection["features"].push_back(std::move(feature));
  }
  return collection;
}

}  // namespace champ
