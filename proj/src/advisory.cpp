#include "champ/advisory.hpp"

#include <cmath>

#include "champ/errors.hpp"

namespace champ {

namespace {

using json = nlohmann::ordered_json;

// Path-length comparisons against K tolerate this much rounding, so fixes laid
// out exactly K meters apart are not skipped by a last-bit shortfall.
constexpr double kPathToleranceM = 1e-6;

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

double number_field(const json& obj, const char* key, const char* where) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw FormatError(std::string(where) + ": missing or non-numeric '" + key +
                      "'");
  }
  return it->get<double>();
}

std::optional<double> nullable_number(const json& obj, const char* key,
                                      const char* where) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw FormatError(std::string(where) + ": non-numeric '" + key + "'");
  }
  return it->get<double>();
}

}  // namespace

void AdvisoryParams::validate() const {
  if (!(reaction_time_s >= 0.0)) {
    throw InvalidParams("reaction time t must be >= 0");
  }
  if (!(friction + grade > 0.0)) {
    throw InvalidParams("friction plus grade (f + G) must be > 0");
  }
  if (!(offset >= 1.0)) throw InvalidParams("offset b must be >= 1");
  if (!(sampling_distance_m > 0.0)) {
    throw InvalidParams("sampling distance K must be > 0");
  }
  if (!(fov_half_angle_deg > 0.0 && fov_half_angle_deg <= 180.0)) {
    throw InvalidParams("field-of-view half angle must be in (0, 180]");
  }
  if (min_weight < 1) throw InvalidParams("min_weight must be >= 1");
}

double stopping_distance(double v_kmh, const AdvisoryParams& p) {
  const double f_plus_g = p.friction + p.grade;
  if (!(f_plus_g > 0.0)) {
    throw InvalidParams("friction plus grade (f + G) must be > 0");
  }
  if (!(v_kmh >= 0.0)) throw InvalidParams("speed must be >= 0");
  return p.offset * ((0.278 * p.reaction_time_s * v_kmh) + v_kmh * v_kmh) /
         (254.0 * f_plus_g);
}

std::vector<SamplePoint> sample_points(const DriveLog& log,
                                       double sampling_distance_m) {
  if (!(sampling_distance_m > 0.0)) {
    throw InvalidParams("sampling distance K must be > 0");
  }
  std::vector<SamplePoint> out;
  std::optional<BearingDeg> heading;
  double travelled = 0.0;
  for (std::size_t i = 0; i < log.fixes.size(); ++i) {
    const GpsFix& fix = log.fixes[i];
    if (i > 0) {
      const GpsFix& prev = log.fixes[i - 1];
      travelled += haversine_distance(prev.pos, fix.pos);
      if (prev.pos != fix.pos) heading = initial_bearing(prev.pos, fix.pos);
    }
    if (i == 0 || travelled >= sampling_distance_m - kPathToleranceM) {
      out.push_back({fix.t, fix.pos, heading});
      travelled = 0.0;
    }
  }
  return out;
}

AdvisorySample evaluate_sample(double t, const GeoPoint& pos,
                               std::optional<BearingDeg> heading, double v_kmh,
                               const SpatialIndex& index,
                               const AdvisoryParams& p) {
  AdvisorySample sample;
  sample.t = t;
  sample.pos = pos;
  sample.speed_kmh = v_kmh;
  sample.stopping_distance_m = stopping_distance(v_kmh, p);
  if (index.empty()) return sample;

  const NearestResult nearest = index.nearest(pos);
  sample.nearest = nearest;
  const GeoPoint& target = index.points()[nearest.node_index];
  // Unknown heading, or a hotspot exactly underfoot, passes the FOV test.
  if (heading && target != pos) {
    sample.heading_angle_deg =
        heading_angle(*heading, initial_bearing(pos, target));
  }
  const bool in_view = !sample.heading_angle_deg ||
                       *sample.heading_angle_deg < p.fov_half_angle_deg;
  sample.active = nearest.distance_m < sample.stopping_distance_m && in_view;
  return sample;
}

std::vector<AdvisoryEpisode> build_episodes(
    std::span<const AdvisorySample> samples) {
  std::vector<AdvisoryEpisode> episodes;
  bool open = false;
  for (const AdvisorySample& s : samples) {
    if (!s.active) {
      open = false;
      continue;
    }
    if (!open) {
      episodes.push_back({s.t, s.t, 0});
      open = true;
    }
    episodes.back().t_end = s.t;
    ++episodes.back().sample_count;
  }
  return episodes;
}

ReplayResult replay(const DriveLog& log, const SpatialIndex& index,
                    const AdvisoryParams& p) {
  p.validate();
  if (log.fixes.empty()) throw ValidationError("drive log has no GPS fixes");

  ReplayResult result;
  result.clip_id = log.clip_id;
  result.params = p;
  for (const SamplePoint& point : sample_points(log, p.sampling_distance_m)) {
    const double v = log.fixes.size() >= 2
                         ? estimate_speed_kmh(log, point.t)
                         : log.fixes.front().speed_kmh.value_or(0.0);
    result.samples.push_back(
        evaluate_sample(point.t, point.pos, point.heading, v, index, p));
  }
  result.episodes = build_episodes(result.samples);
  return result;
}

ReplayResult replay(const DriveLog& log, const HotspotMap& map,
                    const AdvisoryParams& p) {
  p.validate();
  const SpatialIndex index = build_index(filter_by_weight(map, p.min_weight));
  return replay(log, index, p);
}

json params_to_json(const AdvisoryParams& p) {
  json out;
  out["reaction_time_s"] = p.reaction_time_s;
  out["friction"] = p.friction;
  out["grade"] = p.grade;
  out["offset"] = p.offset;
  out["sampling_distance_m"] = p.sampling_distance_m;
  out["fov_half_angle_deg"] = p.fov_half_angle_deg;
  out["min_weight"] = p.min_weight;
  return out;
}

std::string save_advisories(const ReplayResult& result) {
  json doc;
  doc["clip_id"] = result.clip_id;
  doc["params"] = params_to_json(result.params);
  doc["samples"] = json::array();
  for (const AdvisorySample& s : result.samples) {
    json row;
    row["t"] = s.t;
    row["lat"] = s.pos.lat_deg;
    row["lon"] = s.pos.lon_deg;
    row["v_kmh"] = s.speed_kmh;
    row["s_m"] = s.stopping_distance_m;
    row["d_m"] = s.nearest ? json(s.nearest->distance_m) : json(nullptr);
    row["node"] = s.nearest ? json(s.nearest->node_index) : json(nullptr);
    row["theta_deg"] = optional_number(s.heading_angle_deg);
    row["active"] = s.active;
    doc["samples"].push_back(std::move(row));
  }
  doc["episodes"] = json::array();
  for (const AdvisoryEpisode& e : result.episodes) {
    doc["episodes"].push_back(
        {{"t_start", e.t_start}, {"t_end", e.t_end},
         {"sample_count", e.sample_count}});
  }
  return doc.dump(1) + "\n";
}

ReplayResult load_advisories(std::string_view bytes) {
  constexpr const char* kWhere = "advisory file";
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(kWhere) + ": " + e.what());
  }
  if (!doc.is_object()) throw FormatError("advisory file: not an object");

  ReplayResult result;
  const auto clip = doc.find("clip_id");
  if (clip == doc.end() || !clip->is_string()) {
    throw FormatError("advisory file: missing 'clip_id'");
  }
  result.clip_id = clip->get<std::string>();

  const auto params = doc.find("params");
  if (params != doc.end() && params->is_object()) {
    AdvisoryParams& p = result.params;
    p.reaction_time_s = number_field(*params, "reaction_time_s", kWhere);
    p.friction = number_field(*params, "friction", kWhere);
    p.grade = number_field(*params, "grade", kWhere);
    p.offset = number_field(*params, "offset", kWhere);
    p.sampling_distance_m = number_field(*params, "sampling_distance_m", kWhere);
    p.fov_half_angle_deg = number_field(*params, "fov_half_angle_deg", kWhere);
    p.min_weight =
        static_cast<std::int64_t>(number_field(*params, "min_weight", kWhere));
  } else {
    throw FormatError("advisory file: missing 'params'");
  }

  const auto samples = doc.find("samples");
  if (samples == doc.end() || !samples->is_array()) {
    throw FormatError("advisory file: missing 'samples' array");
  }
  for (const json& row : *samples) {
    if (!row.is_object()) throw FormatError("advisory file: bad sample");
    AdvisorySample s;
    s.t = number_field(row, "t", kWhere);
    s.pos = {number_field(row, "lat", kWhere), number_field(row, "lon", kWhere)};
    s.speed_kmh = number_field(row, "v_kmh", kWhere);
    s.stopping_distance_m = number_field(row, "s_m", kWhere);
    const auto d = nullable_number(row, "d_m", kWhere);
    if (d) {
      const auto node = nullable_number(row, "node", kWhere);
      s.nearest = NearestResult{
          node ? static_cast<std::size_t>(*node) : std::size_t{0}, *d};
    }
    s.heading_angle_deg = nullable_number(row, "theta_deg", kWhere);
    const auto active = row.find("active");
    if (active == row.end() || !active->is_boolean()) {
      throw FormatError("advisory file: missing 'active'");
    }
    s.active = active->get<bool>();
    result.samples.push_back(s);
  }

  const auto episodes = doc.find("episodes");
  if (episodes == doc.end() || !episodes->is_array()) {
    throw FormatError("advisory file: missing 'episodes' array");
  }
  for (const json& row : *episodes) {
    if (!row.is_object()) throw FormatError("advisory file: bad episode");
    AdvisoryEpisode e;
    e.t_start = number_field(row, "t_start", kWhere);
    e.t_end = number_field(row, "t_end", kWhere);
    const auto count = nullable_number(row, "sample_count", kWhere);
    e.sample_count = count ? static_cast<std::int64_t>(*count) : 0;
    if (e.t_start > e.t_end) {
      throw FormatError("advisory file: episode ends before it starts");
    }
    result.episodes.push_back(e);
  }
  return result;
}

json episode_features(const ReplayResult& result) {
  json features = json::array();
  std::size_t episode = 0;
  json coords = json::array();
  auto flush = [&]() {
    if (coords.empty()) return;
    if (coords.size() == 1) coords.push_back(coords.front());
    json feature;
    feature["type"] = "Feature";
    feature["geometry"] = {{"type", "LineString"}, {"coordinates", coords}};
    json props;
    props["kind"] = "advisory_episode";
    props["clip_id"] = result.clip_id;
    if (episode < result.episodes.size()) {
      props["t_start"] = result.episodes[episode].t_start;
      props["t_end"] = result.episodes[episode].t_end;
    }
    props["stroke"] = "#1f77b4";
    feature["properties"] = std::move(props);
    features.push_back(std::move(feature));
    ++episode;
    coords = json::array();
  };
  for (const AdvisorySample& s : result.samples) {
    if (s.active) {
      coords.push_back({s.pos.lon_deg, s.pos.lat_deg});
    } else {
      flush();
    }
  }
  flush();
  return features;
}

}  // namespace champ
