#include "champ/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "champ/errors.hpp"

namespace champ {

namespace {

constexpr double kStraightLengthM = 400.0;
constexpr double kTurnApproachM = 100.0;
constexpr double kTurnRadiusM = 8.0;
constexpr double kTurnExitLegM = 150.0;

// Ground truth uses the unscaled stopping distance (b = 1) with the default
// reaction time and dry, flat road.
constexpr double kTruthReactionS = 1.5;
constexpr double kTruthFriction = 0.7;
constexpr double kTruthGrade = 0.0;

struct LocalPoint {
  double east = 0.0;
  double north = 0.0;
};

// Route in a local east/north frame anchored at the origin, parameterized by
// path length. Every route starts northbound.
class Route {
 public:
  explicit Route(ScenarioKind kind) : kind_(kind) {}

  double length() const {
    if (kind_ == ScenarioKind::kBlindTurn) {
      return kTurnApproachM + arc_length() + kTurnExitLegM;
    }
    return kStraightLengthM;
  }

  double turn_exit() const { return kTurnApproachM + arc_length(); }

  LocalPoint at(double s) const {
    if (kind_ != ScenarioKind::kBlindTurn || s <= kTurnApproachM) {
      return {0.0, s};
    }
    if (s <= turn_exit()) {
      // Right turn about a center kTurnRadiusM east of the turn entry.
      const double phi = (s - kTurnApproachM) / kTurnRadiusM;
      return {kTurnRadiusM - kTurnRadiusM * std::cos(phi),
              kTurnApproachM + kTurnRadiusM * std::sin(phi)};
    }
    return {kTurnRadiusM + (s - turn_exit()), kTurnApproachM + kTurnRadiusM};
  }

 private:
  static double arc_length() { return kTurnRadiusM * std::numbers::pi / 2.0; }

  ScenarioKind kind_;
};

GeoPoint to_geo(const GeoPoint& origin, const LocalPoint& p) {
  const double dist = std::hypot(p.east, p.north);
  if (dist == 0.0) return origin;
  return destination_point(
      origin, BearingDeg::normalized(rad_to_deg(std::atan2(p.east, p.north))),
      dist);
}

// Portable standard normal draws: mt19937_64 and seed_seq are fully specified
// by the standard, std::normal_distribution is not.
class Gaussian {
 public:
  Gaussian(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    rng_.seed(seq);
  }

  double next() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  double uniform() {
    return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 rng_;
  std::optional<double> spare_;
};

std::uint64_t draw(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

double median_fix_time(std::int64_t second, double gps_hz) {
  std::vector<double> times;
  const auto first = static_cast<std::int64_t>(
      std::ceil(static_cast<double>(second) * gps_hz - 1e-9));
  for (std::int64_t i = first;; ++i) {
    const double t = static_cast<double>(i) / gps_hz;
    if (t >= static_cast<double>(second + 1)) break;
    if (t >= static_cast<double>(second)) times.push_back(t);
  }
  const std::size_t n = times.size();
  if (n == 0) return static_cast<double>(second) + 0.5;
  return n % 2 == 1 ? times[n / 2] : (times[n / 2 - 1] + times[n / 2]) / 2.0;
}

DriveLog drive(const ScenarioSpec& spec, const Route& route, double start_m,
               std::string clip_id, std::uint64_t stream) {
  DriveLog log;
  log.clip_id = std::move(clip_id);
  const double v_ms = spec.speed_kmh / 3.6;
  const double duration = (route.length() - start_m) / v_ms;
  Gaussian noise(spec.seed, stream);
  for (std::int64_t i = 0;; ++i) {
    const double t = static_cast<double>(i) / spec.gps_hz;
    if (t > duration) break;
    LocalPoint p = route.at(start_m + v_ms * t);
    if (spec.noise_m > 0.0) {
      p.east += spec.noise_m * noise.next();
      p.north += spec.noise_m * noise.next();
    }
    log.fixes.push_back({t, to_geo(spec.origin, p), spec.speed_kmh});
  }
  return log;
}

std::string_view window_label(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kStraightPass:
      return "nighttime";
    case ScenarioKind::kBlindTurn:
      return "blind-turn";
    case ScenarioKind::kOcclusion:
      return "occlusion";
  }
  return "";
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kStraightPass:
      return "straight-pass";
    case ScenarioKind::kBlindTurn:
      return "blind-turn";
    case ScenarioKind::kOcclusion:
      return "occlusion";
  }
  return "";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view name) {
  if (name == "straight-pass") return ScenarioKind::kStraightPass;
  if (name == "blind-turn") return ScenarioKind::kBlindTurn;
  if (name == "occlusion") return ScenarioKind::kOcclusion;
  return std::nullopt;
}

void ScenarioSpec::validate() const {
  if (!(gps_hz >= 1.0)) throw InvalidParams("gps_hz must be >= 1");
  if (!(speed_kmh > 0.0)) throw InvalidParams("speed_kmh must be > 0");
  if (!(noise_m >= 0.0)) throw InvalidParams("noise_m must be >= 0");
  if (train_drives < 1) throw InvalidParams("train_drives must be >= 1");
  if (!(detection_fps > 0.0)) throw InvalidParams("detection_fps must be > 0");
  if (!is_valid(origin)) throw InvalidParams("origin out of range");
  const Route route(kind);
  if (!(test_start_offset_m >= 0.0 && test_start_offset_m < route.length())) {
    throw InvalidParams("test start offset outside the route");
  }
  const double duration = route.length() / (speed_kmh / 3.6);
  for (std::int64_t k : ped_seconds) {
    if (k < 0 || static_cast<double>(k) + 1.0 > duration) {
      throw InvalidParams("pedestrian second " + std::to_string(k) +
                          " outside the training drive");
    }
  }
}

ScenarioSpec default_scenario(ScenarioKind kind, std::uint64_t seed,
                              double noise_m) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  std::mt19937_64 rng(seq);

  ScenarioSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  spec.noise_m = noise_m;
  switch (kind) {
    case ScenarioKind::kStraightPass:
      spec.speed_kmh = 40.0;
      spec.ped_seconds = {static_cast<std::int64_t>(draw(rng, 10, 25))};
      break;
    case ScenarioKind::kOcclusion: {
      spec.speed_kmh = 30.0;
      const auto first = static_cast<std::int64_t>(draw(rng, 8, 16));
      spec.ped_seconds = {first,
                          first + static_cast<std::int64_t>(draw(rng, 16, 24))};
      break;
    }
    case ScenarioKind::kBlindTurn: {
      spec.speed_kmh = 30.0;
      // First whole second after the vehicle leaves the arc.
      const double exit_t = Route(kind).turn_exit() / (spec.speed_kmh / 3.6);
      spec.ped_seconds = {static_cast<std::int64_t>(std::ceil(exit_t))};
      break;
    }
  }
  // Up to 4 m, in 1 cm steps, so decision points land at varying phases.
  spec.test_start_offset_m = static_cast<double>(draw(rng, 0, 399)) / 100.0;
  return spec;
}

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  const Route route(spec.kind);
  const double v_ms = spec.speed_kmh / 3.6;
  const std::string prefix =
      std::string(to_string(spec.kind)) + "_s" + std::to_string(spec.seed);

  std::vector<std::int64_t> seconds = spec.ped_seconds;
  std::sort(seconds.begin(), seconds.end());
  seconds.erase(std::unique(seconds.begin(), seconds.end()), seconds.end());

  Scenario out;
  std::vector<double> site_path;
  for (std::int64_t k : seconds) {
    const double s = v_ms * median_fix_time(k, spec.gps_hz);
    site_path.push_back(s);
    out.pedestrian_sites.push_back(to_geo(spec.origin, route.at(s)));
  }

  std::seed_seq count_seq{static_cast<std::uint32_t>(spec.seed),
                          static_cast<std::uint32_t>(spec.seed >> 32), 0xc0u};
  std::mt19937_64 count_rng(count_seq);
  std::vector<std::int64_t> counts;
  for (std::size_t i = 0; i < seconds.size(); ++i) {
    counts.push_back(static_cast<std::int64_t>(draw(count_rng, 1, 3)));
  }

  for (int d = 0; d < spec.train_drives; ++d) {
    DriveLog log = drive(spec, route, 0.0, prefix + "_train" + std::to_string(d),
                         static_cast<std::uint64_t>(d) + 1);
    const double end_t = log.fixes.back().t;
    for (std::int64_t j = 0;; ++j) {
      const double t = static_cast<double>(j) / spec.detection_fps;
      if (t > end_t) break;
      std::int64_t count = 0;
      for (std::size_t i = 0; i < seconds.size(); ++i) {
        // Occluded sites are visible to one training drive only.
        const bool visible =
            spec.kind != ScenarioKind::kOcclusion ||
            static_cast<int>(i % static_cast<std::size_t>(spec.train_drives)) ==
                d;
        if (visible && std::floor(t) == static_cast<double>(seconds[i])) {
          count = counts[i];
        }
      }
      log.detections.push_back({t, count});
    }
    out.train_logs.push_back(std::move(log));
  }

  out.test_log = drive(spec, route, spec.test_start_offset_m, prefix + "_test", 0);

  // Truth: from when the remaining path distance to a site drops below the
  // unscaled stopping distance until the vehicle reaches the site.
  const double v = spec.speed_kmh;
  const double truth_stop = ((0.278 * kTruthReactionS * v) + v * v) /
                            (254.0 * (kTruthFriction + kTruthGrade));
  const double test_end = out.test_log.fixes.back().t;
  out.ground_truth.clip_id = out.test_log.clip_id;
  const std::string label(window_label(spec.kind));
  for (double site : site_path) {
    const double t_start =
        std::max(0.0, (site - truth_stop - spec.test_start_offset_m) / v_ms);
    const double t_end =
        std::min(test_end, (site - spec.test_start_offset_m) / v_ms);
    if (!(t_start < t_end)) continue;
    auto& windows = out.ground_truth.windows;
    if (!windows.empty() && t_start <= windows.back().t_end) {
      windows.back().t_end = std::max(windows.back().t_end, t_end);
    } else {
      windows.push_back({t_start, t_end, label});
    }
  }
  return out;
}

}  // namespace champ
