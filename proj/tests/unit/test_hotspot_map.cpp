#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "champ/errors.hpp"
#include "champ/hotspot_map.hpp"
#include "test_support.hpp"

using namespace champ;

namespace {

const GeoPoint kOrigin{32.8801, -117.2340};

GeoPoint north_of(const GeoPoint& p, double meters) {
  return destination_point(p, BearingDeg::normalized(0.0), meters);
}

// Drive north at 10 m/s, 10 Hz, reporting `count` pedestrians during each
// listed second.
DriveLog drive_with_sightings(const std::string& id,
                              const std::vector<std::int64_t>& seconds,
                              std::int64_t count, double duration_s = 60.0) {
  DriveLog log = testing::straight_drive(
      kOrigin, static_cast<std::size_t>(duration_s * 10), 1.0, 0.1, id);
  for (std::int64_t k : seconds) {
    for (int f = 0; f < 30; ++f) {
      log.detections.push_back({static_cast<double>(k) + f / 30.0, count});
    }
  }
  return log;
}

std::vector<MedianSample> random_samples(std::mt19937_64& rng, std::size_t n,
                                         double span_m) {
  std::uniform_int_distribution<int> count(1, 5);
  std::vector<MedianSample> samples;
  for (std::size_t i = 0; i < n; ++i) {
    samples.push_back({testing::random_nearby(rng, kOrigin, span_m), count(rng)});
  }
  return samples;
}

std::int64_t total_count(const std::vector<MedianSample>& samples) {
  std::int64_t total = 0;
  for (const auto& s : samples) total += s.ped_count;
  return total;
}

}  // namespace

TEST_CASE("associate examples") {
  AssociationInterval odd;
  odd.ped_count = 2;
  odd.fixes_in_interval = {{0.0, {1, 10}, {}}, {0.3, {2, 20}, {}},
                           {0.6, {3, 30}, {}}};
  AssociationInterval none = odd;
  none.ped_count = 0;
  AssociationInterval even;
  even.ped_count = 1;
  even.fixes_in_interval = {{0.0, {4, 0}, {}}, {0.2, {1, 0}, {}},
                            {0.4, {3, 0}, {}}, {0.6, {2, 0}, {}}};
  AssociationInterval empty;
  empty.ped_count = 3;

  const std::vector<AssociationInterval> intervals{odd, none, even, empty};
  const auto samples = associate(intervals);
  REQUIRE(samples.size() == 2);
  CHECK(samples[0] == MedianSample{{2, 20}, 2});
  CHECK(samples[1].pos.lat_deg == 2.5);
  CHECK(samples[1].ped_count == 1);
}

TEST_CASE("cluster examples") {
  SUBCASE("close samples merge") {
    const std::vector<MedianSample> s{{kOrigin, 1}, {north_of(kOrigin, 1.0), 2}};
    const HotspotMap map = cluster(s, 5.0);
    REQUIRE(map.nodes.size() == 1);
    CHECK(map.nodes[0].weight == 3);
    CHECK(map.nodes[0].samples == 2);
    // Weighted centroid sits 2/3 of the way toward the heavier sample.
    CHECK(haversine_distance(kOrigin, map.nodes[0].pos) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  }
  SUBCASE("far samples stay apart") {
    const std::vector<MedianSample> s{{kOrigin, 1}, {north_of(kOrigin, 100.0), 1}};
    CHECK(cluster(s, 5.0).nodes.size() == 2);
  }
  SUBCASE("greedy colinear trace") {
    const std::vector<MedianSample> s{{kOrigin, 1},
                                      {north_of(kOrigin, 4.0), 1},
                                      {north_of(kOrigin, 8.0), 1}};
    const HotspotMap map = cluster(s, 5.0);
    REQUIRE(map.nodes.size() == 2);
    CHECK(map.nodes[0].weight == 2);
    CHECK(haversine_distance(kOrigin, map.nodes[0].pos) ==
          doctest::Approx(2.0).epsilon(1e-6));
    CHECK(map.nodes[1].weight == 1);
  }
  SUBCASE("sample within reach of two nodes folds into the nearer") {
    const std::vector<MedianSample> s{{kOrigin, 1},
                                      {north_of(kOrigin, 8.0), 1},
                                      {north_of(kOrigin, 5.0), 1}};
    const HotspotMap map = cluster(s, 5.0);
    REQUIRE(map.nodes.size() == 2);
    CHECK(map.nodes[0].weight == 1);
    CHECK(map.nodes[1].weight == 2);
  }
  SUBCASE("exact distance tie goes to the lower index") {
    const std::vector<MedianSample> s{{kOrigin, 1},
                                      {north_of(kOrigin, 8.0), 1},
                                      {north_of(kOrigin, 4.0), 1}};
    const HotspotMap map = cluster(s, 5.0);
    // The midpoint is 4 m from both only up to rounding; whichever wins,
    // it must be the nearer one or node 0 on a true tie.
    const double d0 = haversine_distance(s[2].pos, s[0].pos);
    const double d1 = haversine_distance(s[2].pos, s[1].pos);
    const std::size_t expected = d1 < d0 ? 1 : 0;
    CHECK(map.nodes[expected].weight == 2);
  }
  CHECK_THROWS_AS(cluster({}, 0.0), InvalidParams);
}

TEST_CASE("cluster folds only within epsilon of the node at fold time") {
  std::mt19937_64 rng(41);
  const auto samples = random_samples(rng, 150, 60.0);
  const double eps = 5.0;
  HotspotMap prev = cluster(std::span(samples).first(0), eps);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const HotspotMap next = cluster(std::span(samples).first(i + 1), eps);
    if (next.nodes.size() == prev.nodes.size() + 1) {
      REQUIRE(next.nodes.back().pos == samples[i].pos);
      for (const HotspotNode& n : prev.nodes) {
        REQUIRE(haversine_distance(n.pos, samples[i].pos) > eps);
      }
    } else {
      REQUIRE(next.nodes.size() == prev.nodes.size());
      std::size_t changed = 0;
      for (std::size_t j = 0; j < prev.nodes.size(); ++j) {
        if (next.nodes[j] == prev.nodes[j]) continue;
        ++changed;
        REQUIRE(next.nodes[j].samples == prev.nodes[j].samples + 1);
        REQUIRE(next.nodes[j].weight ==
                prev.nodes[j].weight + samples[i].ped_count);
        REQUIRE(haversine_distance(prev.nodes[j].pos, samples[i].pos) <= eps);
      }
      REQUIRE(changed == 1);
    }
    prev = next;
  }
}

TEST_CASE("weight conservation") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_samples(rng, 80, 100.0);
    const auto b = random_samples(rng, 60, 100.0);
    const HotspotMap ma = cluster(a, 5.0);
    const HotspotMap mb = cluster(b, 5.0);
    REQUIRE(ma.total_weight() == total_count(a));
    std::int64_t sample_total = 0;
    for (const auto& n : ma.nodes) {
      REQUIRE(n.weight >= 1);
      REQUIRE(n.samples >= 1);
      REQUIRE(n.weight >= n.samples);
      sample_total += n.samples;
    }
    REQUIRE(sample_total == static_cast<std::int64_t>(a.size()));
    const HotspotMap merged = merge_maps(ma, mb);
    REQUIRE(merged.total_weight() == ma.total_weight() + mb.total_weight());
  }
}

TEST_CASE("build_map examples") {
  SUBCASE("no detections gives an empty map") {
    const std::vector<DriveLog> logs{drive_with_sightings("a", {}, 0)};
    const HotspotMap map = build_map(logs, 5.0);
    CHECK(map.nodes.empty());
    CHECK(map.source_clips == std::set<std::string>{"a"});
  }
  SUBCASE("one pedestrian second gives one node") {
    const std::vector<DriveLog> logs{drive_with_sightings("a", {12}, 2)};
    const HotspotMap map = build_map(logs, 5.0);
    REQUIRE(map.nodes.size() == 1);
    CHECK(map.nodes[0].weight == 2);
    // Median of fixes at 12.0 .. 12.9 s is the 12.45 s position (124.5 m).
    CHECK(haversine_distance(kOrigin, map.nodes[0].pos) ==
          doctest::Approx(124.5).epsilon(1e-6));
  }
  SUBCASE("same clip twice doubles every weight") {
    const DriveLog log = drive_with_sightings("a", {5, 20, 40}, 3);
    const std::vector<DriveLog> once{log};
    const std::vector<DriveLog> twice{log, log};
    const HotspotMap m1 = build_map(once, 5.0);
    const HotspotMap m2 = build_map(twice, 5.0);
    REQUIRE(m1.nodes.size() == 3);
    REQUIRE(m2.nodes.size() == m1.nodes.size());
    for (std::size_t i = 0; i < m1.nodes.size(); ++i) {
      CHECK(m2.nodes[i].weight == 2 * m1.nodes[i].weight);
      CHECK(m2.nodes[i].samples == 2 * m1.nodes[i].samples);
    }
  }
  SUBCASE("input order does not matter") {
    const DriveLog a = drive_with_sightings("a", {5, 6}, 1);
    const DriveLog b = drive_with_sightings("b", {5, 30}, 2);
    const std::vector<DriveLog> ab{a, b};
    const std::vector<DriveLog> ba{b, a};
    CHECK(save_map(build_map(ab, 5.0)) == save_map(build_map(ba, 5.0)));
  }
}

TEST_CASE("merge_maps") {
  const HotspotMap a = build_map(
      std::vector<DriveLog>{drive_with_sightings("a", {5, 20}, 2)}, 5.0);
  const HotspotMap b = build_map(
      std::vector<DriveLog>{drive_with_sightings("b", {20, 40}, 1)}, 5.0);

  SUBCASE("identity with an empty map") {
    HotspotMap empty;
    const HotspotMap merged = merge_maps(a, empty);
    CHECK(merged.nodes == a.nodes);
    CHECK(merged.source_clips == a.source_clips);
  }
  SUBCASE("conservation and clip union") {
    const HotspotMap merged = merge_maps(a, b);
    CHECK(merged.total_weight() == a.total_weight() + b.total_weight());
    CHECK(merged.source_clips == std::set<std::string>{"a", "b"});
    CHECK(merged.nodes.size() == 3);
  }
  SUBCASE("coincident nodes collapse") {
    HotspotMap x;
    x.nodes = {{kOrigin, 2, 1}};
    HotspotMap y;
    y.nodes = {{kOrigin, 3, 2}};
    const HotspotMap merged = merge_maps(x, y);
    REQUIRE(merged.nodes.size() == 1);
    CHECK(merged.nodes[0].weight == 5);
    CHECK(merged.nodes[0].samples == 3);
    CHECK(merged.nodes[0].pos == kOrigin);
  }
  SUBCASE("fleet merge matches a combined build") {
    const std::vector<DriveLog> both{drive_with_sightings("a", {5, 20}, 2),
                                     drive_with_sightings("b", {20, 40}, 1)};
    const HotspotMap combined = build_map(both, 5.0);
    const HotspotMap merged = merge_maps(a, b);
    REQUIRE(combined.nodes.size() == merged.nodes.size());
    for (std::size_t i = 0; i < combined.nodes.size(); ++i) {
      CHECK(combined.nodes[i].weight == merged.nodes[i].weight);
      CHECK(haversine_distance(combined.nodes[i].pos, merged.nodes[i].pos) <
            combined.cluster_radius_m);
    }
  }
  SUBCASE("deterministic and symmetric") {
    CHECK(save_map(merge_maps(a, b)) == save_map(merge_maps(b, a)));
  }
  SUBCASE("radius mismatch") {
    HotspotMap other = b;
    other.cluster_radius_m = 10.0;
    CHECK_THROWS_AS(merge_maps(a, other), RadiusMismatch);
  }
}

TEST_CASE("filter_by_weight") {
  HotspotMap map;
  map.nodes = {{{0, 0}, 1, 1}, {{0, 1}, 3, 1}, {{0, 2}, 5, 2}};
  CHECK(filter_by_weight(map, 1) == map);
  CHECK(filter_by_weight(map, 6).nodes.empty());
  CHECK(filter_by_weight(map, 3).nodes.size() == 2);
  CHECK_THROWS_AS(filter_by_weight(map, 0), InvalidParams);

  std::mt19937_64 rng(2);
  const HotspotMap big = cluster(random_samples(rng, 300, 500.0), 5.0);
  for (std::int64_t w = 1; w < 12; ++w) {
    const auto lo = filter_by_weight(big, w);
    const auto hi = filter_by_weight(big, w + 1);
    for (const HotspotNode& n : hi.nodes) {
      REQUIRE(std::find(lo.nodes.begin(), lo.nodes.end(), n) != lo.nodes.end());
    }
  }
}

TEST_CASE("save and load") {
  std::mt19937_64 rng(13);
  HotspotMap map = cluster(random_samples(rng, 200, 300.0), 5.0);
  map.source_clips = {"clip_b", "clip_a"};
  canonicalize(map);

  const std::string bytes = save_map(map);
  CHECK(load_map(bytes) == map);
  CHECK(save_map(load_map(bytes)) == bytes);
  CHECK(save_map(map) == bytes);

  const HotspotMap empty;
  const HotspotMap loaded_empty = load_map(save_map(empty));
  CHECK(loaded_empty.nodes.empty());
  CHECK(loaded_empty == empty);

  CHECK(bytes.find("\"cluster_radius_m\"") < bytes.find("\"source_clips\""));
  CHECK(bytes.find("\"source_clips\"") < bytes.find("\"nodes\""));

  CHECK_THROWS_AS(load_map("{"), FormatError);
  CHECK_THROWS_AS(load_map("[]"), FormatError);
  CHECK_THROWS_AS(load_map(R"({"source_clips":[],"nodes":[]})"), FormatError);
  CHECK_THROWS_AS(load_map(R"({"cluster_radius_m":5,"source_clips":[],"nodes":[{"lat":0,"lon":0,"weight":0,"samples":1}]})"),
                  FormatError);
  CHECK_THROWS_AS(load_map(R"({"cluster_radius_m":5,"source_clips":[],"nodes":[{"lat":95,"lon":0,"weight":1,"samples":1}]})"),
                  FormatError);
  CHECK_THROWS_AS(load_map(R"({"cluster_radius_m":"x","source_clips":[],"nodes":[]})"),
                  FormatError);
}

TEST_CASE("geojson export") {
  HotspotMap map;
  map.nodes = {{{1, 2}, 1, 1}, {{1, 3}, 3, 2}, {{1, 4}, 9, 4}};
  const auto gj = map_to_geojson(map);
  CHECK(gj["type"] == "FeatureCollection");
  REQUIRE(gj["features"].size() == 3);
  CHECK(gj["features"][0]["geometry"]["coordinates"][0] == 2.0);
  CHECK(gj["features"][0]["geometry"]["coordinates"][1] == 1.0);
  CHECK(gj["features"][0]["properties"]["band"] == "low");
  CHECK(gj["features"][1]["properties"]["band"] == "medium");
  CHECK(gj["features"][2]["properties"]["band"] == "high");
  CHECK(gj["features"][2]["properties"]["weight"] == 9);
  CHECK(gj["features"][2]["properties"]["samples"] == 4);
}
