#include "champ/spatial_index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "champ/errors.hpp"

namespace champ {

namespace {

// Rounding allowance for the triangle-inequality bound. Haversine error is
// below 1e-7 m even at antipodal range, so this never prunes a true winner.
constexpr double kPruneSlackM = 1e-6;

std::array<double, 3> to_unit(const GeoPoint& p) {
  const double phi = deg_to_rad(p.lat_deg);
  const double lambda = deg_to_rad(p.lon_deg);
  return {std::cos(phi) * std::cos(lambda), std::cos(phi) * std::sin(lambda),
          std::sin(phi)};
}

bool better(double d, std::size_t idx, const NearestResult& best) {
  return d < best.distance_m || (d == best.distance_m && idx < best.node_index);
}

}  // namespace

SpatialIndex SpatialIndex::build(std::span<const GeoPoint> points,
                                 std::size_t leaf_capacity) {
  if (leaf_capacity < 1) throw InvalidParams("leaf capacity must be >= 1");
  SpatialIndex index;
  index.leaf_capacity_ = leaf_capacity;
  index.points_.assign(points.begin(), points.end());
  index.order_.resize(points.size());
  std::iota(index.order_.begin(), index.order_.end(), std::size_t{0});
  if (!points.empty()) index.build_node(0, points.size());
  return index;
}

std::size_t SpatialIndex::build_node(std::size_t begin, std::size_t end) {
  // Centroid: normalized mean of unit vectors, robust across the antimeridian.
  std::array<double, 3> sum{0.0, 0.0, 0.0};
  for (std::size_t i = begin; i < end; ++i) {
    const auto v = to_unit(points_[order_[i]]);
    for (int c = 0; c < 3; ++c) sum[c] += v[c];
  }
  const double norm = std::sqrt(sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]);
  GeoPoint centroid = points_[order_[begin]];
  if (norm > 1e-12) {
    centroid.lat_deg = rad_to_deg(std::asin(std::clamp(sum[2] / norm, -1.0, 1.0)));
    centroid.lon_deg = rad_to_deg(std::atan2(sum[1], sum[0]));
  }
  double radius = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    radius = std::max(radius, haversine_distance(centroid, points_[order_[i]]));
  }

  const std::size_t self = tree_.size();
  tree_.push_back({centroid, radius, begin, end, -1, -1});
  if (end - begin <= leaf_capacity_) return self;

  // Pivots: farthest point from the first, then farthest from that one.
  auto farthest_from = [&](const GeoPoint& from) {
    std::size_t best = begin;
    double best_d = -1.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double d = haversine_distance(from, points_[order_[i]]);
      if (d > best_d) {
        best = i;
        best_d = d;
      }
    }
    return points_[order_[best]];
  };
  const GeoPoint pivot_a = farthest_from(points_[order_[begin]]);
  const GeoPoint pivot_b = farthest_from(pivot_a);

  const auto first = order_.begin() + static_cast<std::ptrdiff_t>(begin);
  const auto last = order_.begin() + static_cast<std::ptrdiff_t>(end);
  auto split = std::stable_partition(first, last, [&](std::size_t idx) {
    return haversine_distance(points_[idx], pivot_a) <=
           haversine_distance(points_[idx], pivot_b);
  });
  std::size_t mid = begin + static_cast<std::size_t>(split - first);
  // Coincident points leave one side empty; fall back to an even split.
  if (mid == begin || mid == end) mid = begin + (end - begin) / 2;

  const std::size_t left = build_node(begin, mid);
  const std::size_t right = build_node(mid, end);
  tree_[self].left = static_cast<std::int64_t>(left);
  tree_[self].right = static_cast<std::int64_t>(right);
  return self;
}

NearestResult SpatialIndex::nearest(const GeoPoint& query,
                                    QueryStats* stats) const {
  if (empty()) throw NoNodes();
  NearestResult best{std::numeric_limits<std::size_t>::max(),
                     std::numeric_limits<double>::infinity()};
  const double root_d = haversine_distance(query, tree_[0].centroid);
  if (stats) ++stats->distance_evaluations;
  search(0, query, root_d, best, stats);
  return best;
}

void SpatialIndex::search(std::size_t node_id, const GeoPoint& query,
                          double node_distance, NearestResult& best,
                          QueryStats* stats) const {
  const TreeNode& node = tree_[node_id];
  const double lower_bound = std::max(0.0, node_distance - node.radius_m);
  if (lower_bound > best.distance_m + kPruneSlackM) return;

  if (node.is_leaf()) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t idx = order_[i];
      const double d = haversine_distance(points_[idx], query);
      if (stats) ++stats->distance_evaluations;
      if (better(d, idx, best)) best = {idx, d};
    }
    return;
  }

  const auto left = static_cast<std::size_t>(node.left);
  const auto right = static_cast<std::size_t>(node.right);
  const double d_left = haversine_distance(query, tree_[left].centroid);
  const double d_right = haversine_distance(query, tree_[right].centroid);
  if (stats) stats->distance_evaluations += 2;
  const double lb_left = std::max(0.0, d_left - tree_[left].radius_m);
  const double lb_right = std::max(0.0, d_right - tree_[right].radius_m);
  if (lb_left <= lb_right) {
    search(left, query, d_left, best, stats);
    search(right, query, d_right, best, stats);
  } else {
    search(right, query, d_right, best, stats);
    search(left, query, d_left, best, stats);
  }
}

SpatialIndex build_index(const HotspotMap& map, std::size_t leaf_capacity) {
  std::vector<GeoPoint> points;
  points.reserve(map.nodes.size());
  for (const HotspotNode& node : map.nodes) points.push_back(node.pos);
  return SpatialIndex::build(points, leaf_capacity);
}

NearestResult brute_force_nearest(std::span<const GeoPoint> points,
                                  const GeoPoint& query, QueryStats* stats) {
  if (points.empty()) throw NoNodes();
  NearestResult best{std::numeric_limits<std::size_t>::max(),
                     std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = haversine_distance(points[i], query);
    if (stats) ++stats->distance_evaluations;
    if (better(d, i, best)) best = {i, d};
  }
  return best;
}

NearestResult brute_force_nearest(const HotspotMap& map, const GeoPoint& query) {
  std::vector<GeoPoint> points;
  points.reserve(map.nodes.size());
  for (const HotspotNode& node : map.nodes) points.push_back(node.pos);
  return brute_force_nearest(points, query);
}

}  // namespace champ
