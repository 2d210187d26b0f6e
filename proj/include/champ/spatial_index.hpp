#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "champ/geodesy.hpp"
#include "champ/hotspot_map.hpp"

namespace champ {

inline constexpr std::size_t kDefaultLeafCapacity = 16;

struct NearestResult {
  std::size_t node_index = 0;  // index into the indexed node list
  double distance_m = 0.0;

  friend bool operator==(const NearestResult&, const NearestResult&) = default;
};

// Per-query instrumentation.
struct QueryStats {
  std::uint64_t distance_evaluations = 0;
};

// Exact nearest-neighbor ball tree under the haversine metric.
//
// Every tree node bounds its points by a centroid and a covering radius. A
// subtree is skipped only when max(0, d(query, centroid) - radius) exceeds the
// best distance found so far, so results match a linear scan exactly,
// including the lowest-index tie rule.
//
// Immutable after construction; concurrent queries are safe.
class SpatialIndex {
 public:
  struct TreeNode {
    GeoPoint centroid;
    double radius_m = 0.0;
    // Range [begin, end) into point_order().
    std::size_t begin = 0;
    std::size_t end = 0;
    // Child indices into tree(); both -1 for leaves.
    std::int64_t left = -1;
    std::int64_t right = -1;

    bool is_leaf() const { return left < 0; }
  };

  SpatialIndex() = default;

  static SpatialIndex build(std::span<const GeoPoint> points,
                            std::size_t leaf_capacity = kDefaultLeafCapacity);

  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  std::size_t leaf_capacity() const { return leaf_capacity_; }

  // Throws NoNodes on an empty index.
  NearestResult nearest(const GeoPoint& query,
                        QueryStats* stats = nullptr) const;

  // Structure access for audits and visualization. The root is tree()[0].
  std::span<const TreeNode> tree() const { return tree_; }
  std::span<const std::size_t> point_order() const { return order_; }
  std::span<const GeoPoint> points() const { return points_; }

 private:
  std::size_t build_node(std::size_t begin, std::size_t end);
  void search(std::size_t node, const GeoPoint& query, double node_distance,
              NearestResult& best, QueryStats* stats) const;

  std::vector<GeoPoint> points_;
  std::vector<std::size_t> order_;
  std::vector<TreeNode> tree_;
  std::size_t leaf_capacity_ = kDefaultLeafCapacity;
};

SpatialIndex build_index(const HotspotMap& map,
                         std::size_t leaf_capacity = kDefaultLeafCapacity);

// Linear scan with the same tie rule as SpatialIndex::nearest.
// Throws NoNodes when there are no points.
NearestResult brute_force_nearest(std::span<const GeoPoint> points,
                                  const GeoPoint& query,
                                  QueryStats* stats = nullptr);
NearestResult brute_force_nearest(const HotspotMap& map, const GeoPoint& query);

}  // namespace champ
