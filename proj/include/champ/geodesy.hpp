#pragma once

#include <compare>

namespace champ {

// Mean Earth radius (IUGG). All distances in the library are great-circle
// distances on a sphere of this radius.
inline constexpr double kEarthRadiusM = 6371008.8;

struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
  friend auto operator<=>(const GeoPoint&, const GeoPoint&) = default;
};

// True when lat is in [-90, 90], lon in [-180, 180] and both are finite.
bool is_valid(const GeoPoint& p);

// Compass bearing in degrees clockwise from true north, always in [0, 360).
class BearingDeg {
 public:
  constexpr BearingDeg() = default;

  // Wraps any finite angle into [0, 360).
  static BearingDeg normalized(double degrees);

  constexpr double value() const { return value_; }

  friend bool operator==(const BearingDeg&, const BearingDeg&) = default;

 private:
  explicit constexpr BearingDeg(double v) : value_(v) {}
  double value_ = 0.0;
};

double deg_to_rad(double deg);
double rad_to_deg(double rad);

double haversine_distance(const GeoPoint& a, const GeoPoint& b);

// Forward azimuth at `from` of the great circle to `to`.
// Throws CoincidentPoints when the two coordinates are identical.
BearingDeg initial_bearing(const GeoPoint& from, const GeoPoint& to);

// Smallest absolute difference between two bearings, in [0, 180].
double heading_angle(BearingDeg ego_heading, BearingDeg bearing_to_target);

// Point reached after `distance_m` along the great circle leaving `start` at
// `bearing`. Longitude of the result is wrapped into [-180, 180].
GeoPoint destination_point(const GeoPoint& start, BearingDeg bearing,
                           double distance_m);

}  // namespace champ
