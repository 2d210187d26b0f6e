#include "champ/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "champ/errors.hpp"

namespace champ {

namespace {

double wrap_lon(double lon) {
  double wrapped = std::fmod(lon + 180.0, 360.0);
  if (wrapped < 0.0) wrapped += 360.0;
  return wrapped - 180.0;
}

}  // namespace

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lat_deg) && std::isfinite(p.lon_deg) &&
         p.lat_deg >= -90.0 && p.lat_deg <= 90.0 && p.lon_deg >= -180.0 &&
         p.lon_deg <= 180.0;
}

BearingDeg BearingDeg::normalized(double degrees) {
  double v = std::fmod(degrees, 360.0);
  if (v < 0.0) v += 360.0;
  // fmod of a tiny negative value can round back up to exactly 360.
  if (v >= 360.0) v = 0.0;
  return BearingDeg(v);
}

double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }
double rad_to_deg(double rad) { return rad * (180.0 / std::numbers::pi); }

double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = deg_to_rad(a.lat_deg);
  const double phi2 = deg_to_rad(b.lat_deg);
  const double sin_dphi = std::sin((phi2 - phi1) / 2.0);
  const double sin_dlambda =
      std::sin(deg_to_rad(b.lon_deg - a.lon_deg) / 2.0);
  // Squares keep the expression exactly symmetric in (a, b).
  const double h = sin_dphi * sin_dphi +
                   std::cos(phi1) * std::cos(phi2) * sin_dlambda * sin_dlambda;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

BearingDeg initial_bearing(const GeoPoint& from, const GeoPoint& to) {
  if (from == to) throw CoincidentPoints();
  const double phi1 = deg_to_rad(from.lat_deg);
  const double phi2 = deg_to_rad(to.lat_deg);
  const double dlambda = deg_to_rad(to.lon_deg - from.lon_deg);
  const double y = std::sin(dlambda) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) -
                   std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
  return BearingDeg::normalized(rad_to_deg(std::atan2(y, x)));
}

double heading_angle(BearingDeg ego_heading, BearingDeg bearing_to_target) {
  const double diff =
      std::fabs(ego_heading.value() - bearing_to_target.value());
  return diff > 180.0 ? 360.0 - diff : diff;
}

GeoPoint destination_point(const GeoPoint& start, BearingDeg bearing,
                           double distance_m) {
  if (distance_m == 0.0) return start;
  const double delta = distance_m / kEarthRadiusM;
  const double theta = deg_to_rad(bearing.value());
  const double phi1 = deg_to_rad(start.lat_deg);
  const double lambda1 = deg_to_rad(start.lon_deg);

  const double sin_phi2 = std::sin(phi1) * std::cos(delta) +
                          std::cos(phi1) * std::sin(delta) * std::cos(theta);
  const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
  const double lambda2 =
      lambda1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                           std::cos(delta) - std::sin(phi1) * sin_phi2);
  return GeoPoint{rad_to_deg(phi2), wrap_lon(rad_to_deg(lambda2))};
}

}  // namespace champ
