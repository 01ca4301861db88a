#include "mergecoord/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mergecoord {

namespace {

constexpr double kEarthRadiusM = 6'371'000.0;
constexpr double kPi = 3.14159265358979323846;

double hypot2(const Point2D& a, const Point2D& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return dx * dx + dy * dy;
}

}  // namespace

const char* to_string(PathRole role) {
  return role == PathRole::Ramp ? "ramp" : "freeway";
}

Polyline::Polyline(std::vector<Point2D> vertices)
    : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) {
    throw GeometryError("polyline needs at least 2 vertices");
  }
  cumulative_.reserve(vertices_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!std::isfinite(vertices_[i].x) || !std::isfinite(vertices_[i].y)) {
      throw GeometryError("polyline vertex is not finite");
    }
    if (i == 0) continue;
    const double seg = std::sqrt(hypot2(vertices_[i - 1], vertices_[i]));
    if (seg <= 0.0) {
      throw GeometryError("zero-length polyline segment at vertex " +
                          std::to_string(i));
    }
    cumulative_.push_back(cumulative_.back() + seg);
  }
}

PathPosition Polyline::project(const Point2D& q) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  PathPosition best;
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    const Point2D& a = vertices_[i];
    const Point2D& b = vertices_[i + 1];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = ((q.x - a.x) * dx + (q.y - a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    const Point2D p{a.x + t * dx, a.y + t * dy};
    const double d2 = hypot2(p, q);
    // Strict comparison keeps the earliest (smallest-station) candidate
    // on ties.
    if (d2 < best_d2) {
      best_d2 = d2;
      const double seg_len = std::sqrt(len2);
      best.station = cumulative_[i] + t * seg_len;
      // Signed transverse component, left of travel positive.
      best.lateral_offset = (dx * (q.y - a.y) - dy * (q.x - a.x)) / seg_len;
    }
  }
  return best;
}

Point2D Polyline::at_station(double s) const {
  constexpr double kGrace = 1e-9;
  if (s < -kGrace || s > length() + kGrace) {
    throw GeometryError("station " + std::to_string(s) +
                        " outside [0, " + std::to_string(length()) + "]");
  }
  s = std::clamp(s, 0.0, length());
  const auto it =
      std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t seg =
      std::min(static_cast<std::size_t>(it - cumulative_.begin()),
               cumulative_.size() - 1) -
      1;
  const double t =
      (s - cumulative_[seg]) / (cumulative_[seg + 1] - cumulative_[seg]);
  const Point2D& a = vertices_[seg];
  const Point2D& b = vertices_[seg + 1];
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

Point2D Polyline::tangent_at(double s) const {
  s = std::clamp(s, 0.0, length());
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t seg =
      std::min(static_cast<std::size_t>(it - cumulative_.begin()),
               cumulative_.size() - 1) -
      1;
  const Point2D& a = vertices_[seg];
  const Point2D& b = vertices_[seg + 1];
  const double len = cumulative_[seg + 1] - cumulative_[seg];
  return {(b.x - a.x) / len, (b.y - a.y) / len};
}

Point2D latlon_to_local(double lat_deg, double lon_deg, double origin_lat_deg,
                        double origin_lon_deg) {
  auto check = [](double lat, double lon) {
    if (!(std::abs(lat) <= 90.0) || !(std::abs(lon) <= 180.0)) {
      throw GeometryError("latitude/longitude out of range");
    }
  };
  check(lat_deg, lon_deg);
  check(origin_lat_deg, origin_lon_deg);
  const double d2r = kPi / 180.0;
  return {kEarthRadiusM * std::cos(origin_lat_deg * d2r) *
              (lon_deg - origin_lon_deg) * d2r,
          kEarthRadiusM * (lat_deg - origin_lat_deg) * d2r};
}

RoadNetwork::RoadNetwork(Polyline freeway, Polyline ramp)
    : freeway_(std::move(freeway)), ramp_(std::move(ramp)) {
  const Point2D terminus = ramp_.vertices().back();
  const PathPosition on_freeway = freeway_.project(terminus);
  merge_point_ = freeway_.at_station(on_freeway.station);
  const double gap = std::sqrt(hypot2(terminus, merge_point_));
  if (gap > kMergeSnapTolerance) {
    throw GeometryError("ramp terminus is " + std::to_string(gap) +
                        " m from the freeway (max 0.5 m)");
  }
  merge_station_ = on_freeway.station;
}

std::optional<double> RoadNetwork::distance_to_merge(
    PathRole role, const PathPosition& pos) const {
  const double d = role == PathRole::Ramp ? ramp_.length() - pos.station
                                          : merge_station_ - pos.station;
  if (d < 0.0) {
    return std::nullopt;  // already past the merge point
  }
  return d;
}

}  // namespace mergecoord
