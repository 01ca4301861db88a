#pragma once

#include <optional>
#include <vector>

#include "mergecoord/errors.hpp"

namespace mergecoord {

// Local tangent plane coordinates, meters. x east, y north.
struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

// Position expressed along a path: arc-length station plus a signed
// lateral offset (left of travel direction is positive).
struct PathPosition {
  double station = 0.0;
  double lateral_offset = 0.0;
};

enum class PathRole { Ramp, Freeway };

const char* to_string(PathRole role);

// Arc-length parameterized centerline. Construction rejects fewer than
// two vertices, non-finite coordinates and zero-length segments, so the
// cumulative lengths are strictly increasing.
class Polyline {
 public:
  explicit Polyline(std::vector<Point2D> vertices);

  const std::vector<Point2D>& vertices() const { return vertices_; }
  const std::vector<double>& cumulative_lengths() const { return cumulative_; }
  double length() const { return cumulative_.back(); }

  // Closest point on the polyline; among equal-distance candidates the
  // smallest station wins.
  PathPosition project(const Point2D& q) const;

  // Inverse of the station map, linear along the containing segment.
  // Throws GeometryError outside [0, length()].
  Point2D at_station(double s) const;

  // Unit tangent of the segment containing station s.
  Point2D tangent_at(double s) const;

 private:
  std::vector<Point2D> vertices_;
  std::vector<double> cumulative_;
};

inline double path_length(const Polyline& p) { return p.length(); }

// Equirectangular projection about an origin, Earth radius 6,371,000 m.
// Adequate at interchange scale (< 2 km). Throws GeometryError when a
// latitude leaves [-90, 90] or a longitude leaves [-180, 180].
Point2D latlon_to_local(double lat_deg, double lon_deg, double origin_lat_deg,
                        double origin_lon_deg);

// Freeway plus ramp centerlines. The merge point is the ramp's terminal
// vertex projected onto the freeway; construction rejects ramps whose
// terminus is farther than 0.5 m from the freeway.
class RoadNetwork {
 public:
  RoadNetwork(Polyline freeway, Polyline ramp);

  const Polyline& freeway() const { return freeway_; }
  const Polyline& ramp() const { return ramp_; }
  double merge_station() const { return merge_station_; }
  Point2D merge_point() const { return merge_point_; }

  // Remaining along-path distance to the merge point for a vehicle on
  // the given path. Empty when the vehicle is already past the merge
  // point (such vehicles are excluded from planning).
  std::optional<double> distance_to_merge(PathRole role,
                                          const PathPosition& pos) const;

  static constexpr double kMergeSnapTolerance = 0.5;  // meters

 private:
  Polyline freeway_;
  Polyline ramp_;
  double merge_station_ = 0.0;
  Point2D merge_point_;
};

}  // namespace mergecoord
