#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "mergecoord/errors.hpp"
#include "mergecoord/geometry.hpp"

namespace mergecoord {

struct TrajectorySample {
  std::uint64_t timestamp_ms = 0;
  double station = 0.0;  // meters along the matched path
  double speed = 0.0;    // m/s, >= 0
  Point2D raw_pos;
};

struct MotionEstimate {
  double speed_v = 0.0;   // m/s, clamped >= 0
  double accel_a = 0.0;   // m/s^2, clamped to [-10, 10]
  std::uint64_t stamp_ms = 0;
};

// Per-vehicle ring of recent samples: 50 slots, 5 s of history at the
// 10 Hz BSM cadence. Timestamps are strictly increasing inside the ring;
// reordered and duplicated network deliveries are rejected at ingest.
class TrajectoryBuffer {
 public:
  static constexpr std::size_t kCapacity = 50;
  static constexpr std::uint64_t kStalenessMs = 2000;
  static constexpr std::size_t kFitWindow = 10;
  static constexpr double kAccelClampMps2 = 10.0;

  TrajectoryBuffer(std::uint32_t vehicle_id, PathRole role)
      : vehicle_id_(vehicle_id), role_(role) {}

  // False iff the sample is not newer than the newest held one.
  bool ingest(const TrajectorySample& s);

  // Median-of-5 (window shrinks at the edges; even-sized windows take
  // the mean of the middle pair) followed by an exponential moving
  // average with alpha = 0.5, applied to stations and speeds alike.
  // Throws EmptyBuffer.
  std::vector<TrajectorySample> smooth() const;

  // Least-squares line through the newest 10 smoothed speeds; value at
  // the newest timestamp becomes speed_v, the slope becomes accel_a.
  // Throws InsufficientSamples below 2 samples.
  MotionEstimate estimate_motion() const;

  // True iff more than 2000 ms have passed since the last accepted
  // sample (20 missed BSMs).
  bool is_stale(std::uint64_t now_ms) const {
    return now_ms - last_update_ms_ > kStalenessMs;
  }

  std::uint32_t vehicle_id() const { return vehicle_id_; }
  PathRole role() const { return role_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::uint64_t last_update_ms() const { return last_update_ms_; }
  const std::deque<TrajectorySample>& samples() const { return samples_; }

  // Drops history, e.g. when the vehicle is re-matched to the other path.
  void reset(PathRole role) {
    role_ = role;
    samples_.clear();
  }

 private:
  std::uint32_t vehicle_id_;
  PathRole role_;
  std::deque<TrajectorySample> samples_;
  std::uint64_t last_update_ms_ = 0;
};

// Smallest t >= 0 with v*t + a*t^2/2 = d under constant-acceleration
// extrapolation. Empty result means the vehicle never covers d (it stops
// first, or it is standing still with no forward acceleration).
std::optional<double> eta_to_station(double distance_m,
                                     const MotionEstimate& m);

}  // namespace mergecoord
