#include "mergecoord/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace mergecoord {

namespace {

constexpr double kEmaAlpha = 0.5;

double window_median(const std::vector<double>& xs, std::size_t lo,
                     std::size_t hi) {
  std::vector<double> w(xs.begin() + static_cast<std::ptrdiff_t>(lo),
                        xs.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  std::sort(w.begin(), w.end());
  const std::size_t n = w.size();
  if (n % 2 == 1) {
    return w[n / 2];
  }
  return 0.5 * (w[n / 2 - 1] + w[n / 2]);
}

std::vector<double> median5_then_ema(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  std::vector<double> med(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    const std::size_t hi = std::min(i + 2, n - 1);
    med[i] = window_median(xs, lo, hi);
  }
  std::vector<double> out(n);
  out[0] = med[0];
  for (std::size_t i = 1; i < n; ++i) {
    out[i] = kEmaAlpha * med[i] + (1.0 - kEmaAlpha) * out[i - 1];
  }
  return out;
}

}  // namespace

bool TrajectoryBuffer::ingest(const TrajectorySample& s) {
  if (!samples_.empty() && s.timestamp_ms <= samples_.back().timestamp_ms) {
    return false;  // duplicate or reordered delivery
  }
  if (samples_.size() == kCapacity) {
    samples_.pop_front();
  }
  samples_.push_back(s);
  last_update_ms_ = s.timestamp_ms;
  return true;
}

std::vector<TrajectorySample> TrajectoryBuffer::smooth() const {
  if (samples_.empty()) {
    throw EmptyBuffer();
  }
  const std::size_t n = samples_.size();
  std::vector<double> stations(n), speeds(n);
  for (std::size_t i = 0; i < n; ++i) {
    stations[i] = samples_[i].station;
    speeds[i] = samples_[i].speed;
  }
  const std::vector<double> s_sm = median5_then_ema(stations);
  const std::vector<double> v_sm = median5_then_ema(speeds);
  std::vector<TrajectorySample> out(samples_.begin(), samples_.end());
  for (std::size_t i = 0; i < n; ++i) {
    out[i].station = s_sm[i];
    out[i].speed = std::max(0.0, v_sm[i]);
  }
  return out;
}

MotionEstimate TrajectoryBuffer::estimate_motion() const {
  if (samples_.size() < 2) {
    throw InsufficientSamples();
  }
  const std::vector<TrajectorySample> sm = smooth();
  const std::size_t n = sm.size();
  const std::size_t k = std::min(n, kFitWindow);
  const std::size_t first = n - k;

  // Least squares of speed against time, seconds relative to the window
  // start for conditioning.
  const double t0 = static_cast<double>(sm[first].timestamp_ms);
  double sum_t = 0, sum_v = 0, sum_tt = 0, sum_tv = 0;
  for (std::size_t i = first; i < n; ++i) {
    const double t = (static_cast<double>(sm[i].timestamp_ms) - t0) / 1000.0;
    const double v = sm[i].speed;
    sum_t += t;
    sum_v += v;
    sum_tt += t * t;
    sum_tv += t * v;
  }
  const double kd = static_cast<double>(k);
  const double denom = kd * sum_tt - sum_t * sum_t;
  double slope = 0.0;
  double intercept = sum_v / kd;
  if (denom > 0.0) {
    slope = (kd * sum_tv - sum_t * sum_v) / denom;
    intercept = (sum_v - slope * sum_t) / kd;
  }

  MotionEstimate est;
  est.stamp_ms = sm.back().timestamp_ms;
  const double t_newest =
      (static_cast<double>(est.stamp_ms) - t0) / 1000.0;
  est.speed_v = std::max(0.0, intercept + slope * t_newest);
  est.accel_a = std::clamp(slope, -kAccelClampMps2, kAccelClampMps2);
  return est;
}

std::optional<double> eta_to_station(double distance_m,
                                     const MotionEstimate& m) {
  const double d = distance_m;
  const double v = std::max(0.0, m.speed_v);
  const double a = m.accel_a;
  if (d <= 0.0) {
    return 0.0;
  }
  constexpr double kTinyAccel = 1e-12;
  if (std::abs(a) < kTinyAccel) {
    if (v <= 0.0) {
      return std::nullopt;
    }
    return d / v;
  }
  if (a > 0.0) {
    return (-v + std::sqrt(v * v + 2.0 * a * d)) / a;
  }
  // Decelerating: the vehicle stops after v^2 / (2|a|) meters.
  const double stop_dist = v * v / (2.0 * -a);
  if (stop_dist < d) {
    return std::nullopt;
  }
  const double disc = std::max(0.0, v * v + 2.0 * a * d);
  return (v - std::sqrt(disc)) / -a;
}

}  // namespace mergecoord
