#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mergecoord/bsm.hpp"
#include "mergecoord/errors.hpp"
#include "mergecoord/geometry.hpp"
#include "mergecoord/rng.hpp"

namespace mergecoord {

// Single-hop broadcast channel parameters. The field range band is
// 300-500 m; the conservative 300 m is the default.
struct ChannelConfig {
  double range_m = 300.0;     // valid 1 - 10,000
  double loss_prob = 0.0;     // [0, 1]
  std::uint32_t latency_ms = 20;

  void validate() const;
};

struct InFlightPacket {
  ByteBuffer frame;
  std::uint32_t sender_id = 0;
  std::uint32_t receiver_id = 0;
  std::uint64_t deliver_at_ms = 0;
};

struct NodeRef {
  std::uint32_t id = 0;
  Point2D pos;
};

// True iff the Euclidean distance is at most range_m (boundary
// inclusive).
bool in_range(const Point2D& a, const Point2D& b, const ChannelConfig& cfg);

// Range cutoff plus independent Bernoulli loss per receiver, seeded.
// Loss draws are consumed in ascending receiver id and only for in-range
// receivers, so identical (seed, scenario) pairs give identical delivery
// sets. The sender never receives its own broadcast. Range is checked at
// transmit time only; at 20 ms latency vehicles move well under a meter.
class BroadcastChannel {
 public:
  BroadcastChannel(ChannelConfig cfg, std::uint64_t seed);

  struct BroadcastOutcome {
    std::vector<std::uint32_t> delivered_to;  // survived the loss draw
    std::vector<std::uint32_t> lost_to;       // in range, draw failed
  };

  BroadcastOutcome broadcast(std::uint32_t sender_id, const Point2D& sender_pos,
                             std::span<const NodeRef> nodes,
                             const ByteBuffer& frame, std::uint64_t now_ms);

  // Removes and returns packets with deliver_at_ms <= now_ms, ordered by
  // (deliver_at_ms, sender_id, receiver_id).
  std::vector<InFlightPacket> poll(std::uint64_t now_ms);

  std::optional<std::uint64_t> next_delivery_ms() const;
  std::size_t pending() const { return queue_.size(); }
  const ChannelConfig& config() const { return cfg_; }

 private:
  struct Queued {
    InFlightPacket packet;
    std::uint64_t enqueue_seq;  // final tie-break, keeps ordering total
  };

  ChannelConfig cfg_;
  DeterministicRng rng_;
  std::vector<Queued> queue_;
  std::uint64_t enqueue_counter_ = 0;
};

}  // namespace mergecoord
