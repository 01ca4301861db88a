#include "mergecoord/radio.hpp"

#include <algorithm>
#include <cmath>

namespace mergecoord {

void ChannelConfig::validate() const {
  if (!(range_m >= 1.0 && range_m <= 10'000.0)) {
    throw Error("channel range must be in [1, 10000] m");
  }
  if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) {
    throw Error("loss probability must be in [0, 1]");
  }
}

bool in_range(const Point2D& a, const Point2D& b, const ChannelConfig& cfg) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return std::sqrt(dx * dx + dy * dy) <= cfg.range_m;
}

BroadcastChannel::BroadcastChannel(ChannelConfig cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed) {
  cfg_.validate();
}

BroadcastChannel::BroadcastOutcome BroadcastChannel::broadcast(
    std::uint32_t sender_id, const Point2D& sender_pos,
    std::span<const NodeRef> nodes, const ByteBuffer& frame,
    std::uint64_t now_ms) {
  // Candidates sorted by id fix the RNG consumption order.
  std::vector<const NodeRef*> candidates;
  candidates.reserve(nodes.size());
  for (const NodeRef& n : nodes) {
    if (n.id == sender_id) continue;
    candidates.push_back(&n);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const NodeRef* a, const NodeRef* b) { return a->id < b->id; });

  BroadcastOutcome outcome;
  for (const NodeRef* n : candidates) {
    if (!in_range(sender_pos, n->pos, cfg_)) {
      continue;  // out-of-range receivers consume no draw
    }
    const double u = rng_.next_unit();
    if (u < cfg_.loss_prob) {
      outcome.lost_to.push_back(n->id);
      continue;
    }
    queue_.push_back(Queued{
        InFlightPacket{frame, sender_id, n->id, now_ms + cfg_.latency_ms},
        enqueue_counter_++});
    outcome.delivered_to.push_back(n->id);
  }
  return outcome;
}

std::vector<InFlightPacket> BroadcastChannel::poll(std::uint64_t now_ms) {
  std::vector<Queued> due;
  std::vector<Queued> rest;
  rest.reserve(queue_.size());
  for (Queued& q : queue_) {
    (q.packet.deliver_at_ms <= now_ms ? due : rest).push_back(std::move(q));
  }
  queue_ = std::move(rest);
  std::sort(due.begin(), due.end(), [](const Queued& a, const Queued& b) {
    const InFlightPacket& pa = a.packet;
    const InFlightPacket& pb = b.packet;
    if (pa.deliver_at_ms != pb.deliver_at_ms)
      return pa.deliver_at_ms < pb.deliver_at_ms;
    if (pa.sender_id != pb.sender_id) return pa.sender_id < pb.sender_id;
    if (pa.receiver_id != pb.receiver_id)
      return pa.receiver_id < pb.receiver_id;
    return a.enqueue_seq < b.enqueue_seq;
  });
  std::vector<InFlightPacket> out;
  out.reserve(due.size());
  for (Queued& q : due) {
    out.push_back(std::move(q.packet));
  }
  return out;
}

std::optional<std::uint64_t> BroadcastChannel::next_delivery_ms() const {
  std::optional<std::uint64_t> t;
  for (const Queued& q : queue_) {
    if (!t || q.packet.deliver_at_ms < *t) {
      t = q.packet.deliver_at_ms;
    }
  }
  return t;
}

}  // namespace mergecoord
