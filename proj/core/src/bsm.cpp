#include "mergecoord/bsm.hpp"

namespace mergecoord {

namespace {

constexpr std::uint16_t kMaxHeadingCdeg = 35999;

void put_u16(ByteBuffer& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(ByteBuffer& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void put_u64(ByteBuffer& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void put_i32(ByteBuffer& out, std::int32_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint8_t u8() { return bytes_[pos_++]; }

  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_]) |
                      static_cast<std::uint16_t>(bytes_[pos_ + 1]) << 8;
    pos_ += 2;
    return v;
  }

  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const char* to_string(MessageTag tag) {
  switch (tag) {
    case MessageTag::Bsm: return "BSM";
    case MessageTag::RampEntryNotify: return "RAMP_ENTRY_NOTIFY";
    case MessageTag::MergeProposal: return "MERGE_PROPOSAL";
    case MessageTag::ProposalAck: return "PROPOSAL_ACK";
    case MessageTag::MergeConfirm: return "MERGE_CONFIRM";
  }
  return "?";
}

ByteBuffer encode_plan(const MergePlanWire& plan) {
  if (plan.entries.size() > kMaxPlanEntries) {
    throw EncodeError("plan has more than 255 entries");
  }
  ByteBuffer out;
  out.reserve(kPlanPreambleBytes + kPlanEntryBytes * plan.entries.size());
  put_u32(out, plan.plan_id);
  put_u32(out, plan.master_id);
  out.push_back(static_cast<std::uint8_t>(plan.entries.size()));
  put_u64(out, plan.plan_epoch_ms);
  for (const PlanEntryWire& e : plan.entries) {
    put_u32(out, e.vehicle_id);
    put_u32(out, e.eta_ms);
    put_u32(out, e.slot_ms);
  }
  return out;
}

ByteBuffer encode_frame(const ProtocolMessage& m) {
  if (m.header.heading_cdeg > kMaxHeadingCdeg) {
    throw EncodeError("heading_cdeg exceeds 35999");
  }
  ByteBuffer payload;
  switch (m.tag) {
    case MessageTag::Bsm:
    case MessageTag::RampEntryNotify:
      if (m.plan || m.ack) {
        throw EncodeError("tag carries no payload");
      }
      break;
    case MessageTag::MergeProposal:
    case MessageTag::MergeConfirm:
      if (!m.plan || m.ack) {
        throw EncodeError("tag requires a plan payload");
      }
      payload = encode_plan(*m.plan);
      break;
    case MessageTag::ProposalAck:
      if (!m.ack || m.plan) {
        throw EncodeError("tag requires an ack payload");
      }
      put_u32(payload, m.ack->plan_id);
      put_u32(payload, m.ack->acker_id);
      break;
  }
  if (payload.size() > 0xFFFF) {
    throw EncodeError("payload exceeds 65535 bytes");
  }

  ByteBuffer out;
  out.reserve(kFrameHeaderBytes + payload.size());
  out.push_back(static_cast<std::uint8_t>(m.tag));
  put_u32(out, m.header.vehicle_id);
  put_u32(out, m.header.seq);
  put_u64(out, m.header.timestamp_ms);
  put_i32(out, m.header.pos_x_cm);
  put_i32(out, m.header.pos_y_cm);
  put_u16(out, m.header.speed_cms);
  put_u16(out, m.header.heading_cdeg);
  put_u16(out, static_cast<std::uint16_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

ProtocolMessage decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderBytes) {
    throw DecodeError(DecodeError::Kind::Truncated,
                      "frame shorter than 31-byte header");
  }
  Reader r(bytes);
  const std::uint8_t raw_tag = r.u8();
  if (raw_tag > 4) {
    throw DecodeError(DecodeError::Kind::UnknownTag,
                      "unknown tag " + std::to_string(raw_tag));
  }
  ProtocolMessage m;
  m.tag = static_cast<MessageTag>(raw_tag);
  m.header.vehicle_id = r.u32();
  m.header.seq = r.u32();
  m.header.timestamp_ms = r.u64();
  m.header.pos_x_cm = r.i32();
  m.header.pos_y_cm = r.i32();
  m.header.speed_cms = r.u16();
  m.header.heading_cdeg = r.u16();
  if (m.header.heading_cdeg > kMaxHeadingCdeg) {
    throw DecodeError(DecodeError::Kind::BadHeading,
                      "heading_cdeg " + std::to_string(m.header.heading_cdeg));
  }
  const std::uint16_t payload_len = r.u16();
  if (r.remaining() < payload_len) {
    throw DecodeError(DecodeError::Kind::Truncated,
                      "payload shorter than declared length");
  }
  if (r.remaining() > payload_len) {
    throw DecodeError(DecodeError::Kind::MalformedPayload,
                      "trailing bytes after payload");
  }

  switch (m.tag) {
    case MessageTag::Bsm:
    case MessageTag::RampEntryNotify:
      if (payload_len != 0) {
        throw DecodeError(DecodeError::Kind::MalformedPayload,
                          "unexpected payload for empty-payload tag");
      }
      break;
    case MessageTag::ProposalAck: {
      if (payload_len != 8) {
        throw DecodeError(DecodeError::Kind::MalformedPayload,
                          "ack payload must be 8 bytes");
      }
      AckPayload ack;
      ack.plan_id = r.u32();
      ack.acker_id = r.u32();
      m.ack = ack;
      break;
    }
    case MessageTag::MergeProposal:
    case MessageTag::MergeConfirm: {
      if (payload_len < kPlanPreambleBytes) {
        throw DecodeError(DecodeError::Kind::MalformedPayload,
                          "plan payload shorter than preamble");
      }
      MergePlanWire plan;
      plan.plan_id = r.u32();
      plan.master_id = r.u32();
      const std::uint8_t count = r.u8();
      plan.plan_epoch_ms = r.u64();
      if (payload_len != kPlanPreambleBytes + kPlanEntryBytes * count) {
        throw DecodeError(DecodeError::Kind::MalformedPayload,
                          "entry count inconsistent with payload length");
      }
      plan.entries.reserve(count);
      for (std::uint8_t i = 0; i < count; ++i) {
        PlanEntryWire e;
        e.vehicle_id = r.u32();
        e.eta_ms = r.u32();
        e.slot_ms = r.u32();
        plan.entries.push_back(e);
      }
      m.plan = std::move(plan);
      break;
    }
  }
  return m;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

}  // namespace mergecoord
