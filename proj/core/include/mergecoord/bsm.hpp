#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mergecoord/errors.hpp"

namespace mergecoord {

using ByteBuffer = std::vector<std::uint8_t>;

enum class MessageTag : std::uint8_t {
  Bsm = 0,
  RampEntryNotify = 1,
  MergeProposal = 2,
  ProposalAck = 3,
  MergeConfirm = 4,
};

const char* to_string(MessageTag tag);

// One vehicle's broadcast state sample. Fixed-point integer units keep
// the wire image identical across platforms: centimeters, cm/s, and
// centidegrees clockwise from north in [0, 35999].
struct BasicSafetyMessage {
  std::uint32_t vehicle_id = 0;
  std::uint32_t seq = 0;
  std::uint64_t timestamp_ms = 0;
  std::int32_t pos_x_cm = 0;
  std::int32_t pos_y_cm = 0;
  std::uint16_t speed_cms = 0;
  std::uint16_t heading_cdeg = 0;

  bool operator==(const BasicSafetyMessage&) const = default;
};

struct PlanEntryWire {
  std::uint32_t vehicle_id = 0;
  std::uint32_t eta_ms = 0;   // from plan epoch
  std::uint32_t slot_ms = 0;  // from plan epoch

  bool operator==(const PlanEntryWire&) const = default;
};

// Negotiated merging order as it travels in MERGE_PROPOSAL and
// MERGE_CONFIRM payloads. Entries are sorted by slot_ms ascending and
// slot_ms >= eta_ms holds per entry.
struct MergePlanWire {
  std::uint32_t plan_id = 0;
  std::uint32_t master_id = 0;
  std::uint64_t plan_epoch_ms = 0;
  std::vector<PlanEntryWire> entries;

  bool operator==(const MergePlanWire&) const = default;
};

struct AckPayload {
  std::uint32_t plan_id = 0;
  std::uint32_t acker_id = 0;

  bool operator==(const AckPayload&) const = default;
};

// Variant-typed handshake traffic. Every message carries the sender's
// BSM fields, so each reception also refreshes the sender's trajectory
// sample. Payload shape must match the tag: plan for PROPOSAL/CONFIRM,
// ack for PROPOSAL_ACK, nothing for BSM and RAMP_ENTRY_NOTIFY.
struct ProtocolMessage {
  MessageTag tag = MessageTag::Bsm;
  BasicSafetyMessage header;
  std::optional<MergePlanWire> plan;
  std::optional<AckPayload> ack;

  bool operator==(const ProtocolMessage&) const = default;
};

// Fixed little-endian layout:
//   tag u8 | vehicle_id u32 | seq u32 | timestamp_ms u64 |
//   pos_x_cm i32 | pos_y_cm i32 | speed_cms u16 | heading_cdeg u16 |
//   payload_len u16 | payload bytes
inline constexpr std::size_t kFrameHeaderBytes = 31;
inline constexpr std::size_t kPlanPreambleBytes = 17;  // id, master, count, epoch
inline constexpr std::size_t kPlanEntryBytes = 12;
inline constexpr std::size_t kMaxPlanEntries = 255;

// Throws EncodeError if the message violates its invariants (bad
// heading, payload/tag mismatch, too many entries).
ByteBuffer encode_frame(const ProtocolMessage& m);

// Payload-only encoding of a plan; used for byte-exact agreement checks.
ByteBuffer encode_plan(const MergePlanWire& plan);

// Inverse of encode_frame on valid frames. Throws DecodeError with kind
// Truncated, UnknownTag, MalformedPayload or BadHeading.
ProtocolMessage decode_frame(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace mergecoord
