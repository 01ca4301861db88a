#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mergecoord/bsm.hpp"
#include "mergecoord/rng.hpp"
#include "support/generators.hpp"

using namespace mergecoord;

namespace {

ProtocolMessage bsm_message() {
  ProtocolMessage msg;
  msg.tag = MessageTag::Bsm;
  msg.header = {7, 1, 123456, -250000, 9900, 2900, 18000};
  return msg;
}

ProtocolMessage proposal_with_entries(std::size_t n) {
  ProtocolMessage msg;
  msg.tag = MessageTag::MergeProposal;
  msg.header = {1, 5, 1000, 0, 0, 2600, 9000};
  MergePlanWire plan;
  plan.plan_id = 0x10001;
  plan.master_id = 1;
  plan.plan_epoch_ms = 1000;
  std::uint32_t slot = 5000;
  for (std::size_t i = 0; i < n; ++i) {
    plan.entries.push_back({static_cast<std::uint32_t>(i + 1), slot, slot});
    slot += 2000;
  }
  msg.plan = plan;
  return msg;
}

}  // namespace

TEST_CASE("frame sizes match the declared layout") {
  CHECK(encode_frame(bsm_message()).size() == 31);
  CHECK(encode_frame(proposal_with_entries(3)).size() == 84);

  ProtocolMessage notify;
  notify.tag = MessageTag::RampEntryNotify;
  notify.header = bsm_message().header;
  CHECK(encode_frame(notify).size() == 31);

  ProtocolMessage ack;
  ack.tag = MessageTag::ProposalAck;
  ack.header = bsm_message().header;
  ack.ack = AckPayload{0x10001, 2};
  CHECK(encode_frame(ack).size() == 31 + 8);
}

TEST_CASE("encoded length is header plus payload length exactly") {
  DeterministicRng rng(5);
  for (int i = 0; i < 200; ++i) {
    const ProtocolMessage msg = testsupport::random_message(rng);
    const ByteBuffer frame = encode_frame(msg);
    const std::size_t payload_len = frame[29] | (frame[30] << 8);
    CHECK(frame.size() == kFrameHeaderBytes + payload_len);
  }
}

TEST_CASE("roundtrip identity over randomized messages") {
  DeterministicRng rng(42);
  for (int i = 0; i < 10'000; ++i) {
    const ProtocolMessage msg = testsupport::random_message(rng);
    const ProtocolMessage back = decode_frame(encode_frame(msg));
    CHECK(back == msg);
  }
}

TEST_CASE("single-byte truncations never decode") {
  DeterministicRng rng(43);
  for (int i = 0; i < 100; ++i) {
    const ByteBuffer frame = encode_frame(testsupport::random_message(rng));
    for (std::size_t cut = 0; cut < frame.size(); ++cut) {
      ByteBuffer shorter(frame.begin(),
                         frame.begin() + static_cast<std::ptrdiff_t>(cut));
      CHECK_THROWS_AS(decode_frame(shorter), DecodeError);
    }
  }
}

TEST_CASE("decode error kinds") {
  SUBCASE("below header size") {
    const ByteBuffer frame = encode_frame(bsm_message());
    ByteBuffer short30(frame.begin(), frame.begin() + 30);
    try {
      decode_frame(short30);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.kind() == DecodeError::Kind::Truncated);
    }
  }

  SUBCASE("unknown tag") {
    ByteBuffer frame = encode_frame(bsm_message());
    frame[0] = 9;
    try {
      decode_frame(frame);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.kind() == DecodeError::Kind::UnknownTag);
    }
  }

  SUBCASE("declared payload longer than remaining bytes") {
    ByteBuffer frame = encode_frame(bsm_message());
    frame[29] = 10;  // payload_len low byte
    try {
      decode_frame(frame);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.kind() == DecodeError::Kind::Truncated);
    }
  }

  SUBCASE("bad heading") {
    ByteBuffer frame = encode_frame(bsm_message());
    frame[27] = 0xA0;  // heading_cdeg = 0x8CA0 = 36000
    frame[28] = 0x8C;
    try {
      decode_frame(frame);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.kind() == DecodeError::Kind::BadHeading);
    }
  }

  SUBCASE("entry count inconsistent with payload length") {
    ByteBuffer frame = encode_frame(proposal_with_entries(3));
    frame[kFrameHeaderBytes + 8] = 2;  // count byte
    try {
      decode_frame(frame);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.kind() == DecodeError::Kind::MalformedPayload);
    }
  }

  SUBCASE("nonempty payload on a BSM") {
    ByteBuffer frame = encode_frame(bsm_message());
    frame[29] = 2;
    frame.push_back(0);
    frame.push_back(0);
    try {
      decode_frame(frame);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.kind() == DecodeError::Kind::MalformedPayload);
    }
  }
}

TEST_CASE("encode rejects invariant violations") {
  ProtocolMessage msg = bsm_message();
  msg.header.heading_cdeg = 36000;
  CHECK_THROWS_AS(encode_frame(msg), EncodeError);

  ProtocolMessage missing_plan;
  missing_plan.tag = MessageTag::MergeProposal;
  CHECK_THROWS_AS(encode_frame(missing_plan), EncodeError);

  ProtocolMessage stray_payload = bsm_message();
  stray_payload.ack = AckPayload{1, 2};
  CHECK_THROWS_AS(encode_frame(stray_payload), EncodeError);
}

TEST_CASE("plan payload encoding is stable for agreement checks") {
  const ProtocolMessage msg = proposal_with_entries(2);
  const ByteBuffer a = encode_plan(*msg.plan);
  const ByteBuffer b = encode_plan(*msg.plan);
  CHECK(a == b);
  CHECK(a.size() == kPlanPreambleBytes + 2 * kPlanEntryBytes);

  const ProtocolMessage decoded = decode_frame(encode_frame(msg));
  CHECK(encode_plan(*decoded.plan) == a);
}

TEST_CASE("hex rendering is lowercase") {
  const ByteBuffer bytes{0x00, 0x1A, 0xFF};
  CHECK(to_hex(bytes) == "001aff");
}
