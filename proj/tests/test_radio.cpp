#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mergecoord/radio.hpp"
#include "support/generators.hpp"

using namespace mergecoord;

namespace {

ByteBuffer tiny_frame() { return ByteBuffer{0x01, 0x02, 0x03}; }

}  // namespace

TEST_CASE("in_range boundary is inclusive") {
  ChannelConfig cfg;
  cfg.range_m = 300.0;
  CHECK(in_range({0, 0}, {100, 0}, cfg));
  CHECK(in_range({0, 0}, {300, 0}, cfg));
  cfg.range_m = 500.0;
  CHECK(!in_range({0, 0}, {600, 0}, cfg));
}

TEST_CASE("config validation") {
  ChannelConfig cfg;
  cfg.range_m = 0.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.range_m = 300.0;
  cfg.loss_prob = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("lossless broadcast reaches every in-range receiver") {
  BroadcastChannel ch(ChannelConfig{300.0, 0.0, 20}, 1);
  const std::vector<NodeRef> nodes{
      {1, {0, 0}}, {2, {50, 0}}, {3, {100, 0}}, {4, {200, 0}}, {5, {900, 0}}};
  const auto outcome = ch.broadcast(1, {0, 0}, nodes, tiny_frame(), 0);
  CHECK(outcome.delivered_to == std::vector<std::uint32_t>{2, 3, 4});
  CHECK(outcome.lost_to.empty());
  CHECK(ch.pending() == 3);
}

TEST_CASE("loss probability one drops everything") {
  BroadcastChannel ch(ChannelConfig{300.0, 1.0, 20}, 1);
  const std::vector<NodeRef> nodes{{1, {0, 0}}, {2, {50, 0}}};
  const auto outcome = ch.broadcast(1, {0, 0}, nodes, tiny_frame(), 0);
  CHECK(outcome.delivered_to.empty());
  CHECK(outcome.lost_to == std::vector<std::uint32_t>{2});
  CHECK(ch.pending() == 0);
}

TEST_CASE("sender never receives its own broadcast") {
  BroadcastChannel ch(ChannelConfig{300.0, 0.0, 20}, 1);
  const std::vector<NodeRef> nodes{{1, {0, 0}}, {2, {10, 0}}};
  const auto outcome = ch.broadcast(1, {0, 0}, nodes, tiny_frame(), 0);
  for (const auto id : outcome.delivered_to) {
    CHECK(id != 1);
  }
  for (const auto& pkt : ch.poll(100)) {
    CHECK(pkt.receiver_id != 1);
  }
}

TEST_CASE("delivered fraction tracks the loss probability") {
  BroadcastChannel ch(ChannelConfig{300.0, 0.3, 20}, 77);
  const std::vector<NodeRef> nodes{{1, {0, 0}}, {2, {100, 0}}};
  int delivered = 0;
  for (int i = 0; i < 10'000; ++i) {
    const auto outcome = ch.broadcast(1, {0, 0}, nodes, tiny_frame(), i);
    delivered += static_cast<int>(outcome.delivered_to.size());
  }
  const double fraction = delivered / 10'000.0;
  CHECK(fraction > 0.680);
  CHECK(fraction < 0.720);
}

TEST_CASE("out-of-range receivers never get packets") {
  DeterministicRng rng(31);
  ChannelConfig cfg{250.0, 0.2, 20};
  BroadcastChannel ch(cfg, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<NodeRef> nodes;
    for (std::uint32_t id = 1; id <= 6; ++id) {
      nodes.push_back(
          {id, {rng.next_unit() * 1000.0, rng.next_unit() * 1000.0}});
    }
    const auto outcome =
        ch.broadcast(1, nodes[0].pos, nodes, tiny_frame(), trial);
    for (const auto id : outcome.delivered_to) {
      CHECK(in_range(nodes[0].pos, nodes[id - 1].pos, cfg));
    }
  }
}

TEST_CASE("poll ordering and boundary") {
  BroadcastChannel ch(ChannelConfig{1000.0, 0.0, 20}, 1);
  const std::vector<NodeRef> nodes{{3, {0, 0}}, {7, {10, 0}}, {9, {20, 0}}};

  CHECK(ch.poll(1000).empty());

  ch.broadcast(7, {10, 0}, nodes, tiny_frame(), 100);  // due at 120
  ch.broadcast(3, {0, 0}, nodes, tiny_frame(), 100);   // due at 120

  CHECK(ch.poll(119).empty());
  const auto due = ch.poll(120);
  REQUIRE(due.size() == 4);
  CHECK(due[0].sender_id == 3);  // sender 3 sorts before sender 7
  CHECK(due[1].sender_id == 3);
  CHECK(due[0].receiver_id < due[1].receiver_id);
  CHECK(due[2].sender_id == 7);
  CHECK(ch.pending() == 0);
}

TEST_CASE("identical seeds reproduce identical delivery sets") {
  const std::vector<NodeRef> nodes{
      {1, {0, 0}}, {2, {50, 0}}, {3, {90, 0}}, {4, {130, 0}}};
  for (std::uint64_t seed : {9ull, 10ull}) {
    BroadcastChannel a(ChannelConfig{300.0, 0.5, 20}, seed);
    BroadcastChannel b(ChannelConfig{300.0, 0.5, 20}, seed);
    for (int i = 0; i < 200; ++i) {
      const auto oa = a.broadcast(1, {0, 0}, nodes, tiny_frame(), i);
      const auto ob = b.broadcast(1, {0, 0}, nodes, tiny_frame(), i);
      CHECK(oa.delivered_to == ob.delivered_to);
      CHECK(oa.lost_to == ob.lost_to);
    }
  }
}

TEST_CASE("loss draws for distinct receivers are independent") {
  // 2x2 contingency of (r2 delivered, r3 delivered) over many
  // broadcasts; chi-square with 1 dof should stay below the 1% critical
  // value for independent draws.
  BroadcastChannel ch(ChannelConfig{300.0, 0.4, 20}, 1234);
  const std::vector<NodeRef> nodes{{1, {0, 0}}, {2, {50, 0}}, {3, {80, 0}}};
  double counts[2][2] = {{0, 0}, {0, 0}};
  const int n = 5000;
  for (int i = 0; i < n; ++i) {
    const auto outcome = ch.broadcast(1, {0, 0}, nodes, tiny_frame(), i);
    bool got2 = false;
    bool got3 = false;
    for (const auto id : outcome.delivered_to) {
      if (id == 2) got2 = true;
      if (id == 3) got3 = true;
    }
    counts[got2 ? 1 : 0][got3 ? 1 : 0] += 1.0;
  }
  const double row0 = counts[0][0] + counts[0][1];
  const double row1 = counts[1][0] + counts[1][1];
  const double col0 = counts[0][0] + counts[1][0];
  const double col1 = counts[0][1] + counts[1][1];
  double chi2 = 0.0;
  const double total = n;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double expected =
          (r == 0 ? row0 : row1) * (c == 0 ? col0 : col1) / total;
      const double diff = counts[r][c] - expected;
      chi2 += diff * diff / expected;
    }
  }
  CHECK(chi2 < 6.635);
}
