#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "mergecoord/protocol.hpp"
#include "mergecoord/rng.hpp"

using namespace mergecoord;

namespace {

ProtocolParams params() { return ProtocolParams{}; }

std::map<std::uint32_t, double> conflict_etas() {
  // Master 1 on the ramp, freeway vehicles 2 (leading) and 3 (trailing).
  return {{1, 8.6}, {2, 8.1}, {3, 10.7}};
}

}  // namespace

TEST_CASE("merging order on well-separated etas needs no adjustment") {
  const auto entries = compute_merge_order({{1, 5.0}, {2, 9.0}}, 2.0);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].vehicle_id == 1);
  CHECK(entries[0].slot_ms == 5000);
  CHECK(entries[1].vehicle_id == 2);
  CHECK(entries[1].slot_ms == 9000);
}

TEST_CASE("merging order delays the follower to the headway") {
  const auto entries = compute_merge_order({{1, 5.0}, {2, 5.5}}, 2.0);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].vehicle_id == 1);
  CHECK(entries[0].slot_ms == 5000);
  CHECK(entries[1].vehicle_id == 2);
  CHECK(entries[1].eta_ms == 5500);
  CHECK(entries[1].slot_ms == 7000);  // delayed 1.5 s
}

TEST_CASE("merging order breaks eta ties by vehicle id") {
  const auto entries =
      compute_merge_order({{3, 5.0}, {1, 5.0}, {2, 5.0}}, 2.0);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].vehicle_id == 1);
  CHECK(entries[0].slot_ms == 5000);
  CHECK(entries[1].vehicle_id == 2);
  CHECK(entries[1].slot_ms == 7000);
  CHECK(entries[2].vehicle_id == 3);
  CHECK(entries[2].slot_ms == 9000);
}

TEST_CASE("merging order rejects an empty eta set") {
  CHECK_THROWS_AS(compute_merge_order({}, 2.0), EmptyInput);
}

TEST_CASE("merging order always satisfies slot feasibility") {
  DeterministicRng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    std::map<std::uint32_t, double> etas;
    const int n = 1 + static_cast<int>(rng.next_unit() * 9.0);
    for (int i = 0; i < n; ++i) {
      etas[static_cast<std::uint32_t>(rng.next_u64() % 100)] =
          rng.next_unit() * 30.0;
    }
    const double h = 0.5 + rng.next_unit() * 3.0;
    const auto entries = compute_merge_order(etas, h);
    const std::uint32_t h_ms = static_cast<std::uint32_t>(h * 1000.0 + 0.5);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      CHECK(entries[i].slot_ms >= entries[i].eta_ms);
      if (i > 0) {
        CHECK(entries[i].slot_ms - entries[i - 1].slot_ms >= h_ms);
      }
    }
  }
}

TEST_CASE("ramp entry transitions and errors") {
  MasterMachine master(1, PathRole::Ramp, params());
  const auto emissions = master.on_ramp_entry(0);
  REQUIRE(emissions.size() == 1);
  CHECK(emissions[0].tag == MessageTag::RampEntryNotify);
  CHECK(master.phase() == MasterPhase::Collecting);
  CHECK(*master.next_timeout_ms() == 1000);

  CHECK_THROWS_AS(master.on_ramp_entry(100), WrongPhase);

  MasterMachine freeway_master(2, PathRole::Freeway, params());
  CHECK_THROWS_AS(freeway_master.on_ramp_entry(0), WrongPhase);
}

TEST_CASE("lossless handshake produces N+2 messages after NOTIFY") {
  MasterMachine master(1, PathRole::Ramp, params());
  ResponderMachine r2(2, PathRole::Freeway, params());
  ResponderMachine r3(3, PathRole::Freeway, params());

  master.on_ramp_entry(0);
  const StepResult proposal = master.on_timeout(1000, conflict_etas());
  REQUIRE(proposal.emissions.size() == 1);
  CHECK(proposal.emissions[0].tag == MessageTag::MergeProposal);
  CHECK(master.phase() == MasterPhase::ProposalSent);
  CHECK(master.retries_left() == 3);

  const MergePlanWire& plan = *proposal.emissions[0].plan;
  REQUIRE(plan.entries.size() == 3);
  CHECK(plan.entries[0].vehicle_id == 2);
  CHECK(plan.entries[1].vehicle_id == 1);
  CHECK(plan.entries[1].slot_ms == 10100);  // 8.1 + h over own 8.6
  CHECK(plan.entries[2].vehicle_id == 3);
  CHECK(plan.entries[2].slot_ms == 12100);

  const StepResult ack2 = r2.on_proposal(plan, 1020);
  const StepResult ack3 = r3.on_proposal(plan, 1020);
  REQUIRE(ack2.emissions.size() == 1);
  CHECK(ack2.emissions[0].tag == MessageTag::ProposalAck);
  CHECK(ack2.emissions[0].ack->acker_id == 2);
  CHECK(r2.phase() == ResponderPhase::AckSent);

  const StepResult after2 = master.on_ack(plan.plan_id, 2, 1040);
  CHECK(after2.emissions.empty());
  CHECK(master.phase() == MasterPhase::ProposalSent);
  const StepResult after3 = master.on_ack(plan.plan_id, 3, 1040);
  REQUIRE(after3.emissions.size() == 1);
  CHECK(after3.emissions[0].tag == MessageTag::MergeConfirm);
  CHECK(master.phase() == MasterPhase::Committed);
  REQUIRE(after3.advisory.has_value());
  CHECK(after3.advisory->kind == AdvisoryKind::MergeBehind);
  CHECK(*after3.advisory->reference_vehicle_id == 2);

  const StepResult commit2 = r2.on_confirm(plan.plan_id, 1060);
  const StepResult commit3 = r3.on_confirm(plan.plan_id, 1060);
  CHECK(r2.phase() == ResponderPhase::Committed);
  CHECK(r3.phase() == ResponderPhase::Committed);
  REQUIRE(commit2.advisory.has_value());
  CHECK(commit2.advisory->kind == AdvisoryKind::MaintainSpeed);
  REQUIRE(commit3.advisory.has_value());
  CHECK(commit3.advisory->kind == AdvisoryKind::SlowDown);
  CHECK(*commit3.advisory->reference_vehicle_id == 1);

  // One PROPOSAL, one ACK per responder, one CONFIRM: N + 2 for N = 2.
  const std::size_t total = proposal.emissions.size() +
                            ack2.emissions.size() + ack3.emissions.size() +
                            after3.emissions.size();
  CHECK(total == 4);

  // Agreement: every committed machine holds byte-identical plan wire.
  const ByteBuffer master_bytes = encode_plan(*master.plan());
  CHECK(encode_plan(*r2.plan()) == master_bytes);
  CHECK(encode_plan(*r3.plan()) == master_bytes);
}

TEST_CASE("timeout retransmits the identical proposal") {
  MasterMachine master(1, PathRole::Ramp, params());
  master.on_ramp_entry(0);
  const StepResult first = master.on_timeout(1000, conflict_etas());
  const MergePlanWire plan = *first.emissions[0].plan;

  const StepResult retry = master.on_timeout(1300, conflict_etas());
  REQUIRE(retry.emissions.size() == 1);
  CHECK(retry.emissions[0].tag == MessageTag::MergeProposal);
  CHECK(encode_plan(*retry.emissions[0].plan) == encode_plan(plan));
  CHECK(master.retries_left() == 2);
}

TEST_CASE("retries exhausted drops never-acked vehicles and rebuilds") {
  MasterMachine master(1, PathRole::Ramp, params());
  master.on_ramp_entry(0);
  const StepResult first = master.on_timeout(1000, conflict_etas());
  const std::uint32_t old_plan_id = first.emissions[0].plan->plan_id;

  master.on_ack(old_plan_id, 2, 1040);
  master.on_timeout(1300, conflict_etas());
  master.on_timeout(1600, conflict_etas());
  master.on_timeout(1900, conflict_etas());
  CHECK(master.retries_left() == 0);

  const StepResult rebuilt = master.on_timeout(2200, conflict_etas());
  REQUIRE(rebuilt.emissions.size() == 1);
  const MergePlanWire& plan = *rebuilt.emissions[0].plan;
  CHECK(plan.plan_id != old_plan_id);
  REQUIRE(plan.entries.size() == 2);  // vehicle 3 never acked, dropped
  CHECK(plan.entries[0].vehicle_id == 2);
  CHECK(plan.entries[1].vehicle_id == 1);
  CHECK(master.phase() == MasterPhase::ProposalSent);
  CHECK(master.retries_left() == 3);
  CHECK(master.acked_ids().empty());
}

TEST_CASE("master aborts when nobody is left to coordinate with") {
  MasterMachine master(1, PathRole::Ramp, params());
  master.on_ramp_entry(0);
  master.on_timeout(1000, {{1, 8.6}, {3, 10.7}});
  master.on_timeout(1300, {{1, 8.6}, {3, 10.7}});
  master.on_timeout(1600, {{1, 8.6}, {3, 10.7}});
  master.on_timeout(1900, {{1, 8.6}, {3, 10.7}});
  const StepResult final_step = master.on_timeout(2200, {{1, 8.6}, {3, 10.7}});
  CHECK(final_step.emissions.empty());
  CHECK(master.phase() == MasterPhase::Aborted);
}

TEST_CASE("solo master commits immediately after proposing") {
  MasterMachine master(1, PathRole::Ramp, params());
  master.on_ramp_entry(0);
  const StepResult result = master.on_timeout(1000, {{1, 9.0}});
  REQUIRE(result.emissions.size() == 2);
  CHECK(result.emissions[0].tag == MessageTag::MergeProposal);
  CHECK(result.emissions[1].tag == MessageTag::MergeConfirm);
  CHECK(master.phase() == MasterPhase::Committed);
  REQUIRE(result.advisory.has_value());
  CHECK(result.advisory->kind == AdvisoryKind::MaintainSpeed);
}

TEST_CASE("master without a usable self eta aborts") {
  MasterMachine master(5, PathRole::Ramp, params());
  master.on_ramp_entry(0);
  const StepResult result = master.on_timeout(1000, {{2, 8.0}});
  CHECK(result.emissions.empty());
  CHECK(master.phase() == MasterPhase::Aborted);
}

TEST_CASE("smaller-id master wins mastership") {
  MasterMachine junior(9, PathRole::Ramp, params());
  junior.on_ramp_entry(0);
  CHECK(junior.phase() == MasterPhase::Collecting);
  junior.on_foreign_master(5);
  CHECK(junior.phase() == MasterPhase::Idle);

  MasterMachine senior(5, PathRole::Ramp, params());
  senior.on_ramp_entry(0);
  senior.on_foreign_master(9);
  CHECK(senior.phase() == MasterPhase::Collecting);  // keeps mastership
}

TEST_CASE("stale and foreign acks are ignored") {
  MasterMachine master(1, PathRole::Ramp, params());
  master.on_ramp_entry(0);
  const StepResult first = master.on_timeout(1000, conflict_etas());
  const std::uint32_t plan_id = first.emissions[0].plan->plan_id;

  CHECK(master.on_ack(plan_id + 1, 2, 1040).emissions.empty());
  CHECK(master.on_ack(plan_id, 77, 1040).emissions.empty());  // not in plan
  CHECK(master.acked_ids().empty());
}

TEST_CASE("timeout without an armed deadline is illegal") {
  MasterMachine master(1, PathRole::Ramp, params());
  CHECK_THROWS_AS(master.on_timeout(0, conflict_etas()), IllegalTransition);
}

TEST_CASE("responder acks plans containing it and ignores the rest") {
  ResponderMachine responder(2, PathRole::Freeway, params());
  MergePlanWire plan;
  plan.plan_id = 0x50001;
  plan.master_id = 1;
  plan.plan_epoch_ms = 1000;
  plan.entries = {{1, 8600, 8600}, {2, 10600, 10600}};

  const StepResult ack = responder.on_proposal(plan, 1020);
  REQUIRE(ack.emissions.size() == 1);
  CHECK(ack.emissions[0].ack->plan_id == plan.plan_id);
  CHECK(responder.phase() == ResponderPhase::AckSent);
  CHECK(*responder.expiry_deadline_ms() == 1020 + 3000);

  // Duplicate proposal (a retransmission): identical second ack.
  const StepResult again = responder.on_proposal(plan, 1320);
  REQUIRE(again.emissions.size() == 1);
  CHECK(again.emissions[0].ack->plan_id == plan.plan_id);
  CHECK(responder.phase() == ResponderPhase::AckSent);

  MergePlanWire other = plan;
  other.plan_id = 0x60001;
  other.entries = {{1, 8600, 8600}, {3, 10600, 10600}};
  CHECK(responder.on_proposal(other, 1400).emissions.empty());
  CHECK(*responder.last_acked_plan_id() == plan.plan_id);
}

TEST_CASE("responder commits only on a matching confirm") {
  ResponderMachine responder(2, PathRole::Freeway, params());
  MergePlanWire plan;
  plan.plan_id = 0x50001;
  plan.master_id = 1;
  plan.plan_epoch_ms = 0;
  plan.entries = {{1, 5000, 5000}, {2, 5500, 7000}};

  CHECK(responder.on_confirm(plan.plan_id, 10).advisory == std::nullopt);
  CHECK(responder.phase() == ResponderPhase::Idle);

  responder.on_proposal(plan, 20);
  CHECK(responder.on_confirm(999, 40).advisory == std::nullopt);
  CHECK(responder.phase() == ResponderPhase::AckSent);

  const StepResult committed = responder.on_confirm(plan.plan_id, 60);
  CHECK(responder.phase() == ResponderPhase::Committed);
  REQUIRE(committed.advisory.has_value());
  CHECK(committed.advisory->kind == AdvisoryKind::SlowDown);
  CHECK(committed.advisory->slot_s == doctest::Approx(7.0));
}

TEST_CASE("responder expiry returns to Idle without a confirm") {
  ResponderMachine responder(2, PathRole::Freeway, params());
  MergePlanWire plan;
  plan.plan_id = 1;
  plan.master_id = 1;
  plan.entries = {{1, 5000, 5000}, {2, 5500, 7500}};
  responder.on_proposal(plan, 0);
  responder.on_expiry(3000);
  CHECK(responder.phase() == ResponderPhase::Idle);
  CHECK(!responder.plan().has_value());
}

TEST_CASE("responder accepts a replacement plan from a new cycle") {
  ResponderMachine responder(2, PathRole::Freeway, params());
  MergePlanWire plan;
  plan.plan_id = 7;
  plan.master_id = 1;
  plan.entries = {{1, 5000, 5000}, {2, 5500, 7000}};
  responder.on_proposal(plan, 0);
  responder.on_confirm(7, 40);
  CHECK(responder.phase() == ResponderPhase::Committed);

  MergePlanWire next = plan;
  next.plan_id = 8;
  const StepResult ack = responder.on_proposal(next, 5000);
  REQUIRE(ack.emissions.size() == 1);
  CHECK(ack.emissions[0].ack->plan_id == 8);
  CHECK(responder.phase() == ResponderPhase::AckSent);
}

TEST_CASE("advisory rules on the conflict-shaped plan") {
  MergePlanWire plan;
  plan.plan_id = 1;
  plan.master_id = 1;  // ramp vehicle R
  plan.plan_epoch_ms = 0;
  plan.entries = {{1, 5000, 5000}, {2, 5500, 7000}};

  const Advisory ramp = advisory_for(plan, 1, PathRole::Ramp, 5.0, 0.25);
  CHECK(ramp.kind == AdvisoryKind::MergeAhead);
  CHECK(*ramp.reference_vehicle_id == 2);

  const Advisory freeway = advisory_for(plan, 2, PathRole::Freeway, 5.5, 0.25);
  CHECK(freeway.kind == AdvisoryKind::SlowDown);
  CHECK(*freeway.reference_vehicle_id == 1);
  CHECK(freeway.slot_s == doctest::Approx(7.0));
}

TEST_CASE("advisory rules when the ramp vehicle goes second") {
  MergePlanWire plan;
  plan.plan_id = 2;
  plan.master_id = 9;  // ramp vehicle R = 9
  plan.plan_epoch_ms = 0;
  plan.entries = {{4, 5000, 5000}, {9, 9000, 9000}};

  const Advisory ramp = advisory_for(plan, 9, PathRole::Ramp, 9.0, 0.25);
  CHECK(ramp.kind == AdvisoryKind::MergeBehind);
  CHECK(*ramp.reference_vehicle_id == 4);

  const Advisory freeway = advisory_for(plan, 4, PathRole::Freeway, 5.0, 0.25);
  CHECK(freeway.kind == AdvisoryKind::MaintainSpeed);
  CHECK(!freeway.reference_vehicle_id.has_value());
}

TEST_CASE("advisory slot is offset by the plan epoch") {
  MergePlanWire plan;
  plan.plan_id = 3;
  plan.master_id = 1;
  plan.plan_epoch_ms = 4000;
  plan.entries = {{1, 5000, 5000}};
  const Advisory adv = advisory_for(plan, 1, PathRole::Ramp, 5.0, 0.25);
  CHECK(adv.slot_s == doctest::Approx(9.0));
}

TEST_CASE("advisory for a vehicle outside the plan throws") {
  MergePlanWire plan;
  plan.plan_id = 1;
  plan.master_id = 1;
  plan.entries = {{1, 5000, 5000}};
  CHECK_THROWS_AS(advisory_for(plan, 42, PathRole::Freeway, 5.0, 0.25),
                  NotInPlan);
}

TEST_CASE("advisory_for is pure") {
  MergePlanWire plan;
  plan.plan_id = 1;
  plan.master_id = 1;
  plan.plan_epoch_ms = 500;
  plan.entries = {{1, 5000, 5000}, {2, 5500, 7000}};
  const Advisory a = advisory_for(plan, 2, PathRole::Freeway, 5.5, 0.25);
  const Advisory b = advisory_for(plan, 2, PathRole::Freeway, 5.5, 0.25);
  CHECK(a.kind == b.kind);
  CHECK(a.reference_vehicle_id == b.reference_vehicle_id);
  CHECK(a.slot_s == b.slot_s);
}
