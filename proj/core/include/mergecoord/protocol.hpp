#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mergecoord/bsm.hpp"
#include "mergecoord/errors.hpp"
#include "mergecoord/geometry.hpp"

namespace mergecoord {

struct ProtocolParams {
  double headway_s = 2.0;          // minimum slot separation h
  double collect_window_s = 1.0;   // trajectory collection after NOTIFY
  std::uint32_t retransmit_ms = 300;
  std::uint32_t max_retries = 3;
  double slowdown_epsilon_s = 0.25;

  std::uint64_t collect_window_ms() const {
    return static_cast<std::uint64_t>(collect_window_s * 1000.0 + 0.5);
  }
  std::uint64_t expiry_ms() const { return 10ull * retransmit_ms; }
  std::uint64_t headway_ms() const {
    return static_cast<std::uint64_t>(headway_s * 1000.0 + 0.5);
  }

  void validate() const;
};

// Sort by ETA ascending (ties to the smaller vehicle id), then push each
// slot to at least headway after its predecessor:
//   slot_1 = eta_1, slot_k = max(eta_k, slot_{k-1} + h).
// ETAs are quantized to milliseconds so every participant reproduces the
// plan bit-exactly. Throws EmptyInput.
std::vector<PlanEntryWire> compute_merge_order(
    const std::map<std::uint32_t, double>& etas_s, double headway_s);

enum class AdvisoryKind { SlowDown, MaintainSpeed, MergeBehind, MergeAhead };

const char* to_string(AdvisoryKind kind);

// Per-driver instruction derived from a committed plan. slot_s is the
// assigned merge-point crossing time in absolute simulation seconds.
struct Advisory {
  AdvisoryKind kind = AdvisoryKind::MaintainSpeed;
  std::optional<std::uint32_t> reference_vehicle_id;
  double slot_s = 0.0;
};

// Derives the advisory for one plan participant. Ramp vehicles follow
// the previous slot holder ("merge behind") or, when first with a
// successor, merge ahead of it; freeway vehicles delayed by more than
// slowdown_epsilon are told to slow down for the ramp (master) vehicle.
// Throws NotInPlan.
Advisory advisory_for(const MergePlanWire& plan, std::uint32_t self_id,
                      PathRole self_role, double own_eta_s,
                      double slowdown_epsilon_s);

// Machine output: payload intents only. The owning agent wraps each one
// with its current BSM header and hands it to the channel.
struct ProtocolEmission {
  MessageTag tag = MessageTag::Bsm;
  std::optional<MergePlanWire> plan;
  std::optional<AckPayload> ack;
};

enum class MasterPhase { Idle, Collecting, ProposalSent, Committed, Aborted };
enum class ResponderPhase { Idle, AckSent, Committed };

const char* to_string(MasterPhase p);
const char* to_string(ResponderPhase p);

struct StepResult {
  std::vector<ProtocolEmission> emissions;
  std::optional<Advisory> advisory;
};

// Ramp-side state machine driving the three-way handshake:
// NOTIFY on ramp entry, then PROPOSAL -> ACKs -> CONFIRM. Pure step
// functions; the simulation loop owns time and delivery.
class MasterMachine {
 public:
  MasterMachine(std::uint32_t self_id, PathRole self_role,
                ProtocolParams params)
      : self_id_(self_id), self_role_(self_role), params_(params) {}

  // Idle ramp vehicle entering the ramp: emits RAMP_ENTRY_NOTIFY and
  // starts the collection window. Throws WrongPhase when not Idle or
  // when the vehicle is not a ramp vehicle (masters are ramp vehicles).
  std::vector<ProtocolEmission> on_ramp_entry(std::uint64_t now_ms);

  // Deadline handling. In Collecting: build the plan from the fresh ETA
  // set (self included) and emit MERGE_PROPOSAL. In ProposalSent:
  // retransmit while retries remain, otherwise drop never-acked vehicles
  // and rebuild under a fresh plan id, or abort when nobody is left.
  // Throws IllegalTransition when no deadline is armed.
  StepResult on_timeout(std::uint64_t now_ms,
                        const std::map<std::uint32_t, double>& fresh_etas_s);

  // PROPOSAL_ACK from a participant. Acks for other plan ids, unknown
  // vehicles, or phases outside ProposalSent are ignored (broadcast
  // channel). Emits MERGE_CONFIRM once every other participant acked.
  StepResult on_ack(std::uint32_t plan_id, std::uint32_t from_id,
                    std::uint64_t now_ms);

  // NOTIFY or PROPOSAL from another master. Smaller vehicle id wins
  // mastership; this machine yields back to Idle and the agent carries
  // on as a responder.
  void on_foreign_master(std::uint32_t foreign_id);

  MasterPhase phase() const { return phase_; }
  const std::optional<MergePlanWire>& plan() const { return plan_; }
  std::optional<std::uint64_t> next_timeout_ms() const { return deadline_; }
  const std::set<std::uint32_t>& acked_ids() const { return acked_; }
  std::uint32_t retries_left() const { return retries_left_; }
  std::uint32_t self_id() const { return self_id_; }

 private:
  StepResult build_and_propose(
      std::uint64_t now_ms, const std::map<std::uint32_t, double>& etas_s);
  StepResult commit(std::uint64_t now_ms);

  std::uint32_t self_id_;
  PathRole self_role_;
  ProtocolParams params_;
  MasterPhase phase_ = MasterPhase::Idle;
  std::optional<MergePlanWire> plan_;
  std::set<std::uint32_t> acked_;
  std::uint32_t retries_left_ = 0;
  std::optional<std::uint64_t> deadline_;
  std::uint32_t plan_counter_ = 0;
};

// Responder side: ACK any fresh plan that includes this vehicle, commit
// on a matching CONFIRM, fall back to Idle when no CONFIRM arrives
// within ten retransmit intervals. Unknown inputs are ignored by design.
class ResponderMachine {
 public:
  ResponderMachine(std::uint32_t self_id, PathRole self_role,
                   ProtocolParams params)
      : self_id_(self_id), self_role_(self_role), params_(params) {}

  StepResult on_proposal(const MergePlanWire& plan, std::uint64_t now_ms);
  StepResult on_confirm(std::uint32_t plan_id, std::uint64_t now_ms);
  void on_expiry(std::uint64_t now_ms);

  ResponderPhase phase() const { return phase_; }
  const std::optional<MergePlanWire>& plan() const { return plan_; }
  std::optional<std::uint64_t> expiry_deadline_ms() const { return deadline_; }
  std::optional<std::uint32_t> last_acked_plan_id() const {
    return last_acked_plan_id_;
  }

 private:
  std::uint32_t self_id_;
  PathRole self_role_;
  ProtocolParams params_;
  ResponderPhase phase_ = ResponderPhase::Idle;
  std::optional<MergePlanWire> plan_;
  std::optional<std::uint32_t> last_acked_plan_id_;
  std::optional<std::uint64_t> deadline_;
};

}  // namespace mergecoord
