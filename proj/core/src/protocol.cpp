#include "mergecoord/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace mergecoord {

namespace {

std::uint32_t ms_from_seconds(double s) {
  return static_cast<std::uint32_t>(std::llround(std::max(0.0, s) * 1000.0));
}

double seconds_from_ms(std::uint32_t ms) {
  return static_cast<double>(ms) / 1000.0;
}

const PlanEntryWire* find_entry(const MergePlanWire& plan,
                                std::uint32_t vehicle_id) {
  for (const PlanEntryWire& e : plan.entries) {
    if (e.vehicle_id == vehicle_id) return &e;
  }
  return nullptr;
}

}  // namespace

void ProtocolParams::validate() const {
  if (!(headway_s > 0.0) || !(collect_window_s > 0.0) || retransmit_ms == 0 ||
      !(slowdown_epsilon_s > 0.0)) {
    throw Error("protocol parameters must be positive");
  }
}

const char* to_string(AdvisoryKind kind) {
  switch (kind) {
    case AdvisoryKind::SlowDown: return "SlowDown";
    case AdvisoryKind::MaintainSpeed: return "MaintainSpeed";
    case AdvisoryKind::MergeBehind: return "MergeBehind";
    case AdvisoryKind::MergeAhead: return "MergeAhead";
  }
  return "?";
}

const char* to_string(MasterPhase p) {
  switch (p) {
    case MasterPhase::Idle: return "Idle";
    case MasterPhase::Collecting: return "Collecting";
    case MasterPhase::ProposalSent: return "ProposalSent";
    case MasterPhase::Committed: return "Committed";
    case MasterPhase::Aborted: return "Aborted";
  }
  return "?";
}

const char* to_string(ResponderPhase p) {
  switch (p) {
    case ResponderPhase::Idle: return "Idle";
    case ResponderPhase::AckSent: return "AckSent";
    case ResponderPhase::Committed: return "Committed";
  }
  return "?";
}

std::vector<PlanEntryWire> compute_merge_order(
    const std::map<std::uint32_t, double>& etas_s, double headway_s) {
  if (etas_s.empty()) {
    throw EmptyInput();
  }
  struct Item {
    std::uint32_t id;
    std::uint32_t eta_ms;
  };
  std::vector<Item> items;
  items.reserve(etas_s.size());
  for (const auto& [id, eta] : etas_s) {
    items.push_back({id, ms_from_seconds(eta)});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.eta_ms != b.eta_ms) return a.eta_ms < b.eta_ms;
    return a.id < b.id;
  });
  const std::uint32_t h_ms =
      static_cast<std::uint32_t>(std::llround(headway_s * 1000.0));
  std::vector<PlanEntryWire> entries;
  entries.reserve(items.size());
  std::uint32_t prev_slot = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    PlanEntryWire e;
    e.vehicle_id = items[i].id;
    e.eta_ms = items[i].eta_ms;
    e.slot_ms = i == 0 ? e.eta_ms : std::max(e.eta_ms, prev_slot + h_ms);
    prev_slot = e.slot_ms;
    entries.push_back(e);
  }
  return entries;
}

Advisory advisory_for(const MergePlanWire& plan, std::uint32_t self_id,
                      PathRole self_role, double own_eta_s,
                      double slowdown_epsilon_s) {
  const PlanEntryWire* self = find_entry(plan, self_id);
  if (self == nullptr) {
    throw NotInPlan("vehicle " + std::to_string(self_id) + " not in plan " +
                    std::to_string(plan.plan_id));
  }
  const std::size_t index = static_cast<std::size_t>(
      std::find_if(plan.entries.begin(), plan.entries.end(),
                   [&](const PlanEntryWire& e) {
                     return e.vehicle_id == self_id;
                   }) -
      plan.entries.begin());
  const double epoch_s = static_cast<double>(plan.plan_epoch_ms) / 1000.0;

  Advisory adv;
  adv.slot_s = epoch_s + seconds_from_ms(self->slot_ms);
  if (self_role == PathRole::Ramp) {
    if (index > 0) {
      adv.kind = AdvisoryKind::MergeBehind;
      adv.reference_vehicle_id = plan.entries[index - 1].vehicle_id;
    } else if (plan.entries.size() > 1) {
      adv.kind = AdvisoryKind::MergeAhead;
      adv.reference_vehicle_id = plan.entries[1].vehicle_id;
    } else {
      adv.kind = AdvisoryKind::MaintainSpeed;
    }
    return adv;
  }
  // Freeway participant: slowing is advised only when the slot pushes it
  // measurably past its own ETA. Freeway vehicles are never told to
  // accelerate.
  const double delay_s = seconds_from_ms(self->slot_ms) - own_eta_s;
  if (delay_s > slowdown_epsilon_s) {
    adv.kind = AdvisoryKind::SlowDown;
    adv.reference_vehicle_id = plan.master_id;
  } else {
    adv.kind = AdvisoryKind::MaintainSpeed;
  }
  return adv;
}

std::vector<ProtocolEmission> MasterMachine::on_ramp_entry(
    std::uint64_t now_ms) {
  if (self_role_ != PathRole::Ramp) {
    throw WrongPhase("only ramp vehicles initiate the handshake");
  }
  if (phase_ != MasterPhase::Idle) {
    throw WrongPhase("ramp entry is only legal from Idle");
  }
  phase_ = MasterPhase::Collecting;
  deadline_ = now_ms + params_.collect_window_ms();
  plan_.reset();
  acked_.clear();
  return {ProtocolEmission{MessageTag::RampEntryNotify, std::nullopt,
                           std::nullopt}};
}

StepResult MasterMachine::build_and_propose(
    std::uint64_t now_ms, const std::map<std::uint32_t, double>& etas_s) {
  if (etas_s.find(self_id_) == etas_s.end()) {
    // Without a usable self trajectory there is no merge to schedule.
    phase_ = MasterPhase::Aborted;
    deadline_.reset();
    return {};
  }
  MergePlanWire plan;
  plan_counter_ += 1;
  plan.plan_id = ((self_id_ & 0xFFFFu) << 16) | (plan_counter_ & 0xFFFFu);
  plan.master_id = self_id_;
  plan.plan_epoch_ms = now_ms;
  plan.entries = compute_merge_order(etas_s, params_.headway_s);
  plan_ = std::move(plan);
  acked_.clear();
  retries_left_ = params_.max_retries;
  phase_ = MasterPhase::ProposalSent;
  deadline_ = now_ms + params_.retransmit_ms;

  StepResult result;
  result.emissions.push_back(
      ProtocolEmission{MessageTag::MergeProposal, *plan_, std::nullopt});
  if (plan_->entries.size() == 1) {
    // Nobody to wait for: the ack set is vacuously complete.
    StepResult committed = commit(now_ms);
    result.emissions.insert(result.emissions.end(),
                            committed.emissions.begin(),
                            committed.emissions.end());
    result.advisory = committed.advisory;
  }
  return result;
}

StepResult MasterMachine::commit(std::uint64_t now_ms) {
  (void)now_ms;
  phase_ = MasterPhase::Committed;
  deadline_.reset();
  StepResult result;
  result.emissions.push_back(
      ProtocolEmission{MessageTag::MergeConfirm, *plan_, std::nullopt});
  const PlanEntryWire* self = find_entry(*plan_, self_id_);
  result.advisory = advisory_for(*plan_, self_id_, self_role_,
                                 static_cast<double>(self->eta_ms) / 1000.0,
                                 params_.slowdown_epsilon_s);
  return result;
}

StepResult MasterMachine::on_timeout(
    std::uint64_t now_ms, const std::map<std::uint32_t, double>& fresh_etas_s) {
  if (!deadline_) {
    throw IllegalTransition("timeout without an armed deadline");
  }
  switch (phase_) {
    case MasterPhase::Collecting:
      return build_and_propose(now_ms, fresh_etas_s);
    case MasterPhase::ProposalSent: {
      if (retries_left_ > 0) {
        retries_left_ -= 1;
        deadline_ = now_ms + params_.retransmit_ms;
        return {{ProtocolEmission{MessageTag::MergeProposal, *plan_,
                                  std::nullopt}},
                std::nullopt};
      }
      // Retries exhausted: drop vehicles that never acked and rebuild.
      std::map<std::uint32_t, double> remaining = fresh_etas_s;
      for (const PlanEntryWire& e : plan_->entries) {
        if (e.vehicle_id == self_id_) continue;
        if (acked_.find(e.vehicle_id) == acked_.end()) {
          remaining.erase(e.vehicle_id);
        }
      }
      bool has_other = false;
      for (const auto& [id, eta] : remaining) {
        if (id != self_id_) {
          has_other = true;
          break;
        }
      }
      if (!has_other) {
        phase_ = MasterPhase::Aborted;
        deadline_.reset();
        return {};
      }
      return build_and_propose(now_ms, remaining);
    }
    default:
      throw IllegalTransition("timeout in phase " +
                              std::string(to_string(phase_)));
  }
}

StepResult MasterMachine::on_ack(std::uint32_t plan_id, std::uint32_t from_id,
                                 std::uint64_t now_ms) {
  if (phase_ != MasterPhase::ProposalSent || !plan_ ||
      plan_->plan_id != plan_id) {
    return {};  // stale or foreign ack
  }
  if (find_entry(*plan_, from_id) == nullptr || from_id == self_id_) {
    return {};
  }
  acked_.insert(from_id);
  for (const PlanEntryWire& e : plan_->entries) {
    if (e.vehicle_id != self_id_ && acked_.find(e.vehicle_id) == acked_.end()) {
      return {};  // still waiting
    }
  }
  return commit(now_ms);
}

void MasterMachine::on_foreign_master(std::uint32_t foreign_id) {
  if (foreign_id >= self_id_ || phase_ == MasterPhase::Idle) {
    return;
  }
  phase_ = MasterPhase::Idle;
  plan_.reset();
  acked_.clear();
  deadline_.reset();
}

StepResult ResponderMachine::on_proposal(const MergePlanWire& plan,
                                         std::uint64_t now_ms) {
  const PlanEntryWire* self = find_entry(plan, self_id_);
  if (self == nullptr) {
    return {};  // plan does not involve this vehicle
  }
  StepResult result;
  result.emissions.push_back(ProtocolEmission{
      MessageTag::ProposalAck, std::nullopt,
      AckPayload{plan.plan_id, self_id_}});
  if (phase_ == ResponderPhase::Committed && plan_ &&
      plan_->plan_id == plan.plan_id) {
    // Late retransmission of the already-committed plan: re-ack only.
    return result;
  }
  plan_ = plan;
  last_acked_plan_id_ = plan.plan_id;
  phase_ = ResponderPhase::AckSent;
  deadline_ = now_ms + params_.expiry_ms();
  return result;
}

StepResult ResponderMachine::on_confirm(std::uint32_t plan_id,
                                        std::uint64_t now_ms) {
  (void)now_ms;
  if (phase_ != ResponderPhase::AckSent || !plan_ ||
      plan_->plan_id != plan_id) {
    return {};  // unknown plan id, or nothing pending
  }
  phase_ = ResponderPhase::Committed;
  deadline_.reset();
  const PlanEntryWire* self = find_entry(*plan_, self_id_);
  StepResult result;
  result.advisory = advisory_for(*plan_, self_id_, self_role_,
                                 static_cast<double>(self->eta_ms) / 1000.0,
                                 params_.slowdown_epsilon_s);
  return result;
}

void ResponderMachine::on_expiry(std::uint64_t now_ms) {
  (void)now_ms;
  if (phase_ != ResponderPhase::AckSent) {
    return;
  }
  phase_ = ResponderPhase::Idle;
  plan_.reset();
  deadline_.reset();
}

}  // namespace mergecoord
