#include "mergecoord/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mergecoord/rng.hpp"
#include "mergecoord/trajectory.hpp"

namespace mergecoord {

namespace {

constexpr std::uint64_t kNoiseStreamTag = 1;
constexpr std::uint64_t kChannelStreamTag = 2;

std::uint16_t heading_cdeg_from_tangent(const Point2D& tangent) {
  // Compass heading, clockwise from north.
  const double deg =
      std::fmod(90.0 - std::atan2(tangent.y, tangent.x) * 180.0 /
                           3.14159265358979323846 +
                    720.0,
                360.0);
  const long cdeg = std::lround(deg * 100.0) % 36000;
  return static_cast<std::uint16_t>(cdeg);
}

struct ObservedTrack {
  PathRole path;
  TrajectoryBuffer buf;
};

struct Agent {
  std::uint32_t id;
  PathRole role;          // declared role; ramp agents switch paths at merge
  PathRole current_path;
  double station = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  std::uint32_t seq = 0;
  bool active = true;
  bool entered = false;
  bool crossed = false;
  std::optional<double> crossing_t_s;
  std::optional<Advisory> advisory;
  std::optional<ByteBuffer> committed_plan_bytes;
  std::optional<std::uint64_t> master_retry_at_ms;
  BasicSafetyMessage last_gps;  // most recent own (noisy) sample
  MasterMachine master;
  ResponderMachine responder;
  std::map<std::uint32_t, ObservedTrack> observer;

  Agent(const VehicleSpec& spec, const ProtocolParams& params)
      : id(spec.id),
        role(spec.role),
        current_path(spec.role),
        station(spec.initial_station_m),
        speed(spec.initial_speed_mps),
        master(spec.id, spec.role, params),
        responder(spec.id, spec.role, params) {}
};

class World {
 public:
  explicit World(const Scenario& sc)
      : sc_(sc),
        channel_(sc.sim.channel, derive_seed(sc.sim.seed, kChannelStreamTag)),
        noise_rng_(derive_seed(sc.sim.seed, kNoiseStreamTag)),
        dt_ms_(static_cast<std::uint64_t>(
            std::llround(sc.sim.dt_s * 1000.0))) {
    if (!(sc.sim.dt_s > 0.0) || !(sc.sim.duration_s > 0.0)) {
      throw Error("dt and duration must be positive");
    }
    sc_.sim.protocol.validate();
    for (const VehicleSpec& spec : sc.vehicles) {
      agents_.emplace_back(spec, sc.sim.protocol);
    }
    std::sort(agents_.begin(), agents_.end(),
              [](const Agent& a, const Agent& b) { return a.id < b.id; });
    for (Agent& a : agents_) {
      // Vehicles spawned beyond the merge point never cross it.
      if (a.role == PathRole::Freeway &&
          a.station >= sc_.network.merge_station()) {
        a.crossed = true;
      }
    }
  }

  RunResult run() {
    const std::uint64_t ticks = static_cast<std::uint64_t>(
        std::llround(sc_.sim.duration_s / sc_.sim.dt_s));
    for (std::uint64_t k = 0; k < ticks; ++k) {
      now_ms_ = k * dt_ms_;
      emit_bsms();
      fire_entry_triggers();
      drain_events(now_ms_ + dt_ms_);
      apply_drivers();
      step_physics();
      record_ticks();
    }
    RunResult result;
    result.report = metrics(trace_);
    result.trace = std::move(trace_);
    for (const Agent& a : agents_) {
      AgentSnapshot snap;
      snap.id = a.id;
      snap.role = a.role;
      snap.master_phase = a.master.phase();
      snap.responder_phase = a.responder.phase();
      snap.committed_plan_bytes = a.committed_plan_bytes;
      snap.station = a.station;
      snap.speed = a.speed;
      snap.crossing_time_s = a.crossing_t_s;
      result.agents.push_back(std::move(snap));
    }
    return result;
  }

 private:
  const Polyline& path_of(PathRole role) const {
    return role == PathRole::Ramp ? sc_.network.ramp() : sc_.network.freeway();
  }

  Agent* agent_by_id(std::uint32_t id) {
    for (Agent& a : agents_) {
      if (a.id == id) return &a;
    }
    return nullptr;
  }

  // --- trace helpers ---------------------------------------------------

  void record_transition(std::uint64_t t, const Agent& a, const char* machine,
                         const char* from, const char* to,
                         std::uint32_t plan_id) {
    TraceRecord rec{t, TraceKind::StateTransition, a.id, {}};
    rec.with("machine", machine)
        .with("from", from)
        .with("to", to)
        .with("plan", std::to_string(plan_id));
    trace_.push_back(std::move(rec));
  }

  void record_advisory(std::uint64_t t, const Agent& a, const Advisory& adv) {
    TraceRecord rec{t, TraceKind::Advisory, a.id, {}};
    rec.with("kind", to_string(adv.kind))
        .with("ref", adv.reference_vehicle_id
                         ? std::to_string(*adv.reference_vehicle_id)
                         : "none")
        .with("slot_s", format_fixed(adv.slot_s));
    trace_.push_back(std::move(rec));
  }

  // --- transmission ----------------------------------------------------

  void transmit(Agent& sender, std::uint64_t t, const ProtocolMessage& msg) {
    const ByteBuffer frame = encode_frame(msg);
    TraceRecord rec{t, TraceKind::BsmTx, sender.id, {}};
    rec.with("tag", to_string(msg.tag))
        .with("seq", std::to_string(msg.header.seq))
        .with("frame", to_hex(frame));
    trace_.push_back(std::move(rec));

    std::vector<NodeRef> nodes;
    nodes.reserve(agents_.size());
    Point2D sender_pos;
    for (const Agent& a : agents_) {
      if (!a.active) continue;
      const Point2D pos = true_position(a);
      if (a.id == sender.id) {
        sender_pos = pos;
      }
      nodes.push_back(NodeRef{a.id, pos});
    }
    const auto outcome =
        channel_.broadcast(sender.id, sender_pos, nodes, frame, t);
    for (std::uint32_t lost : outcome.lost_to) {
      TraceRecord drop{t, TraceKind::Drop, lost, {}};
      drop.with("from", std::to_string(sender.id))
          .with("tag", to_string(msg.tag))
          .with("reason", "loss");
      trace_.push_back(std::move(drop));
    }
  }

  ProtocolMessage wrap_emission(Agent& a, std::uint64_t t,
                                const ProtocolEmission& e) {
    ProtocolMessage msg;
    msg.tag = e.tag;
    msg.plan = e.plan;
    msg.ack = e.ack;
    msg.header = a.last_gps;
    msg.header.seq = ++a.seq;
    msg.header.timestamp_ms = t;
    msg.header.speed_cms = quantized_speed(a);
    return msg;
  }

  void send_emissions(Agent& a, std::uint64_t t,
                      const std::vector<ProtocolEmission>& emissions) {
    for (const ProtocolEmission& e : emissions) {
      transmit(a, t, wrap_emission(a, t, e));
    }
  }

  void apply_advisory(Agent& a, std::uint64_t t,
                      const std::optional<Advisory>& adv) {
    if (!adv || !sc_.sim.advisories_enabled) {
      return;
    }
    a.advisory = *adv;
    record_advisory(t, a, *adv);
  }

  Point2D true_position(const Agent& a) const {
    const Polyline& path = path_of(a.current_path);
    return path.at_station(std::clamp(a.station, 0.0, path.length()));
  }

  std::uint16_t quantized_speed(const Agent& a) const {
    const double cms = std::clamp(a.speed * 100.0, 0.0, 65535.0);
    return static_cast<std::uint16_t>(std::lround(cms));
  }

  // --- per-tick stages ---------------------------------------------------

  void emit_bsms() {
    for (Agent& a : agents_) {
      if (!a.active) continue;
      const Polyline& path = path_of(a.current_path);
      const Point2D pos = true_position(a);
      const double nx =
          noise_rng_.next_gaussian(0.0, sc_.sim.bsm_noise_sigma_m);
      const double ny =
          noise_rng_.next_gaussian(0.0, sc_.sim.bsm_noise_sigma_m);

      BasicSafetyMessage bsm;
      bsm.vehicle_id = a.id;
      bsm.seq = ++a.seq;
      bsm.timestamp_ms = now_ms_;
      bsm.pos_x_cm = static_cast<std::int32_t>(std::lround((pos.x + nx) * 100.0));
      bsm.pos_y_cm = static_cast<std::int32_t>(std::lround((pos.y + ny) * 100.0));
      bsm.speed_cms = quantized_speed(a);
      bsm.heading_cdeg = heading_cdeg_from_tangent(
          path.tangent_at(std::clamp(a.station, 0.0, path.length())));
      a.last_gps = bsm;

      ProtocolMessage msg;
      msg.tag = MessageTag::Bsm;
      msg.header = bsm;
      transmit(a, now_ms_, msg);

      // The agent's own GPS reading feeds its observer through the same
      // quantized representation every receiver sees.
      observe(a, bsm);
    }
  }

  void fire_entry_triggers() {
    for (Agent& a : agents_) {
      if (!a.active || a.role != PathRole::Ramp || a.crossed) continue;
      const bool first_entry = !a.entered && a.station >= 0.0;
      const bool retry = a.entered && a.master.phase() == MasterPhase::Idle &&
                         a.responder.phase() == ResponderPhase::Idle &&
                         a.master_retry_at_ms &&
                         now_ms_ >= *a.master_retry_at_ms;
      if (!first_entry && !retry) continue;
      a.entered = true;
      a.master_retry_at_ms.reset();
      const char* from = to_string(a.master.phase());
      const auto emissions = a.master.on_ramp_entry(now_ms_);
      record_transition(now_ms_, a, "master", from,
                        to_string(a.master.phase()), 0);
      send_emissions(a, now_ms_, emissions);
    }
  }

  void drain_events(std::uint64_t tick_end_ms) {
    while (true) {
      std::optional<std::uint64_t> next = channel_.next_delivery_ms();
      for (const Agent& a : agents_) {
        for (const auto deadline :
             {a.master.next_timeout_ms(), a.responder.expiry_deadline_ms()}) {
          if (deadline && (!next || *deadline < *next)) {
            next = deadline;
          }
        }
      }
      if (!next || *next >= tick_end_ms) {
        return;
      }
      const std::uint64_t t = *next;
      for (InFlightPacket& pkt : channel_.poll(t)) {
        deliver(pkt, t);
      }
      for (Agent& a : agents_) {
        if (a.master.next_timeout_ms() && *a.master.next_timeout_ms() <= t) {
          fire_master_timeout(a, t);
        }
        if (a.responder.expiry_deadline_ms() &&
            *a.responder.expiry_deadline_ms() <= t) {
          const char* from = to_string(a.responder.phase());
          a.responder.on_expiry(t);
          record_transition(t, a, "responder", from,
                            to_string(a.responder.phase()), 0);
        }
      }
    }
  }

  void fire_master_timeout(Agent& a, std::uint64_t t) {
    const char* from = to_string(a.master.phase());
    const std::uint32_t plan_before =
        a.master.plan() ? a.master.plan()->plan_id : 0;
    const StepResult result = a.master.on_timeout(t, collect_etas(a, t));
    const std::uint32_t plan_after =
        a.master.plan() ? a.master.plan()->plan_id : 0;
    if (std::string_view(from) != to_string(a.master.phase()) ||
        plan_before != plan_after) {
      record_transition(t, a, "master", from, to_string(a.master.phase()),
                        plan_after);
    }
    send_emissions(a, t, result.emissions);
    if (a.master.phase() == MasterPhase::Committed) {
      a.committed_plan_bytes = encode_plan(*a.master.plan());
    }
    apply_advisory(a, t, result.advisory);
  }

  void observe(Agent& observer, const BasicSafetyMessage& header) {
    const Point2D raw{static_cast<double>(header.pos_x_cm) / 100.0,
                      static_cast<double>(header.pos_y_cm) / 100.0};
    PathRole path;
    PathPosition pos;
    if (header.vehicle_id == observer.id) {
      // Own samples are matched against the path the vehicle knows it
      // is on.
      path = observer.current_path;
      pos = path_of(path).project(raw);
    } else {
      const PathPosition on_ramp = sc_.network.ramp().project(raw);
      const PathPosition on_freeway = sc_.network.freeway().project(raw);
      const double d_ramp = point_distance(raw, sc_.network.ramp(), on_ramp);
      const double d_freeway =
          point_distance(raw, sc_.network.freeway(), on_freeway);
      if (d_ramp < d_freeway) {
        path = PathRole::Ramp;
        pos = on_ramp;
      } else {
        path = PathRole::Freeway;
        pos = on_freeway;
      }
    }
    auto [it, inserted] = observer.observer.try_emplace(
        header.vehicle_id,
        ObservedTrack{path, TrajectoryBuffer(header.vehicle_id, path)});
    ObservedTrack& track = it->second;
    if (track.path != path) {
      track.path = path;
      track.buf.reset(path);
    }
    TrajectorySample sample;
    sample.timestamp_ms = header.timestamp_ms;
    sample.station = pos.station;
    sample.speed = static_cast<double>(header.speed_cms) / 100.0;
    sample.raw_pos = raw;
    track.buf.ingest(sample);
  }

  static double point_distance(const Point2D& q, const Polyline& path,
                               const PathPosition& pos) {
    const Point2D p = path.at_station(pos.station);
    const double dx = q.x - p.x;
    const double dy = q.y - p.y;
    return std::sqrt(dx * dx + dy * dy);
  }

  // Fresh ETAs for plan building: every non-stale observed vehicle with
  // enough history whose extrapolated motion still reaches the merge
  // point, self included.
  std::map<std::uint32_t, double> collect_etas(Agent& a, std::uint64_t t) {
    std::map<std::uint32_t, double> etas;
    for (auto& [id, track] : a.observer) {
      if (track.buf.size() < 2 || track.buf.is_stale(t)) continue;
      const MotionEstimate est = track.buf.estimate_motion();
      const auto smoothed = track.buf.smooth();
      const PathPosition pos{smoothed.back().station, 0.0};
      const auto dist = sc_.network.distance_to_merge(track.path, pos);
      if (!dist) continue;  // already past the merge point
      const auto eta = eta_to_station(*dist, est);
      if (!eta) continue;  // unreachable under current motion
      const double elapsed_s =
          (static_cast<double>(t) - static_cast<double>(est.stamp_ms)) /
          1000.0;
      etas[id] = std::max(0.0, *eta - elapsed_s);
    }
    return etas;
  }

  void deliver(const InFlightPacket& pkt, std::uint64_t t) {
    Agent* rcv = agent_by_id(pkt.receiver_id);
    if (rcv == nullptr || !rcv->active) return;
    ProtocolMessage msg;
    try {
      msg = decode_frame(pkt.frame);
    } catch (const DecodeError&) {
      return;  // cannot happen for frames produced by encode_frame
    }

    TraceRecord rec{t, TraceKind::Rx, rcv->id, {}};
    rec.with("from", std::to_string(msg.header.vehicle_id))
        .with("tag", to_string(msg.tag))
        .with("seq", std::to_string(msg.header.seq))
        .with("len", std::to_string(pkt.frame.size()));
    trace_.push_back(std::move(rec));

    observe(*rcv, msg.header);

    switch (msg.tag) {
      case MessageTag::Bsm:
        break;
      case MessageTag::RampEntryNotify:
        yield_if_junior(*rcv, msg.header.vehicle_id, t);
        break;
      case MessageTag::MergeProposal: {
        yield_if_junior(*rcv, msg.plan->master_id, t);
        if (rcv->master.phase() != MasterPhase::Idle) {
          break;  // active master outranks the proposer; no response
        }
        const char* from = to_string(rcv->responder.phase());
        const StepResult result = rcv->responder.on_proposal(*msg.plan, t);
        if (std::string_view(from) != to_string(rcv->responder.phase())) {
          record_transition(t, *rcv, "responder", from,
                            to_string(rcv->responder.phase()),
                            msg.plan->plan_id);
        }
        send_emissions(*rcv, t, result.emissions);
        break;
      }
      case MessageTag::ProposalAck: {
        const char* from = to_string(rcv->master.phase());
        const StepResult result =
            rcv->master.on_ack(msg.ack->plan_id, msg.ack->acker_id, t);
        if (std::string_view(from) != to_string(rcv->master.phase())) {
          record_transition(t, *rcv, "master", from,
                            to_string(rcv->master.phase()),
                            msg.ack->plan_id);
        }
        send_emissions(*rcv, t, result.emissions);
        if (rcv->master.phase() == MasterPhase::Committed) {
          rcv->committed_plan_bytes = encode_plan(*rcv->master.plan());
        }
        apply_advisory(*rcv, t, result.advisory);
        break;
      }
      case MessageTag::MergeConfirm: {
        const char* from = to_string(rcv->responder.phase());
        const StepResult result =
            rcv->responder.on_confirm(msg.plan->plan_id, t);
        if (std::string_view(from) != to_string(rcv->responder.phase())) {
          record_transition(t, *rcv, "responder", from,
                            to_string(rcv->responder.phase()),
                            msg.plan->plan_id);
        }
        if (rcv->responder.phase() == ResponderPhase::Committed &&
            rcv->responder.plan()) {
          rcv->committed_plan_bytes = encode_plan(*rcv->responder.plan());
        }
        apply_advisory(*rcv, t, result.advisory);
        break;
      }
    }
  }

  void yield_if_junior(Agent& a, std::uint32_t foreign_master_id,
                       std::uint64_t t) {
    if (a.master.phase() == MasterPhase::Idle) return;
    const char* from = to_string(a.master.phase());
    a.master.on_foreign_master(foreign_master_id);
    if (a.master.phase() == MasterPhase::Idle) {
      record_transition(t, a, "master", from, "Idle", 0);
      a.master_retry_at_ms = t + sc_.sim.protocol.expiry_ms();
    }
  }

  void apply_drivers() {
    const double now_s = static_cast<double>(now_ms_) / 1000.0;
    for (Agent& a : agents_) {
      if (!a.active) continue;
      const auto dist = sc_.network.distance_to_merge(
          a.current_path, PathPosition{a.station, 0.0});
      std::optional<double> gap;
      for (const Agent& other : agents_) {
        if (other.id == a.id || !other.active ||
            other.current_path != a.current_path) {
          continue;
        }
        const double ahead = other.station - a.station;
        if (ahead > 0.0 && (!gap || ahead < *gap)) {
          gap = ahead;
        }
      }
      a.accel = driver_accel(a.advisory, dist.value_or(0.0), a.speed, now_s,
                             gap, sc_.driver);
    }
  }

  void step_physics() {
    const std::uint64_t tick_end = now_ms_ + dt_ms_;
    for (Agent& a : agents_) {
      if (!a.active) continue;
      const double prev = a.station;
      const KinematicState next = step_kinematics(
          {a.station, a.speed}, a.accel, sc_.sim.dt_s, sc_.driver.v_max);
      a.station = next.station;
      a.speed = next.speed;

      const double boundary = a.current_path == PathRole::Ramp
                                  ? sc_.network.ramp().length()
                                  : sc_.network.merge_station();
      if (!a.crossed && prev < boundary && a.station >= boundary) {
        const double frac =
            a.station > prev ? (boundary - prev) / (a.station - prev) : 1.0;
        const double t_cross_ms =
            static_cast<double>(now_ms_) + frac * static_cast<double>(dt_ms_);
        a.crossed = true;
        a.crossing_t_s = t_cross_ms / 1000.0;
        a.advisory.reset();
        TraceRecord rec{tick_end, TraceKind::Crossing, a.id, {}};
        rec.with("t_ms", format_fixed(t_cross_ms))
            .with("path", to_string(a.current_path));
        trace_.push_back(std::move(rec));
        if (a.current_path == PathRole::Ramp) {
          a.current_path = PathRole::Freeway;
          a.station = sc_.network.merge_station() +
                      (a.station - sc_.network.ramp().length());
        }
      }
      if (a.station >= path_of(a.current_path).length()) {
        a.active = false;  // drove off the modeled network
      }
    }
  }

  void record_ticks() {
    const std::uint64_t tick_end = now_ms_ + dt_ms_;
    for (const Agent& a : agents_) {
      if (!a.active) continue;
      TraceRecord rec{tick_end, TraceKind::Tick, a.id, {}};
      rec.with("station", format_fixed(a.station))
          .with("speed", format_fixed(a.speed))
          .with("accel", format_fixed(a.accel))
          .with("path", to_string(a.current_path));
      trace_.push_back(std::move(rec));
    }
  }

  Scenario sc_;
  BroadcastChannel channel_;
  DeterministicRng noise_rng_;
  std::uint64_t dt_ms_;
  std::uint64_t now_ms_ = 0;
  std::vector<Agent> agents_;
  std::vector<TraceRecord> trace_;
};

}  // namespace

KinematicState step_kinematics(const KinematicState& st, double accel_mps2,
                               double dt_s, double v_max) {
  KinematicState out = st;
  const double v_next = st.speed + accel_mps2 * dt_s;
  if (v_next < 0.0) {
    // Stop mid-tick; advance only up to the stop point.
    const double t_stop = accel_mps2 < 0.0 ? st.speed / -accel_mps2 : 0.0;
    out.station +=
        st.speed * t_stop + 0.5 * accel_mps2 * t_stop * t_stop;
    out.speed = 0.0;
    return out;
  }
  out.station += st.speed * dt_s + 0.5 * accel_mps2 * dt_s * dt_s;
  out.speed = std::min(v_next, v_max);
  return out;
}

double driver_accel(const std::optional<Advisory>& advisory,
                    double distance_to_merge_m, double speed_mps, double now_s,
                    std::optional<double> predecessor_gap_m,
                    const DriverParams& params) {
  if (predecessor_gap_m && *predecessor_gap_m < params.min_gap) {
    return -2.0 * params.b_comfort;  // emergency override
  }
  if (!advisory || advisory->kind == AdvisoryKind::MaintainSpeed) {
    return 0.0;
  }
  const double remaining_s = advisory->slot_s - now_s;
  if (remaining_s <= 0.0) {
    return 0.0;
  }
  const double v_target = distance_to_merge_m / remaining_s;
  constexpr double kTimeConstantS = 1.0;
  const double command = 2.0 * (v_target - speed_mps) / kTimeConstantS;
  return std::clamp(command, -params.b_comfort, params.a_max);
}

RunResult run(const Scenario& scenario) {
  World world(scenario);
  return world.run();
}

SummaryReport metrics(const std::vector<TraceRecord>& trace) {
  SummaryReport report;
  std::optional<std::uint64_t> first_notify;
  std::optional<std::uint64_t> first_confirm;
  std::vector<double> crossings_ms;

  for (const TraceRecord& rec : trace) {
    switch (rec.kind) {
      case TraceKind::BsmTx: {
        const auto tag = rec.get("tag");
        if (!tag) break;
        report.messages_tx[*tag] += 1;
        if (*tag == "RAMP_ENTRY_NOTIFY" && !first_notify) {
          first_notify = rec.time_ms;
        }
        if (*tag == "MERGE_CONFIRM" && !first_confirm) {
          first_confirm = rec.time_ms;
        }
        break;
      }
      case TraceKind::Rx: {
        const auto tag = rec.get("tag");
        if (tag) report.messages_rx[*tag] += 1;
        break;
      }
      case TraceKind::Crossing: {
        const auto t = rec.get("t_ms");
        if (t) crossings_ms.push_back(std::stod(*t));
        break;
      }
      case TraceKind::Advisory: {
        AdvisoryLogEntry entry;
        entry.vehicle_id = rec.vehicle_id;
        const auto kind = rec.get("kind");
        if (kind) {
          if (*kind == "SlowDown") entry.kind = AdvisoryKind::SlowDown;
          else if (*kind == "MergeBehind") entry.kind = AdvisoryKind::MergeBehind;
          else if (*kind == "MergeAhead") entry.kind = AdvisoryKind::MergeAhead;
          else entry.kind = AdvisoryKind::MaintainSpeed;
        }
        const auto ref = rec.get("ref");
        if (ref && *ref != "none") {
          entry.reference_vehicle_id =
              static_cast<std::uint32_t>(std::stoul(*ref));
        }
        const auto slot = rec.get("slot_s");
        if (slot) entry.slot_s = std::stod(*slot);
        report.advisories.push_back(entry);
        break;
      }
      default:
        break;
    }
  }

  report.protocol_completed = first_confirm.has_value();
  if (first_notify && first_confirm && *first_confirm >= *first_notify) {
    report.completion_latency_ms = *first_confirm - *first_notify;
  }
  report.crossings = crossings_ms.size();
  if (crossings_ms.size() >= 2) {
    std::sort(crossings_ms.begin(), crossings_ms.end());
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < crossings_ms.size(); ++i) {
      min_gap = std::min(min_gap, crossings_ms[i] - crossings_ms[i - 1]);
    }
    report.min_merge_gap_s = min_gap / 1000.0;
    report.conflict = report.min_merge_gap_s < kConflictGapS;
  }
  return report;
}

std::string format_summary(const SummaryReport& report) {
  std::string out;
  out += "protocol_completed: ";
  out += report.protocol_completed ? "true" : "false";
  out += '\n';
  out += "completion_latency_ms: ";
  out += report.completion_latency_ms
             ? std::to_string(*report.completion_latency_ms)
             : "none";
  out += '\n';
  auto emit_counts = [&](const char* label,
                         const std::map<std::string, std::uint64_t>& counts) {
    out += label;
    out += ':';
    if (counts.empty()) {
      out += " none";
    }
    for (const auto& [tag, n] : counts) {
      out += ' ';
      out += tag;
      out += '=';
      out += std::to_string(n);
    }
    out += '\n';
  };
  emit_counts("messages_tx", report.messages_tx);
  emit_counts("messages_rx", report.messages_rx);
  out += "crossings: " + std::to_string(report.crossings) + '\n';
  out += "min_merge_gap_s: ";
  out += report.min_merge_gap_s ? format_fixed(*report.min_merge_gap_s)
                                : "none";
  out += '\n';
  out += "conflict: ";
  out += report.conflict ? "true" : "false";
  out += '\n';
  out += "advisories: " + std::to_string(report.advisories.size()) + '\n';
  for (const AdvisoryLogEntry& adv : report.advisories) {
    out += "advisory: vehicle=" + std::to_string(adv.vehicle_id);
    out += " kind=";
    out += to_string(adv.kind);
    out += " ref=";
    out += adv.reference_vehicle_id
               ? std::to_string(*adv.reference_vehicle_id)
               : "none";
    out += " slot_s=" + format_fixed(adv.slot_s);
    out += '\n';
  }
  return out;
}

}  // namespace mergecoord
