#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mergecoord/geometry.hpp"
#include "mergecoord/protocol.hpp"
#include "mergecoord/radio.hpp"
#include "mergecoord/trace.hpp"

namespace mergecoord {

// Rule-based driver limits. Comfort braking may be doubled for the
// emergency gap override.
struct DriverParams {
  double a_max = 1.0;       // m/s^2
  double b_comfort = 1.5;   // m/s^2
  double v_max = 35.0;      // m/s
  double min_gap = 10.0;    // m
};

struct VehicleSpec {
  std::uint32_t id = 0;
  PathRole role = PathRole::Freeway;
  double initial_station_m = 0.0;
  double initial_speed_mps = 0.0;
};

struct SimConfig {
  double dt_s = 0.1;  // physics tick, equals the 10 Hz BSM cadence
  double duration_s = 60.0;
  std::uint64_t seed = 1;
  double bsm_noise_sigma_m = 1.0;
  ChannelConfig channel;
  ProtocolParams protocol;
  bool advisories_enabled = true;
};

// A fully-built runnable scenario (geometry resolved into a network).
struct Scenario {
  std::string name;
  RoadNetwork network;
  std::vector<VehicleSpec> vehicles;
  SimConfig sim;
  DriverParams driver;
};

struct KinematicState {
  double station = 0.0;
  double speed = 0.0;
};

// station += v dt + a dt^2 / 2 with speed clamped to [0, v_max]; when
// the update would drive the speed negative, the station advance uses
// the truncated stop time instead.
KinematicState step_kinematics(const KinematicState& st, double accel_mps2,
                               double dt_s, double v_max);

// Advisory-tracking proportional controller with a 1 s time constant:
// aim for v_target = distance / (slot - now), clamped to comfort limits.
// A same-path predecessor inside min_gap overrides everything with
// emergency braking at twice the comfort rate.
double driver_accel(const std::optional<Advisory>& advisory,
                    double distance_to_merge_m, double speed_mps, double now_s,
                    std::optional<double> predecessor_gap_m,
                    const DriverParams& params);

struct AdvisoryLogEntry {
  std::uint32_t vehicle_id = 0;
  AdvisoryKind kind = AdvisoryKind::MaintainSpeed;
  std::optional<std::uint32_t> reference_vehicle_id;
  double slot_s = 0.0;

  bool operator==(const AdvisoryLogEntry&) const = default;
};

// Crossings closer than this are counted as a merge conflict.
inline constexpr double kConflictGapS = 1.0;

struct SummaryReport {
  bool protocol_completed = false;
  std::optional<std::uint64_t> completion_latency_ms;
  std::map<std::string, std::uint64_t> messages_tx;
  std::map<std::string, std::uint64_t> messages_rx;
  std::size_t crossings = 0;
  std::optional<double> min_merge_gap_s;
  bool conflict = false;
  std::vector<AdvisoryLogEntry> advisories;

  bool operator==(const SummaryReport&) const = default;
};

std::string format_summary(const SummaryReport& report);

// End-of-run view of one agent, for inspection and agreement checks.
struct AgentSnapshot {
  std::uint32_t id = 0;
  PathRole role = PathRole::Freeway;
  MasterPhase master_phase = MasterPhase::Idle;
  ResponderPhase responder_phase = ResponderPhase::Idle;
  std::optional<ByteBuffer> committed_plan_bytes;
  double station = 0.0;
  double speed = 0.0;
  std::optional<double> crossing_time_s;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  SummaryReport report;
  std::vector<AgentSnapshot> agents;
};

// Discrete-time world loop: 100 ms physics ticks with millisecond
// message delivery and protocol timers resolved inside each tick.
RunResult run(const Scenario& scenario);

// Pure fold over trace records; cmd_report recomputes the same summary
// from a trace file alone.
SummaryReport metrics(const std::vector<TraceRecord>& trace);

}  // namespace mergecoord
