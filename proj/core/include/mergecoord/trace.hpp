#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mergecoord/errors.hpp"

namespace mergecoord {

enum class TraceKind {
  BsmTx,
  Rx,
  Drop,
  StateTransition,
  Advisory,
  Crossing,
  Tick,
};

const char* to_string(TraceKind kind);

// One timestamped simulation/protocol event. Line format is
//   time_ms kind vehicle_id key=value ...
// space-separated, one record per line. Detail pairs keep insertion
// order so serialization is byte-stable.
struct TraceRecord {
  std::uint64_t time_ms = 0;
  TraceKind kind = TraceKind::Tick;
  std::uint32_t vehicle_id = 0;
  std::vector<std::pair<std::string, std::string>> detail;

  TraceRecord& with(std::string key, std::string value) {
    detail.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  std::optional<std::string> get(std::string_view key) const;
};

std::string format_record(const TraceRecord& rec);

// Throws ScenarioError (Syntax) naming the 1-based line number.
TraceRecord parse_record(std::string_view line, std::size_t line_no);

std::string format_trace(const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> parse_trace(std::string_view text);

// Fixed-precision float formatting; all trace floats go through this so
// traces stay byte-identical across runs and platforms.
std::string format_fixed(double value, int decimals = 3);

}  // namespace mergecoord
