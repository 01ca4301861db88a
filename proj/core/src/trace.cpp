#include "mergecoord/trace.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace mergecoord {

namespace {

constexpr std::array<const char*, 7> kKindNames = {
    "bsm_tx", "rx", "drop", "state_transition", "advisory", "crossing",
    "tick"};

std::optional<TraceKind> kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (s == kKindNames[i]) {
      return static_cast<TraceKind>(i);
    }
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(TraceKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<std::string> TraceRecord::get(std::string_view key) const {
  for (const auto& [k, v] : detail) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string format_record(const TraceRecord& rec) {
  std::string line = std::to_string(rec.time_ms);
  line += ' ';
  line += to_string(rec.kind);
  line += ' ';
  line += std::to_string(rec.vehicle_id);
  for (const auto& [k, v] : rec.detail) {
    line += ' ';
    line += k;
    line += '=';
    line += v;
  }
  return line;
}

TraceRecord parse_record(std::string_view line, std::size_t line_no) {
  auto fail = [&](const std::string& what) -> ScenarioError {
    return ScenarioError(ScenarioError::Kind::Syntax, what, line_no);
  };
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t next = line.find(' ', pos);
    const std::size_t end = next == std::string_view::npos ? line.size() : next;
    if (end > pos) {
      tokens.push_back(line.substr(pos, end - pos));
    }
    pos = end + 1;
  }
  if (tokens.size() < 3) {
    throw fail("trace record needs time, kind and vehicle id");
  }
  TraceRecord rec;
  auto parse_uint = [&](std::string_view t, std::uint64_t& out) {
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc() && ptr == t.data() + t.size();
  };
  std::uint64_t time = 0;
  if (!parse_uint(tokens[0], time)) {
    throw fail("bad time_ms");
  }
  rec.time_ms = time;
  const auto kind = kind_from_string(tokens[1]);
  if (!kind) {
    throw fail("unknown record kind '" + std::string(tokens[1]) + "'");
  }
  rec.kind = *kind;
  std::uint64_t vid = 0;
  if (!parse_uint(tokens[2], vid) || vid > 0xFFFFFFFFull) {
    throw fail("bad vehicle id");
  }
  rec.vehicle_id = static_cast<std::uint32_t>(vid);
  for (std::size_t i = 3; i < tokens.size(); ++i) {
    const std::size_t eq = tokens[i].find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw fail("detail token without key=value shape");
    }
    rec.detail.emplace_back(std::string(tokens[i].substr(0, eq)),
                            std::string(tokens[i].substr(eq + 1)));
  }
  return rec;
}

std::string format_trace(const std::vector<TraceRecord>& trace) {
  std::string out;
  for (const TraceRecord& rec : trace) {
    out += format_record(rec);
    out += '\n';
  }
  return out;
}

std::vector<TraceRecord> parse_trace(std::string_view text) {
  std::vector<TraceRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t next = text.find('\n', pos);
    const std::size_t end = next == std::string_view::npos ? text.size() : next;
    ++line_no;
    const std::string_view line = text.substr(pos, end - pos);
    if (!line.empty()) {
      out.push_back(parse_record(line, line_no));
    }
    pos = end + 1;
  }
  return out;
}

}  // namespace mergecoord
