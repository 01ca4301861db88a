#include "mergecoord/sweep.hpp"

#include <charconv>

#include "mergecoord/trace.hpp"

namespace mergecoord {

namespace {

double parse_number(std::string_view t) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ScenarioError(ScenarioError::Kind::Syntax,
                        "bad number '" + std::string(t) + "' in loss grid");
  }
  return v;
}

}  // namespace

std::vector<double> parse_loss_grid(std::string_view grid) {
  const std::size_t c1 = grid.find(':');
  const std::size_t c2 = c1 == std::string_view::npos
                             ? std::string_view::npos
                             : grid.find(':', c1 + 1);
  if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
    throw ScenarioError(ScenarioError::Kind::Syntax,
                        "loss grid must be start:stop:step");
  }
  const double start = parse_number(grid.substr(0, c1));
  const double stop = parse_number(grid.substr(c1 + 1, c2 - c1 - 1));
  const double step = parse_number(grid.substr(c2 + 1));
  if (!(step > 0.0) || stop < start) {
    throw ScenarioError(ScenarioError::Kind::Syntax,
                        "loss grid needs step > 0 and stop >= start");
  }
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double v = start + static_cast<double>(k) * step;
    if (v > stop + step * 1e-9) break;
    out.push_back(v);
  }
  return out;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base,
                            const std::vector<double>& losses,
                            std::size_t runs_per_point,
                            std::uint64_t base_seed) {
  std::vector<SweepRow> rows;
  rows.reserve(losses.size());
  for (const double loss : losses) {
    SweepRow row;
    row.loss = loss;
    row.runs = runs_per_point;
    std::size_t completed = 0;
    double latency_sum = 0.0;
    std::size_t latency_n = 0;
    double gap_sum = 0.0;
    std::size_t gap_n = 0;
    for (std::size_t i = 0; i < runs_per_point; ++i) {
      ScenarioConfig cfg = base;
      cfg.sim.channel.loss_prob = loss;
      cfg.sim.seed = base_seed + i;
      const RunResult result = run(build_scenario(cfg));
      if (result.report.protocol_completed) {
        ++completed;
        if (result.report.completion_latency_ms) {
          latency_sum += static_cast<double>(
              *result.report.completion_latency_ms);
          ++latency_n;
        }
      }
      if (result.report.min_merge_gap_s) {
        gap_sum += *result.report.min_merge_gap_s;
        ++gap_n;
      }
    }
    row.completion_rate =
        runs_per_point == 0
            ? 0.0
            : static_cast<double>(completed) / static_cast<double>(runs_per_point);
    if (latency_n > 0) {
      row.mean_latency_ms = latency_sum / static_cast<double>(latency_n);
    }
    if (gap_n > 0) {
      row.mean_min_gap_s = gap_sum / static_cast<double>(gap_n);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "loss,completion_rate,mean_latency_ms,mean_min_gap_s\n";
  for (const SweepRow& row : rows) {
    out += format_fixed(row.loss, 3);
    out += ',';
    out += format_fixed(row.completion_rate, 4);
    out += ',';
    out += row.mean_latency_ms ? format_fixed(*row.mean_latency_ms, 3) : "nan";
    out += ',';
    out += row.mean_min_gap_s ? format_fixed(*row.mean_min_gap_s, 3) : "nan";
    out += '\n';
  }
  return out;
}

}  // namespace mergecoord
