#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mergecoord/scenario.hpp"

namespace mergecoord {

struct SweepRow {
  double loss = 0.0;
  std::size_t runs = 0;
  double completion_rate = 0.0;
  std::optional<double> mean_latency_ms;   // over completed runs
  std::optional<double> mean_min_gap_s;    // over runs with >= 2 crossings
};

// "start:stop:step", stop inclusive: "0:0.5:0.1" -> 0, 0.1, ..., 0.5.
// Throws ScenarioError (Syntax) on bad shape.
std::vector<double> parse_loss_grid(std::string_view grid);

// N seeded runs per loss value (seed, seed+1, ...); rows ordered by loss.
std::vector<SweepRow> sweep(const ScenarioConfig& base,
                            const std::vector<double>& losses,
                            std::size_t runs_per_point,
                            std::uint64_t base_seed);

// Plot-ready CSV: loss,completion_rate,mean_latency_ms,mean_min_gap_s.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace mergecoord
