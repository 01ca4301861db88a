// merge-coord: cooperative on-ramp merge coordination simulator.
//
// Verbs:
//   run     simulate a scenario file or preset, write the trace, print
//           the summary
//   sweep   loss-rate sweep over seeded runs, CSV output
//   report  recompute a summary from an existing trace file
//   presets list built-in scenario presets

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mergecoord/scenario.hpp"
#include "mergecoord/sim.hpp"
#include "mergecoord/sweep.hpp"
#include "mergecoord/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::ios_base::failure("cannot read " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::ios_base::failure("cannot write " + path);
  }
  out << content;
  if (!out) {
    throw std::ios_base::failure("write failed for " + path);
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* value = std::getenv("MERGE_COORD_SEED");
  if (value == nullptr || *value == '\0') {
    return std::nullopt;
  }
  return std::strtoull(value, nullptr, 10);
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> loss;
  std::optional<double> range;
  std::optional<std::uint32_t> latency;
  std::optional<double> headway;
  std::optional<double> noise;
  bool no_advisories = false;
};

mergecoord::ScenarioConfig load_config(const std::string& scenario_path,
                                       const std::string& preset_name,
                                       const Overrides& ov) {
  mergecoord::ScenarioConfig cfg;
  if (!preset_name.empty()) {
    cfg = mergecoord::preset(preset_name);
  } else {
    cfg = mergecoord::parse_scenario(read_file(scenario_path));
  }
  if (ov.seed) {
    cfg.sim.seed = *ov.seed;
  } else if (const auto seed = env_seed()) {
    cfg.sim.seed = *seed;
  }
  if (ov.loss) cfg.sim.channel.loss_prob = *ov.loss;
  if (ov.range) cfg.sim.channel.range_m = *ov.range;
  if (ov.latency) cfg.sim.channel.latency_ms = *ov.latency;
  if (ov.headway) cfg.sim.protocol.headway_s = *ov.headway;
  if (ov.noise) cfg.sim.bsm_noise_sigma_m = *ov.noise;
  if (ov.no_advisories) cfg.sim.advisories_enabled = false;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative freeway merge coordination simulator"};
  app.require_subcommand(1);

  // --- run -------------------------------------------------------------
  auto* cmd_run = app.add_subcommand("run", "simulate one scenario");
  std::string run_scenario, run_preset, run_out = "trace.log";
  Overrides run_ov;
  std::uint64_t seed_flag = 0;
  double loss_flag = 0, range_flag = 0, headway_flag = 0, noise_flag = 0;
  std::uint32_t latency_flag = 0;
  auto* scenario_opt =
      cmd_run->add_option("--scenario", run_scenario, "scenario file");
  auto* preset_opt =
      cmd_run->add_option("--preset", run_preset, "preset name");
  scenario_opt->excludes(preset_opt);
  cmd_run->add_option("--out", run_out, "trace output path");
  auto* seed_opt = cmd_run->add_option("--seed", seed_flag, "RNG seed");
  auto* loss_opt =
      cmd_run->add_option("--loss", loss_flag, "loss probability [0,1]");
  auto* range_opt = cmd_run->add_option("--range", range_flag, "radio range m");
  auto* latency_opt =
      cmd_run->add_option("--latency", latency_flag, "delivery latency ms");
  auto* headway_opt =
      cmd_run->add_option("--headway", headway_flag, "slot headway s");
  auto* noise_opt =
      cmd_run->add_option("--noise", noise_flag, "BSM position noise sigma m");
  cmd_run->add_flag("--no-advisories", run_ov.no_advisories,
                    "run the protocol but do not steer drivers");

  // --- sweep -----------------------------------------------------------
  auto* cmd_sweep = app.add_subcommand("sweep", "loss-rate sweep, CSV output");
  std::string sweep_preset, sweep_grid = "0:0.5:0.1", sweep_out;
  std::size_t sweep_runs = 20;
  std::uint64_t sweep_seed_flag = 0;
  cmd_sweep->add_option("--preset", sweep_preset, "preset name")->required();
  cmd_sweep->add_option("--loss-grid", sweep_grid, "start:stop:step");
  cmd_sweep->add_option("--runs", sweep_runs, "seeded runs per loss value");
  auto* sweep_seed_opt =
      cmd_sweep->add_option("--seed", sweep_seed_flag, "base seed");
  cmd_sweep->add_option("--out", sweep_out, "CSV path (default stdout)");

  // --- report ----------------------------------------------------------
  auto* cmd_report =
      app.add_subcommand("report", "recompute a summary from a trace file");
  std::string report_path;
  cmd_report->add_option("trace", report_path, "trace file")->required();

  // --- presets ---------------------------------------------------------
  auto* cmd_presets = app.add_subcommand("presets", "list built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (cmd_run->parsed()) {
      if (run_scenario.empty() && run_preset.empty()) {
        std::cerr << "run needs --scenario or --preset\n";
        return kExitValidation;
      }
      if (*seed_opt) run_ov.seed = seed_flag;
      if (*loss_opt) run_ov.loss = loss_flag;
      if (*range_opt) run_ov.range = range_flag;
      if (*latency_opt) run_ov.latency = latency_flag;
      if (*headway_opt) run_ov.headway = headway_flag;
      if (*noise_opt) run_ov.noise = noise_flag;
      const auto cfg = load_config(run_scenario, run_preset, run_ov);
      const auto result = mergecoord::run(mergecoord::build_scenario(cfg));
      write_file(run_out, mergecoord::format_trace(result.trace));
      std::cout << mergecoord::format_summary(result.report);
      return kExitOk;
    }

    if (cmd_sweep->parsed()) {
      auto cfg = mergecoord::preset(sweep_preset);
      std::uint64_t base_seed = cfg.sim.seed;
      if (*sweep_seed_opt) base_seed = sweep_seed_flag;
      else if (const auto seed = env_seed()) base_seed = *seed;
      const auto losses = mergecoord::parse_loss_grid(sweep_grid);
      const auto rows =
          mergecoord::sweep(cfg, losses, sweep_runs, base_seed);
      const std::string csv = mergecoord::sweep_to_csv(rows);
      if (sweep_out.empty()) {
        std::cout << csv;
      } else {
        write_file(sweep_out, csv);
      }
      return kExitOk;
    }

    if (cmd_report->parsed()) {
      const std::string text = read_file(report_path);
      const auto trace = mergecoord::parse_trace(text);
      std::cout << mergecoord::format_summary(mergecoord::metrics(trace));
      return kExitOk;
    }

    if (cmd_presets->parsed()) {
      for (const std::string& name : mergecoord::preset_names()) {
        std::cout << name << '\n';
      }
      return kExitOk;
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const mergecoord::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
