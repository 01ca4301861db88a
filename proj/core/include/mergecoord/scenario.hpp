#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mergecoord/sim.hpp"

namespace mergecoord {

// Raw geometry as written in a scenario file: vertex pairs either in
// local meters or in latitude/longitude degrees with an origin.
struct GeometryConfig {
  enum class Units { Meters, Degrees };

  Units units = Units::Meters;
  std::optional<std::pair<double, double>> origin_latlon;
  std::vector<std::pair<double, double>> freeway;
  std::vector<std::pair<double, double>> ramp;
};

struct ScenarioConfig {
  std::string name = "unnamed";
  GeometryConfig geometry;
  std::vector<VehicleSpec> vehicles;
  SimConfig sim;
};

// Flat keyed text with [geometry], [vehicles], [channel], [protocol] and
// [sim] sections; omitted channel/protocol/sim keys take the documented
// defaults. Throws ScenarioError: Syntax with the line number, Semantic
// for duplicate vehicle ids, out-of-range stations, bad units and
// geometry that fails network construction.
ScenarioConfig parse_scenario(std::string_view text);

// Canonical text form; parse(serialize(parse(x))) == parse(x).
std::string serialize_scenario(const ScenarioConfig& config);

// Resolves geometry into a RoadNetwork and validates vehicles against
// it. Throws ScenarioError (Semantic) on violations.
Scenario build_scenario(const ScenarioConfig& config);

// Synthetic diamond-interchange presets named after the field-test
// exits (27/32/34/36, east- and westbound) plus the staged-conflict
// scenario: a ramp vehicle timed to reach the merge point 0.5 s after
// the lead freeway vehicle, with the follower 75 m behind.
std::vector<std::string> preset_names();
ScenarioConfig preset(std::string_view id);  // throws UnknownPreset

}  // namespace mergecoord
