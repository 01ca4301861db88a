#include "mergecoord/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace mergecoord {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Shortest representation that parses back to the same double.
std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    if (end > pos) out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

double parse_double(std::string_view t, std::size_t line_no) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ScenarioError(ScenarioError::Kind::Syntax,
                        "expected a number, got '" + std::string(t) + "'",
                        line_no);
  }
  return v;
}

std::uint64_t parse_uint(std::string_view t, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ScenarioError(ScenarioError::Kind::Syntax,
                        "expected an unsigned integer, got '" + std::string(t) +
                            "'",
                        line_no);
  }
  return v;
}

std::pair<double, double> parse_pair(std::string_view t, std::size_t line_no) {
  const std::size_t comma = t.find(',');
  if (comma == std::string_view::npos) {
    throw ScenarioError(ScenarioError::Kind::Syntax,
                        "expected x,y pair, got '" + std::string(t) + "'",
                        line_no);
  }
  return {parse_double(t.substr(0, comma), line_no),
          parse_double(t.substr(comma + 1), line_no)};
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig cfg;
  enum class Section { Top, Geometry, Vehicles, Channel, Protocol, Sim };
  Section section = Section::Top;
  std::size_t line_no = 0;
  std::size_t pos = 0;

  while (pos <= text.size()) {
    const std::size_t next = text.find('\n', pos);
    const std::size_t end = next == std::string_view::npos ? text.size() : next;
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (const std::size_t hash = line.find('#');
        hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto tokens = split_ws(line);
    if (tokens.empty()) {
      if (next == std::string_view::npos) break;
      continue;
    }

    if (tokens[0].front() == '[') {
      if (tokens.size() != 1 || tokens[0].back() != ']') {
        throw ScenarioError(ScenarioError::Kind::Syntax,
                            "malformed section header", line_no);
      }
      const std::string_view name = tokens[0].substr(1, tokens[0].size() - 2);
      if (name == "geometry") section = Section::Geometry;
      else if (name == "vehicles") section = Section::Vehicles;
      else if (name == "channel") section = Section::Channel;
      else if (name == "protocol") section = Section::Protocol;
      else if (name == "sim") section = Section::Sim;
      else {
        throw ScenarioError(ScenarioError::Kind::Syntax,
                            "unknown section [" + std::string(name) + "]",
                            line_no);
      }
      if (next == std::string_view::npos) break;
      continue;
    }

    const std::string_view key = tokens[0];
    switch (section) {
      case Section::Top:
        if (key == "name" && tokens.size() == 2) {
          cfg.name = std::string(tokens[1]);
        } else {
          throw ScenarioError(ScenarioError::Kind::Syntax,
                              "unexpected key '" + std::string(key) +
                                  "' before any section",
                              line_no);
        }
        break;
      case Section::Geometry:
        if (key == "units" && tokens.size() == 2) {
          if (tokens[1] == "meters") {
            cfg.geometry.units = GeometryConfig::Units::Meters;
          } else if (tokens[1] == "degrees") {
            cfg.geometry.units = GeometryConfig::Units::Degrees;
          } else {
            throw ScenarioError(ScenarioError::Kind::Semantic,
                                "units must be meters or degrees", line_no);
          }
        } else if (key == "origin" && tokens.size() == 3) {
          cfg.geometry.origin_latlon = {parse_double(tokens[1], line_no),
                                        parse_double(tokens[2], line_no)};
        } else if (key == "freeway" || key == "ramp") {
          auto& verts =
              key == "freeway" ? cfg.geometry.freeway : cfg.geometry.ramp;
          for (std::size_t i = 1; i < tokens.size(); ++i) {
            verts.push_back(parse_pair(tokens[i], line_no));
          }
        } else {
          throw ScenarioError(ScenarioError::Kind::Syntax,
                              "unknown geometry key '" + std::string(key) + "'",
                              line_no);
        }
        break;
      case Section::Vehicles: {
        if (key != "vehicle" || tokens.size() != 5) {
          throw ScenarioError(
              ScenarioError::Kind::Syntax,
              "expected: vehicle <id> <ramp|freeway> <station_m> <speed_mps>",
              line_no);
        }
        VehicleSpec v;
        v.id = static_cast<std::uint32_t>(parse_uint(tokens[1], line_no));
        if (tokens[2] == "ramp") v.role = PathRole::Ramp;
        else if (tokens[2] == "freeway") v.role = PathRole::Freeway;
        else {
          throw ScenarioError(ScenarioError::Kind::Semantic,
                              "role must be ramp or freeway", line_no);
        }
        v.initial_station_m = parse_double(tokens[3], line_no);
        v.initial_speed_mps = parse_double(tokens[4], line_no);
        cfg.vehicles.push_back(v);
        break;
      }
      case Section::Channel:
        if (key == "range" && tokens.size() == 2) {
          cfg.sim.channel.range_m = parse_double(tokens[1], line_no);
        } else if (key == "loss" && tokens.size() == 2) {
          cfg.sim.channel.loss_prob = parse_double(tokens[1], line_no);
        } else if (key == "latency" && tokens.size() == 2) {
          cfg.sim.channel.latency_ms =
              static_cast<std::uint32_t>(parse_uint(tokens[1], line_no));
        } else {
          throw ScenarioError(ScenarioError::Kind::Syntax,
                              "unknown channel key '" + std::string(key) + "'",
                              line_no);
        }
        break;
      case Section::Protocol:
        if (key == "headway" && tokens.size() == 2) {
          cfg.sim.protocol.headway_s = parse_double(tokens[1], line_no);
        } else if (key == "collect_window" && tokens.size() == 2) {
          cfg.sim.protocol.collect_window_s = parse_double(tokens[1], line_no);
        } else if (key == "retransmit_ms" && tokens.size() == 2) {
          cfg.sim.protocol.retransmit_ms =
              static_cast<std::uint32_t>(parse_uint(tokens[1], line_no));
        } else if (key == "max_retries" && tokens.size() == 2) {
          cfg.sim.protocol.max_retries =
              static_cast<std::uint32_t>(parse_uint(tokens[1], line_no));
        } else if (key == "slowdown_epsilon" && tokens.size() == 2) {
          cfg.sim.protocol.slowdown_epsilon_s =
              parse_double(tokens[1], line_no);
        } else {
          throw ScenarioError(ScenarioError::Kind::Syntax,
                              "unknown protocol key '" + std::string(key) + "'",
                              line_no);
        }
        break;
      case Section::Sim:
        if (key == "dt" && tokens.size() == 2) {
          cfg.sim.dt_s = parse_double(tokens[1], line_no);
        } else if (key == "duration" && tokens.size() == 2) {
          cfg.sim.duration_s = parse_double(tokens[1], line_no);
        } else if (key == "seed" && tokens.size() == 2) {
          cfg.sim.seed = parse_uint(tokens[1], line_no);
        } else if (key == "noise" && tokens.size() == 2) {
          cfg.sim.bsm_noise_sigma_m = parse_double(tokens[1], line_no);
        } else if (key == "advisories" && tokens.size() == 2) {
          if (tokens[1] == "on") cfg.sim.advisories_enabled = true;
          else if (tokens[1] == "off") cfg.sim.advisories_enabled = false;
          else {
            throw ScenarioError(ScenarioError::Kind::Semantic,
                                "advisories must be on or off", line_no);
          }
        } else {
          throw ScenarioError(ScenarioError::Kind::Syntax,
                              "unknown sim key '" + std::string(key) + "'",
                              line_no);
        }
        break;
    }
    if (next == std::string_view::npos) break;
  }

  build_scenario(cfg);  // full validation; result discarded
  return cfg;
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  std::string out;
  out += "name " + cfg.name + "\n\n[geometry]\n";
  out += "units ";
  out += cfg.geometry.units == GeometryConfig::Units::Meters ? "meters"
                                                             : "degrees";
  out += '\n';
  if (cfg.geometry.origin_latlon) {
    out += "origin " + num(cfg.geometry.origin_latlon->first) + ' ' +
           num(cfg.geometry.origin_latlon->second) + '\n';
  }
  auto emit_path = [&](const char* key,
                       const std::vector<std::pair<double, double>>& verts) {
    out += key;
    for (const auto& [x, y] : verts) {
      out += ' ' + num(x) + ',' + num(y);
    }
    out += '\n';
  };
  emit_path("freeway", cfg.geometry.freeway);
  emit_path("ramp", cfg.geometry.ramp);

  out += "\n[vehicles]\n";
  for (const VehicleSpec& v : cfg.vehicles) {
    out += "vehicle " + std::to_string(v.id) + ' ' + to_string(v.role) + ' ' +
           num(v.initial_station_m) + ' ' + num(v.initial_speed_mps) + '\n';
  }

  out += "\n[channel]\n";
  out += "range " + num(cfg.sim.channel.range_m) + '\n';
  out += "loss " + num(cfg.sim.channel.loss_prob) + '\n';
  out += "latency " + std::to_string(cfg.sim.channel.latency_ms) + '\n';

  out += "\n[protocol]\n";
  out += "headway " + num(cfg.sim.protocol.headway_s) + '\n';
  out += "collect_window " + num(cfg.sim.protocol.collect_window_s) + '\n';
  out += "retransmit_ms " + std::to_string(cfg.sim.protocol.retransmit_ms) +
         '\n';
  out += "max_retries " + std::to_string(cfg.sim.protocol.max_retries) + '\n';
  out += "slowdown_epsilon " + num(cfg.sim.protocol.slowdown_epsilon_s) + '\n';

  out += "\n[sim]\n";
  out += "dt " + num(cfg.sim.dt_s) + '\n';
  out += "duration " + num(cfg.sim.duration_s) + '\n';
  out += "seed " + std::to_string(cfg.sim.seed) + '\n';
  out += "noise " + num(cfg.sim.bsm_noise_sigma_m) + '\n';
  out += "advisories ";
  out += cfg.sim.advisories_enabled ? "on" : "off";
  out += '\n';
  return out;
}

Scenario build_scenario(const ScenarioConfig& cfg) {
  auto semantic = [](const std::string& what) {
    return ScenarioError(ScenarioError::Kind::Semantic, what);
  };
  if (cfg.geometry.freeway.size() < 2 || cfg.geometry.ramp.size() < 2) {
    throw semantic("geometry needs freeway and ramp with >= 2 vertices each");
  }
  if (cfg.geometry.units == GeometryConfig::Units::Degrees &&
      !cfg.geometry.origin_latlon) {
    throw semantic("units degrees requires an origin");
  }

  auto to_points = [&](const std::vector<std::pair<double, double>>& verts) {
    std::vector<Point2D> pts;
    pts.reserve(verts.size());
    for (const auto& [a, b] : verts) {
      if (cfg.geometry.units == GeometryConfig::Units::Degrees) {
        pts.push_back(latlon_to_local(a, b, cfg.geometry.origin_latlon->first,
                                      cfg.geometry.origin_latlon->second));
      } else {
        pts.push_back(Point2D{a, b});
      }
    }
    return pts;
  };

  try {
    Polyline freeway(to_points(cfg.geometry.freeway));
    Polyline ramp(to_points(cfg.geometry.ramp));
    RoadNetwork network(std::move(freeway), std::move(ramp));

    std::set<std::uint32_t> ids;
    for (const VehicleSpec& v : cfg.vehicles) {
      if (!ids.insert(v.id).second) {
        throw semantic("duplicate vehicle id " + std::to_string(v.id));
      }
      const double limit = v.role == PathRole::Ramp
                               ? network.ramp().length()
                               : network.freeway().length();
      if (!(v.initial_station_m >= 0.0) || v.initial_station_m > limit) {
        throw semantic("vehicle " + std::to_string(v.id) + " station " +
                       std::to_string(v.initial_station_m) +
                       " outside [0, " + std::to_string(limit) + "]");
      }
      if (!(v.initial_speed_mps >= 0.0)) {
        throw semantic("vehicle " + std::to_string(v.id) +
                       " has negative speed");
      }
    }
    cfg.sim.channel.validate();
    cfg.sim.protocol.validate();
    if (!(cfg.sim.dt_s > 0.0) || !(cfg.sim.duration_s > 0.0)) {
      throw semantic("dt and duration must be positive");
    }
    if (!(cfg.sim.bsm_noise_sigma_m >= 0.0)) {
      throw semantic("noise sigma must be >= 0");
    }

    Scenario scenario{cfg.name, std::move(network), cfg.vehicles, cfg.sim,
                      DriverParams{}};
    return scenario;
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& e) {
    throw semantic(e.what());
  }
}

namespace {

// Shared diamond-interchange template: straight freeway along +x and a
// 250 m entrance ramp on a 300 m-radius arc that joins it tangentially.
constexpr double kRampLength = 250.0;
constexpr double kRampRadius = 300.0;
constexpr double kFreewayLength = 1500.0;
constexpr int kArcSteps = 48;

GeometryConfig diamond_geometry(double merge_x, bool mirrored) {
  GeometryConfig geom;
  geom.freeway = {{0.0, 0.0}, {kFreewayLength, 0.0}};
  const double theta = kRampLength / kRampRadius;
  const double side = mirrored ? -1.0 : 1.0;
  for (int i = 0; i <= kArcSteps; ++i) {
    if (i == kArcSteps) {
      geom.ramp.emplace_back(merge_x, 0.0);  // exact terminus on the freeway
      break;
    }
    const double phi = -kPi / 2.0 - theta + theta * i / kArcSteps;
    geom.ramp.emplace_back(merge_x + kRampRadius * std::cos(phi),
                           side * (kRampRadius + kRampRadius * std::sin(phi)));
  }
  return geom;
}

ScenarioConfig diamond_preset(const std::string& name, double merge_x,
                              bool mirrored) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.geometry = diamond_geometry(merge_x, mirrored);
  // Uncontested spacing: merge-point ETAs 6.0 s, 8.6 s and 11.4 s leave
  // more than a full headway between everyone.
  cfg.vehicles = {
      {1, PathRole::Ramp, 0.0, 22.0},
      {2, PathRole::Freeway, merge_x - 6.0 * 29.0, 29.0},
      {3, PathRole::Freeway, merge_x - 8.6 * 29.0, 29.0},
  };
  cfg.sim.duration_s = 20.0;
  return cfg;
}

ScenarioConfig conflict_preset() {
  ScenarioConfig cfg;
  const double merge_x = 800.0;
  cfg.name = "conflict_sync";
  cfg.geometry = diamond_geometry(merge_x, false);
  // The ramp vehicle's uncontrolled merge-point ETA trails the lead
  // freeway vehicle's by 0.5 s and leads the follower's; the follower
  // keeps 75 m behind the lead (midpoint of the 50-100 m band).
  const double ramp_speed = 26.0;
  const double freeway_speed = 29.0;
  const double ramp_eta = kRampLength / ramp_speed;
  const double lead_station = merge_x - freeway_speed * (ramp_eta - 0.5);
  cfg.vehicles = {
      {1, PathRole::Ramp, 0.0, ramp_speed},
      {2, PathRole::Freeway, lead_station, freeway_speed},
      {3, PathRole::Freeway, lead_station - 75.0, freeway_speed},
  };
  cfg.sim.duration_s = 20.0;
  return cfg;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"conflict_sync",  "diamond_eb_27", "diamond_eb_32", "diamond_eb_34",
          "diamond_eb_36",  "diamond_wb_27", "diamond_wb_32", "diamond_wb_34",
          "diamond_wb_36"};
}

ScenarioConfig preset(std::string_view id) {
  if (id == "conflict_sync") return conflict_preset();
  const bool eb = id.starts_with("diamond_eb_");
  const bool wb = id.starts_with("diamond_wb_");
  if (eb || wb) {
    const std::string_view exit = id.substr(11);
    double merge_x = 0.0;
    if (exit == "27") merge_x = 750.0;
    else if (exit == "32") merge_x = 800.0;
    else if (exit == "34") merge_x = 850.0;
    else if (exit == "36") merge_x = 900.0;
    else throw UnknownPreset(std::string(id));
    return diamond_preset(std::string(id), merge_x, wb);
  }
  throw UnknownPreset(std::string(id));
}

}  // namespace mergecoord
