#include "radalloc/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace radalloc {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ScenarioError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(join(path, key), "required field is missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ScenarioError(path, "expected a number");
  return v.get<double>();
}

double number(const json& obj, const std::string& key, const std::string& path) {
  return as_number(require(obj, key, path), join(path, key));
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_number(*it, join(path, key));
}

std::optional<double> optional_number(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  return as_number(*it, join(path, key));
}

std::size_t count(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ScenarioError(join(path, key), "expected a positive integer");
  return static_cast<std::size_t>(v.get<long long>());
}

Vec2 point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw ScenarioError(path, "expected [x, y]");
  return {as_number(v[0], index(path, 0)), as_number(v[1], index(path, 1))};
}

const json& array(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array() || v.empty()) throw ScenarioError(join(path, key), "expected a non-empty array");
  return v;
}

std::string name_or(const json& obj, const std::string& fallback) {
  auto it = obj.find("name");
  return it != obj.end() && it->is_string() ? it->get<std::string>() : fallback;
}

template <typename F>
auto checked(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ScenarioError(path, e.what());
  }
}

RadarModel radar_from(const json& obj, const std::string& path) {
  RadarModel r;
  r.alpha_km4_per_ms = number(obj, "alpha_km4_per_ms", path);
  r.p_fa = number_or(obj, "p_fa", 1e-4, path);
  if (auto it = obj.find("position_km"); it != obj.end()) r.position_km = point(*it, join(path, "position_km"));
  r.boresight_rad = number_or(obj, "boresight_rad", 0.0, path);
  checked(path, [&] { r.validate(); return 0; });
  return r;
}

bool has_physics(const json& obj) { return obj.is_object() && obj.contains("alpha_km4_per_ms"); }

std::optional<CalibrationAnchor> calibration_from(const json& root, const std::function<double(const json&)>& distance_lookup) {
  auto it = root.find("calibration");
  if (it == root.end()) return std::nullopt;
  const std::string path = "calibration";
  CalibrationAnchor a;
  a.duration_ms = number(*it, "duration_ms", path);
  a.probability = number(*it, "probability", path);
  if (it->contains("distance_km"))
    a.distance_km = number(*it, "distance_km", path);
  else
    a.distance_km = distance_lookup(*it);
  checked(path, [&] { return a.scale(); });
  return a;
}

void parse_mono_deterministic(const json& root, ScenarioFile& out) {
  MonoDeterministicSpec spec;
  std::optional<double> scale;
  if (auto it = root.find("radar"); it != root.end()) {
    if (has_physics(*it)) spec.radar = radar_from(*it, "radar");
    scale = optional_number(*it, "scale_ms_per_km4", "radar");
  }
  out.calibration = calibration_from(root, [](const json&) -> double {
    throw ScenarioError("calibration.distance_km", "required field is missing");
  });
  if (out.calibration) scale = out.calibration->scale();
  spec.scale_ms_per_km4 = scale;
  out.scale_ms_per_km4 = scale;

  const json& targets = array(root, "targets", "");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string path = index("targets", i);
    const json& t = targets[i];
    PointTarget pt;
    pt.name = name_or(t, "T" + std::to_string(i + 1));
    pt.weight = number_or(t, "weight", 1.0, path);
    if (pt.weight < 0.0) throw ScenarioError(join(path, "weight"), "must be >= 0");
    pt.tau_ms = optional_number(t, "tau_ms", path);
    if (pt.tau_ms) {
      if (!(*pt.tau_ms > 0.0)) throw ScenarioError(join(path, "tau_ms"), "must be > 0");
    } else if (t.contains("position_km")) {
      if (!spec.radar)
        throw ScenarioError(join(path, "position_km"), "target positions need a physical radar (radar.alpha_km4_per_ms)");
      const Vec2 p = point(t["position_km"], join(path, "position_km"));
      pt.geometry = checked(path, [&] { return Geometry::between(*spec.radar, p); });
    } else {
      pt.geometry.range_km = number(t, "range_km", path);
      pt.geometry.off_axis_rad = number_or(t, "off_axis_rad", 0.0, path);
      checked(path, [&] { pt.geometry.validate(); return 0; });
    }
    if (!pt.tau_ms && !spec.radar && !spec.scale_ms_per_km4)
      throw ScenarioError(path, "no tau_ms and neither radar.alpha_km4_per_ms nor a calibration scale is given");
    spec.targets.push_back(pt);
  }
  out.mono = std::move(spec);
}

void parse_mono_probabilistic(const json& root, ScenarioFile& out) {
  MonoProbabilisticSpec spec;
  spec.radar = radar_from(require(root, "radar", ""), "radar");
  const json& g = require(root, "grid", "");
  spec.grid = checked("grid", [&] {
    return build_grid(number(g, "r_min_km", "grid"), number(g, "r_max_km", "grid"), count(g, "n_range", "grid"),
                      count(g, "n_directions", "grid"), number(g, "sector_start_rad", "grid"),
                      number(g, "sector_end_rad", "grid"), spec.radar.position_km);
  });

  const json& targets = array(root, "targets", "");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string path = index("targets", i);
    NamedPrior p;
    p.name = name_or(targets[i], "T" + std::to_string(i + 1));
    p.prior.mean_km = point(require(targets[i], "mean_km", path), join(path, "mean_km"));
    p.prior.std_km = point(require(targets[i], "std_km", path), join(path, "std_km"));
    checked(path, [&] { p.prior.validate(); return 0; });
    spec.targets.push_back(p);
  }

  if (auto it = root.find("direction_weights"); it != root.end()) {
    if (!it->is_array() || it->size() != spec.grid.n_directions)
      throw ScenarioError("direction_weights", "expected one weight per direction (" +
                                                   std::to_string(spec.grid.n_directions) + ")");
    for (std::size_t j = 0; j < it->size(); ++j) {
      const double w = as_number((*it)[j], index("direction_weights", j));
      if (w < 0.0) throw ScenarioError(index("direction_weights", j), "must be >= 0");
      spec.direction_weights.push_back(w);
    }
  }
  out.prob = std::move(spec);
}

void parse_fleet(const json& root, ScenarioFile& out) {
  FleetSpec spec;
  const json& sensors = array(root, "sensors", "");
  const json& targets = array(root, "targets", "");
  const std::size_t ns = sensors.size();
  const std::size_t nt = targets.size();
  if (ns > kMaxFleetSensors)
    throw ScenarioError("sensors", "at most " + std::to_string(kMaxFleetSensors) + " sensors are supported");

  std::vector<std::string> sensor_names, target_names;
  std::vector<double> weights;
  for (std::size_t s = 0; s < ns; ++s) sensor_names.push_back(name_or(sensors[s], "K" + std::to_string(s + 1)));
  for (std::size_t c = 0; c < nt; ++c) {
    target_names.push_back(name_or(targets[c], "C" + std::to_string(c + 1)));
    const double w = number_or(targets[c], "weight", 1.0, index("targets", c));
    if (w < 0.0) throw ScenarioError(join(index("targets", c), "weight"), "must be >= 0");
    weights.push_back(w);
  }

  if (auto it = root.find("distances_km"); it != root.end()) {
    if (!it->is_array() || it->size() != ns)
      throw ScenarioError("distances_km", "expected one row per sensor (" + std::to_string(ns) + ")");
    spec.distances_km = Matrix(ns, nt);
    for (std::size_t s = 0; s < ns; ++s) {
      const json& row = (*it)[s];
      if (!row.is_array() || row.size() != nt)
        throw ScenarioError(index("distances_km", s), "expected one distance per target (" + std::to_string(nt) + ")");
      for (std::size_t c = 0; c < nt; ++c) {
        const double d = as_number(row[c], index(index("distances_km", s), c));
        if (!(d > 0.0)) throw ScenarioError(index(index("distances_km", s), c), "distance must be > 0");
        spec.distances_km(s, c) = d;
      }
    }
  }

  auto find_index = [](const std::vector<std::string>& names, const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    return std::nullopt;
  };
  out.calibration = calibration_from(root, [&](const json& cal) -> double {
    if (spec.distances_km.rows() == 0)
      throw ScenarioError("calibration.distance_km", "required field is missing (no distances_km table to look up)");
    const json& sj = require(cal, "sensor", "calibration");
    const json& tj = require(cal, "target", "calibration");
    auto s = sj.is_string() ? find_index(sensor_names, sj.get<std::string>()) : std::nullopt;
    auto c = tj.is_string() ? find_index(target_names, tj.get<std::string>()) : std::nullopt;
    if (!s) throw ScenarioError("calibration.sensor", "unknown sensor");
    if (!c) throw ScenarioError("calibration.target", "unknown target");
    return spec.distances_km(*s, *c);
  });
  std::optional<double> scale = optional_number(root, "scale_ms_per_km4", "");
  if (out.calibration) scale = out.calibration->scale();
  out.scale_ms_per_km4 = scale;

  const double T = out.horizon_ms;
  if (scale) {
    if (spec.distances_km.rows() == 0) throw ScenarioError("distances_km", "a calibrated fleet needs a distance table");
    spec.fleet = checked("distances_km", [&] { return FleetScenario::from_distances(spec.distances_km, *scale, T); });
  } else {
    std::vector<RadarModel> radars;
    for (std::size_t s = 0; s < ns; ++s) {
      if (!has_physics(sensors[s]))
        throw ScenarioError(index("sensors", s),
                            "needs alpha_km4_per_ms (or give a top-level calibration / scale_ms_per_km4)");
      radars.push_back(radar_from(sensors[s], index("sensors", s)));
    }
    if (spec.distances_km.rows() != 0) {
      spec.fleet = checked("distances_km", [&] { return FleetScenario::from_radar_distances(radars, spec.distances_km, T); });
    } else {
      std::vector<Vec2> positions;
      for (std::size_t c = 0; c < nt; ++c)
        positions.push_back(point(require(targets[c], "position_km", index("targets", c)),
                                  join(index("targets", c), "position_km")));
      spec.fleet = checked("targets", [&] { return FleetScenario::from_geometry(radars, positions, T); });
    }
  }
  spec.fleet.sensor_names = sensor_names;
  spec.fleet.target_names = target_names;
  spec.fleet.weights = weights;

  if (auto it = root.find("planner"); it != root.end()) {
    if (auto r = it->find("rule3"); r != it->end()) {
      if (!r->is_string()) throw ScenarioError("planner.rule3", "expected \"per-sensor\" or \"global\"");
      try {
        spec.options.rule3 = parse_rule3(r->get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ScenarioError("planner.rule3", e.what());
      }
    }
  }
  out.fleet = std::move(spec);
}

}  // namespace

std::string to_string(ScenarioMode mode) {
  switch (mode) {
    case ScenarioMode::MonoDeterministic: return "mono-deterministic";
    case ScenarioMode::MonoProbabilistic: return "mono-probabilistic";
    case ScenarioMode::Fleet: return "fleet";
  }
  return "?";
}

Rule3Variant parse_rule3(const std::string& text) {
  if (text == "per-sensor") return Rule3Variant::PerSensor;
  if (text == "global") return Rule3Variant::Global;
  throw std::invalid_argument("unknown rule-3 variant '" + text + "' (expected per-sensor or global)");
}

std::string to_string(Rule3Variant v) { return v == Rule3Variant::PerSensor ? "per-sensor" : "global"; }

std::vector<double> MonoDeterministicSpec::taus_ms() const {
  std::vector<double> taus;
  for (const auto& t : targets) {
    if (t.tau_ms) {
      taus.push_back(*t.tau_ms);
    } else if (radar) {
      taus.push_back(time_constant(*radar, t.geometry));
    } else {
      const double r2 = t.geometry.range_km * t.geometry.range_km;
      taus.push_back(*scale_ms_per_km4 * r2 * r2 / t.geometry.cos2());
    }
  }
  return taus;
}

ScenarioFile parse_scenario_text(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("", source + ": malformed JSON (byte " + std::to_string(e.byte) + "): " + e.what());
  }
  if (!root.is_object()) throw ScenarioError("", source + ": top level must be an object");

  ScenarioFile out;
  out.name = root.contains("name") && root["name"].is_string() ? root["name"].get<std::string>() : source;
  const json& mode = require(root, "mode", "");
  if (!mode.is_string()) throw ScenarioError("mode", "expected a string");
  const std::string m = mode.get<std::string>();
  if (m == "mono-deterministic")
    out.mode = ScenarioMode::MonoDeterministic;
  else if (m == "mono-probabilistic")
    out.mode = ScenarioMode::MonoProbabilistic;
  else if (m == "fleet")
    out.mode = ScenarioMode::Fleet;
  else
    throw ScenarioError("mode", "unknown mode '" + m + "' (expected mono-deterministic, mono-probabilistic or fleet)");

  out.horizon_ms = number(root, "horizon_ms", "");
  if (!(out.horizon_ms > 0.0)) throw ScenarioError("horizon_ms", "must be > 0");

  switch (out.mode) {
    case ScenarioMode::MonoDeterministic: parse_mono_deterministic(root, out); break;
    case ScenarioMode::MonoProbabilistic: parse_mono_probabilistic(root, out); break;
    case ScenarioMode::Fleet: parse_fleet(root, out); break;
  }
  return out;
}

ScenarioFile parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", "cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path.string());
}

RunReport run(const ScenarioFile& scenario) {
  RunReport rep;
  rep.scenario_name = scenario.name;
  rep.mode = scenario.mode;
  rep.horizon_ms = scenario.horizon_ms;
  rep.scale_ms_per_km4 = scenario.scale_ms_per_km4;
  try {
    switch (scenario.mode) {
      case ScenarioMode::MonoDeterministic: {
        const auto& spec = *scenario.mono;
        MonoReport m;
        for (const auto& t : spec.targets) {
          m.names.push_back(t.name);
          m.problem.weights.push_back(t.weight);
        }
        m.problem.taus_ms = spec.taus_ms();
        m.problem.horizon_ms = scenario.horizon_ms;
        m.allocation = allocate(m.problem);
        m.probabilities = m.allocation.probabilities(m.problem);
        const bool all_geometric = std::none_of(spec.targets.begin(), spec.targets.end(),
                                                [](const PointTarget& t) { return t.tau_ms.has_value(); });
        if (spec.radar && all_geometric) {
          std::vector<Geometry> geoms;
          for (const auto& t : spec.targets) geoms.push_back(t.geometry);
          m.looks = elementary_counts(*spec.radar, m.allocation, geoms);
        }
        rep.mono = std::move(m);
        break;
      }
      case ScenarioMode::MonoProbabilistic: {
        const auto& spec = *scenario.prob;
        std::vector<GaussianPrior> priors;
        for (const auto& t : spec.targets) priors.push_back(t.prior);
        rep.prob = ProbReport{spec.grid, allocate_directions(spec.grid, priors, spec.radar, spec.direction_weights,
                                                             scenario.horizon_ms)};
        break;
      }
      case ScenarioMode::Fleet: {
        const auto& spec = *scenario.fleet;
        FleetReport f;
        f.scenario = spec.fleet;
        f.options = spec.options;
        f.step1 = step1_allocations(f.scenario);
        f.pseudo = pseudo_sensor_table(f.scenario, f.step1);
        f.assignment = step3_assignment(f.scenario, f.pseudo);
        if (f.scenario.n_sensors() <= 6) f.ranked = rank_assignments(f.scenario, f.pseudo, 12);
        f.timeline = plan(f.scenario, f.step1, f.assignment.best, f.options);
        f.static_criterion = static_baseline(f.scenario, f.assignment.best);
        rep.fleet = std::move(f);
        break;
      }
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(scenario.name + ": " + e.what());
  }
  return rep;
}

}  // namespace radalloc
