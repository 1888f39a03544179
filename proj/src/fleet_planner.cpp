#include "radalloc/fleet_planner.hpp"

#include <algorithm>
#include <bit>
#include <limits>

namespace radalloc {

bool FleetScenario::weighted() const {
  return std::adjacent_find(weights.begin(), weights.end(), std::not_equal_to<>()) != weights.end();
}

void FleetScenario::validate() const {
  if (n_sensors() == 0 || n_targets() == 0) throw DomainError("fleet: need at least one sensor and one target");
  if (n_sensors() > kMaxFleetSensors)
    throw CapacityError("fleet: " + std::to_string(n_sensors()) + " sensors exceed the pseudo-sensor limit of " +
                        std::to_string(kMaxFleetSensors));
  if (weights.size() != n_targets()) throw DomainError("fleet: one weight per target is required");
  if (sensor_names.size() != n_sensors() || target_names.size() != n_targets())
    throw DomainError("fleet: sensor/target names do not match the tau matrix");
  if (!(horizon_ms > 0.0)) throw DomainError("fleet: horizon must be > 0");
  for (double t : taus_ms.data())
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("fleet: every time constant must be > 0");
  for (double w : weights)
    if (!(w >= 0.0)) throw DomainError("fleet: weights must be >= 0");
}

namespace {

std::vector<std::string> default_names(char prefix, std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i + 1));
  return names;
}

FleetScenario blank(std::size_t sensors, std::size_t targets, double horizon_ms) {
  FleetScenario s;
  s.sensor_names = default_names('K', sensors);
  s.target_names = default_names('C', targets);
  s.taus_ms = Matrix(sensors, targets);
  s.weights.assign(targets, 1.0);
  s.horizon_ms = horizon_ms;
  return s;
}

}  // namespace

FleetScenario FleetScenario::from_distances(const Matrix& distances_km, double scale_ms_per_km4,
                                            double horizon_ms) {
  if (!(scale_ms_per_km4 > 0.0)) throw DomainError("fleet: calibration scale must be > 0");
  FleetScenario s = blank(distances_km.rows(), distances_km.cols(), horizon_ms);
  for (std::size_t k = 0; k < distances_km.rows(); ++k)
    for (std::size_t c = 0; c < distances_km.cols(); ++c) {
      const double d = distances_km(k, c);
      if (!(d > 0.0)) throw DomainError("fleet: distances must be > 0");
      s.taus_ms(k, c) = scale_ms_per_km4 * d * d * d * d;
    }
  s.validate();
  return s;
}

FleetScenario FleetScenario::from_geometry(const std::vector<RadarModel>& radars,
                                           const std::vector<Vec2>& targets_km, double horizon_ms) {
  FleetScenario s = blank(radars.size(), targets_km.size(), horizon_ms);
  for (std::size_t k = 0; k < radars.size(); ++k) {
    radars[k].validate();
    for (std::size_t c = 0; c < targets_km.size(); ++c)
      s.taus_ms(k, c) = time_constant(radars[k], Geometry::between(radars[k], targets_km[c]));
  }
  s.validate();
  return s;
}

FleetScenario FleetScenario::from_radar_distances(const std::vector<RadarModel>& radars,
                                                  const Matrix& distances_km, double horizon_ms) {
  if (radars.size() != distances_km.rows()) throw DomainError("fleet: one distance row per radar is required");
  FleetScenario s = blank(radars.size(), distances_km.cols(), horizon_ms);
  for (std::size_t k = 0; k < radars.size(); ++k) {
    radars[k].validate();
    for (std::size_t c = 0; c < distances_km.cols(); ++c)
      s.taus_ms(k, c) = time_constant(radars[k], Geometry{distances_km(k, c), 0.0});
  }
  s.validate();
  return s;
}

double calibrate_scale(double duration_ms, double probability, double distance_km) {
  if (!(duration_ms > 0.0)) throw DomainError("calibrate: duration must be > 0");
  if (!(probability > 0.0 && probability < 1.0)) throw DomainError("calibrate: probability must lie in (0, 1)");
  if (!(distance_km > 0.0)) throw DomainError("calibrate: distance must be > 0");
  const double tau = -duration_ms / std::log1p(-probability);
  const double d2 = distance_km * distance_km;
  return tau / (d2 * d2);
}

Step1Result step1_allocations(const FleetScenario& scenario) {
  scenario.validate();
  const std::size_t ns = scenario.n_sensors();
  const std::size_t nt = scenario.n_targets();
  Step1Result r{Matrix(ns, nt), Matrix(ns, nt), {}};
  for (std::size_t k = 0; k < ns; ++k) {
    AllocationProblem p{scenario.taus_ms.row(k), scenario.weights, scenario.horizon_ms};
    Allocation a = allocate(p);
    for (std::size_t c = 0; c < nt; ++c) {
      r.times_ms(k, c) = a.times_ms[c];
      r.probabilities(k, c) = optimal_probability(a.times_ms[c], scenario.taus_ms(k, c));
    }
    r.per_sensor.push_back(std::move(a));
  }
  return r;
}

double fuse_or(std::span<const double> probabilities) {
  double miss = 1.0;
  for (double p : probabilities) miss *= 1.0 - p;
  return 1.0 - miss;
}

std::size_t SensorGroup::size() const { return static_cast<std::size_t>(std::popcount(members)); }

std::vector<std::size_t> SensorGroup::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < 32; ++s)
    if (contains(s)) out.push_back(s);
  return out;
}

std::string SensorGroup::label(const std::vector<std::string>& sensor_names) const {
  std::string out;
  for (std::size_t s : indices()) {
    if (!out.empty()) out += '-';
    out += s < sensor_names.size() ? sensor_names[s] : "K" + std::to_string(s + 1);
  }
  return out;
}

std::vector<SensorGroup> enumerate_pseudo_sensors(std::size_t n_sensors) {
  if (n_sensors > kMaxFleetSensors)
    throw CapacityError("pseudo-sensor enumeration is limited to " + std::to_string(kMaxFleetSensors) + " sensors");
  std::vector<SensorGroup> out;
  const std::uint32_t n = 1u << n_sensors;
  out.reserve(n - 1);
  for (std::uint32_t m = 1; m < n; ++m) out.push_back({m});
  return out;
}

double pseudo_sensor_probability(SensorGroup group, std::size_t target,
                                 const FleetScenario& scenario, const Step1Result& step1) {
  if (group.empty()) throw DomainError("pseudo-sensor must have at least one member");
  const auto members = group.indices();
  double t_min = std::numeric_limits<double>::infinity();
  for (std::size_t s : members) t_min = std::min(t_min, step1.times_ms(s, target));
  std::vector<double> p;
  p.reserve(members.size());
  for (std::size_t s : members) p.push_back(optimal_probability(t_min, scenario.taus_ms(s, target)));
  return fuse_or(p);
}

PseudoSensorTable pseudo_sensor_table(const FleetScenario& scenario, const Step1Result& step1) {
  const auto groups = enumerate_pseudo_sensors(scenario.n_sensors());
  PseudoSensorTable table{Matrix(groups.size() + 1, scenario.n_targets(), 0.0)};
  for (SensorGroup g : groups)
    for (std::size_t c = 0; c < scenario.n_targets(); ++c)
      table.probability(g.members, c) = pseudo_sensor_probability(g, c, scenario, step1);
  return table;
}

std::vector<SensorGroup> Assignment::groups(std::size_t n_targets) const {
  std::vector<SensorGroup> g(n_targets);
  for (std::size_t s = 0; s < sensor_target.size(); ++s) {
    const int c = sensor_target[s];
    if (c == kIdle) continue;
    if (c < 0 || static_cast<std::size_t>(c) >= n_targets) throw DomainError("assignment: target index out of range");
    g[static_cast<std::size_t>(c)].members |= 1u << s;
  }
  return g;
}

double assignment_criterion(const Assignment& a, const PseudoSensorTable& table) {
  double sum = 0.0;
  const auto groups = a.groups(table.probability.cols());
  for (std::size_t c = 0; c < groups.size(); ++c)
    if (!groups[c].empty()) sum += table.at(groups[c], c);
  return sum;
}

AssignmentResult step3_assignment(const FleetScenario& scenario, const PseudoSensorTable& table) {
  const std::size_t ns = scenario.n_sensors();
  const std::size_t nt = scenario.n_targets();
  if (ns > kMaxFleetSensors) throw CapacityError("step 3: too many sensors");
  const std::uint32_t full = (1u << ns) - 1u;
  const std::size_t states = std::size_t{full} + 1;

  // best[c][used]: best criterion over targets < c using exactly the sensors in `used`.
  constexpr double kUnreached = -1.0;
  std::vector<std::vector<double>> best(nt + 1, std::vector<double>(states, kUnreached));
  std::vector<std::vector<std::uint32_t>> pick(nt + 1, std::vector<std::uint32_t>(states, 0));
  best[0][0] = 0.0;
  for (std::size_t c = 0; c < nt; ++c) {
    for (std::uint32_t used = 0; used <= full; ++used) {
      if (best[c][used] < 0.0) continue;
      const std::uint32_t free = full & ~used;
      // group = 0 leaves the target unobserved
      for (std::uint32_t g = 0;; g = (g - free) & free) {
        const double gain = g == 0 ? 0.0 : table.probability(g, c);
        const double value = best[c][used] + gain;
        if (value > best[c + 1][used | g]) {
          best[c + 1][used | g] = value;
          pick[c + 1][used | g] = g;
        }
        if (g == free) break;
      }
    }
  }

  std::uint32_t used = 0;
  for (std::uint32_t m = 0; m <= full; ++m)
    if (best[nt][m] > best[nt][used]) used = m;

  AssignmentResult r;
  r.criterion = best[nt][used];
  r.best.sensor_target.assign(ns, Assignment::kIdle);
  for (std::size_t c = nt; c > 0; --c) {
    const std::uint32_t g = pick[c][used];
    for (std::size_t s = 0; s < ns; ++s)
      if ((g >> s) & 1u) r.best.sensor_target[s] = static_cast<int>(c - 1);
    used &= ~g;
  }
  return r;
}

std::vector<ScoredAssignment> rank_assignments(const FleetScenario& scenario,
                                               const PseudoSensorTable& table, std::size_t limit) {
  const std::size_t ns = scenario.n_sensors();
  const int nt = static_cast<int>(scenario.n_targets());
  std::vector<ScoredAssignment> all;
  Assignment a;
  a.sensor_target.assign(ns, Assignment::kIdle);
  // odometer over {idle, 0..nt-1}^ns
  while (true) {
    if (std::any_of(a.sensor_target.begin(), a.sensor_target.end(), [](int c) { return c != Assignment::kIdle; })) {
      all.push_back({a, assignment_criterion(a, table)});
      if (all.size() > 4 * std::max<std::size_t>(limit, 1024)) {
        std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.criterion > y.criterion; });
        all.resize(limit);
      }
    }
    bool carry = true;
    for (std::size_t s = ns; carry && s > 0;) {
      --s;
      if (++a.sensor_target[s] < nt)
        carry = false;
      else
        a.sensor_target[s] = Assignment::kIdle;
    }
    if (carry) break;
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.criterion > y.criterion; });
  if (all.size() > limit) all.resize(limit);
  return all;
}

namespace {

int choose_next_target(std::size_t sensor, const Matrix& remaining, const FleetScenario& scenario,
                       const PlannerOptions& options) {
  const std::size_t nt = scenario.n_targets();
  // rule 3 score: lower is preferred
  auto score = [&](std::size_t c) {
    if (options.rule3 == Rule3Variant::PerSensor) return remaining(sensor, c);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < remaining.rows(); ++s)
      if (remaining(s, c) > 0.0) m = std::min(m, remaining(s, c));
    return m;
  };
  const bool weighted = scenario.weighted();
  int chosen = Assignment::kIdle;
  for (std::size_t c = 0; c < nt; ++c) {
    if (!(remaining(sensor, c) > 0.0)) continue;
    if (chosen == Assignment::kIdle) {
      chosen = static_cast<int>(c);
      continue;
    }
    const auto best = static_cast<std::size_t>(chosen);
    // rule 2 first when weights differ, rule 3 otherwise and among equal weights
    if (weighted && scenario.weights[c] != scenario.weights[best]) {
      if (scenario.weights[c] > scenario.weights[best]) chosen = static_cast<int>(c);
      continue;
    }
    if (score(c) < score(best)) chosen = static_cast<int>(c);
  }
  return chosen;
}

}  // namespace

PlanTimeline plan(const FleetScenario& scenario, const Step1Result& step1,
                  const Assignment& initial, const PlannerOptions& options) {
  scenario.validate();
  const std::size_t ns = scenario.n_sensors();
  const std::size_t nt = scenario.n_targets();
  if (initial.sensor_target.size() != ns) throw DomainError("plan: initial assignment needs one entry per sensor");
  initial.groups(nt);  // range check

  const double snap = 1e-12 * scenario.horizon_ms;
  Matrix remaining = step1.times_ms;
  std::vector<int> current = initial.sensor_target;
  std::vector<double> seg_start(ns, 0.0);
  double now = 0.0;

  PlanTimeline out;
  out.time_on_target_ms = Matrix(ns, nt, 0.0);

  // Sensors that start idle, or on a target they owe no time, are placed by the rules at t = 0.
  {
    ReplanEvent start{0.0, remaining, {}};
    for (std::size_t s = 0; s < ns; ++s) {
      const int c = current[s];
      if (c != Assignment::kIdle && remaining(s, static_cast<std::size_t>(c)) > 0.0) continue;
      current[s] = choose_next_target(s, remaining, scenario, options);
      if (current[s] != c) start.moves.emplace_back(s, current[s]);
    }
    if (!start.moves.empty()) out.events.push_back(std::move(start));
  }

  auto close_segment = [&](std::size_t s, double end) {
    const int c = current[s];
    if (c == Assignment::kIdle || end <= seg_start[s]) return;
    out.segments.push_back({s, static_cast<std::size_t>(c), seg_start[s], end});
    out.time_on_target_ms(s, static_cast<std::size_t>(c)) += end - seg_start[s];
  };

  while (true) {
    double dt = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < ns; ++s)
      if (current[s] != Assignment::kIdle) dt = std::min(dt, remaining(s, static_cast<std::size_t>(current[s])));
    if (!std::isfinite(dt)) break;

    now += dt;
    std::vector<std::size_t> finished;
    for (std::size_t s = 0; s < ns; ++s) {
      if (current[s] == Assignment::kIdle) continue;
      double& left = remaining(s, static_cast<std::size_t>(current[s]));
      left -= dt;
      if (left <= snap) {
        left = 0.0;
        finished.push_back(s);
      }
    }

    ReplanEvent ev{now, remaining, {}};
    for (std::size_t s : finished) {
      close_segment(s, now);
      current[s] = choose_next_target(s, remaining, scenario, options);
      seg_start[s] = now;
      ev.moves.emplace_back(s, current[s]);
    }
    out.events.push_back(std::move(ev));
  }

  std::stable_sort(out.segments.begin(), out.segments.end(), [](const Segment& a, const Segment& b) {
    return a.start_ms != b.start_ms ? a.start_ms < b.start_ms : a.sensor < b.sensor;
  });

  out.observed_ms.assign(nt, 0.0);
  out.final_probabilities.assign(nt, 0.0);
  for (std::size_t c = 0; c < nt; ++c) {
    std::vector<std::pair<double, double>> iv;
    double exponent = 0.0;
    for (const auto& seg : out.segments) {
      if (seg.target != c) continue;
      iv.emplace_back(seg.start_ms, seg.end_ms);
      exponent += (seg.end_ms - seg.start_ms) / scenario.taus_ms(seg.sensor, c);
    }
    out.observed_ms[c] = union_length(std::move(iv));
    out.final_probabilities[c] = -std::expm1(-exponent);
    out.criterion += out.final_probabilities[c];
  }
  return out;
}

double static_baseline(const FleetScenario& scenario, const Assignment& initial) {
  const auto groups = initial.groups(scenario.n_targets());
  double sum = 0.0;
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].empty()) continue;
    std::vector<double> p;
    for (std::size_t s : groups[c].indices())
      p.push_back(optimal_probability(scenario.horizon_ms, scenario.taus_ms(s, c)));
    sum += fuse_or(p);
  }
  return sum;
}

double union_length(std::vector<std::pair<double, double>> intervals) {
  std::sort(intervals.begin(), intervals.end());
  double total = 0.0;
  double cur_lo = 0.0, cur_hi = 0.0;
  bool open = false;
  for (const auto& [lo, hi] : intervals) {
    if (hi <= lo) continue;
    if (!open || lo > cur_hi) {
      if (open) total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
      open = true;
    } else {
      cur_hi = std::max(cur_hi, hi);
    }
  }
  if (open) total += cur_hi - cur_lo;
  return total;
}

}  // namespace radalloc
