// Multisensor, multitarget planning with OR-fused sensor groups.
//
// Initial phase: every sensor water-fills T over all targets on its own
// (step 1); every non-empty sensor group ("pseudo-sensor") gets an OR-fused
// probability per target, evaluated at the group's shortest member duration
// (step 2); the sensor -> target map maximising the summed fused probability
// is found by exhaustive search (step 3).
//
// Planning phase: an event loop replays the step-1 durations. Whenever a
// sensor finishes its duration on a target it is re-pointed, to the heaviest
// unfinished target when weights differ, otherwise to the unfinished target
// with the shortest remaining step-1 duration.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radalloc/common.hpp"
#include "radalloc/detection_model.hpp"
#include "radalloc/waterfill.hpp"

namespace radalloc {

inline constexpr std::size_t kMaxFleetSensors = 12;

struct FleetScenario {
  std::vector<std::string> sensor_names;
  std::vector<std::string> target_names;
  Matrix taus_ms;               ///< [sensor][target]
  std::vector<double> weights;  ///< per target
  double horizon_ms = 0.0;

  std::size_t n_sensors() const { return taus_ms.rows(); }
  std::size_t n_targets() const { return taus_ms.cols(); }
  bool weighted() const;
  void validate() const;

  /// tau = scale * d^4 (theta = 0), `distances_km` indexed [sensor][target].
  static FleetScenario from_distances(const Matrix& distances_km, double scale_ms_per_km4,
                                      double horizon_ms);
  /// tau from the full radar model, theta taken from each radar's boresight.
  static FleetScenario from_geometry(const std::vector<RadarModel>& radars,
                                     const std::vector<Vec2>& targets_km, double horizon_ms);
  /// tau from the radar model with theta = 0 and bare distances.
  static FleetScenario from_radar_distances(const std::vector<RadarModel>& radars,
                                            const Matrix& distances_km, double horizon_ms);
};

/// Scale K with tau = K d^4 such that observing `duration_ms` gives `probability`.
double calibrate_scale(double duration_ms, double probability, double distance_km);

struct Step1Result {
  Matrix times_ms;       ///< [sensor][target]
  Matrix probabilities;  ///< [sensor][target]
  std::vector<Allocation> per_sensor;
};

Step1Result step1_allocations(const FleetScenario& scenario);

/// 1 - prod(1 - p).
double fuse_or(std::span<const double> probabilities);

/// Non-empty subset of sensors, bit s set when sensor s is a member.
struct SensorGroup {
  std::uint32_t members = 0;

  bool empty() const { return members == 0; }
  bool contains(std::size_t s) const { return (members >> s) & 1u; }
  std::size_t size() const;
  std::vector<std::size_t> indices() const;
  /// "K1-K3" style label.
  std::string label(const std::vector<std::string>& sensor_names) const;

  friend bool operator==(SensorGroup, SensorGroup) = default;
};

/// All 2^P - 1 groups, ordered by bitmask.
std::vector<SensorGroup> enumerate_pseudo_sensors(std::size_t n_sensors);

/// OR fusion of the members, each observing for the group's shortest step-1 duration on `target`.
double pseudo_sensor_probability(SensorGroup group, std::size_t target,
                                 const FleetScenario& scenario, const Step1Result& step1);

/// probability(group mask, target), row index = bitmask (row 0 unused).
struct PseudoSensorTable {
  Matrix probability;
  double at(SensorGroup g, std::size_t target) const { return probability(g.members, target); }
};

PseudoSensorTable pseudo_sensor_table(const FleetScenario& scenario, const Step1Result& step1);

/// One sensor -> target map; kIdle leaves a sensor unused.
struct Assignment {
  static constexpr int kIdle = -1;
  std::vector<int> sensor_target;

  /// Group pointed at each target (possibly empty).
  std::vector<SensorGroup> groups(std::size_t n_targets) const;
};

/// Sum over targets of the fused probability of the group assigned to it.
double assignment_criterion(const Assignment& a, const PseudoSensorTable& table);

struct AssignmentResult {
  Assignment best;
  double criterion = 0.0;
};

/// Exact maximum over every sensor -> {target, idle} map, computed as a
/// dynamic programme over (target, used-sensor subset) in O(N_t 3^P).
/// Ties keep the lowest-bitmask group for the lowest target index.
AssignmentResult step3_assignment(const FleetScenario& scenario, const PseudoSensorTable& table);

struct ScoredAssignment {
  Assignment assignment;
  double criterion = 0.0;
};

/// Every map with at least one active sensor, best first, truncated to `limit`.
std::vector<ScoredAssignment> rank_assignments(const FleetScenario& scenario,
                                               const PseudoSensorTable& table, std::size_t limit);

enum class Rule3Variant {
  PerSensor,  ///< shortest remaining duration of the freed sensor itself
  Global,     ///< shortest remaining duration of any sensor on the target
};

struct PlannerOptions {
  Rule3Variant rule3 = Rule3Variant::PerSensor;
};

struct Segment {
  std::size_t sensor = 0;
  std::size_t target = 0;
  double start_ms = 0.0;
  double end_ms = 0.0;
};

/// State at one re-planning instant.
struct ReplanEvent {
  double time_ms = 0.0;
  Matrix remaining_ms;  ///< [sensor][target] step-1 time still owed, after advancing to time_ms
  std::vector<std::pair<std::size_t, int>> moves;  ///< (sensor, new target or kIdle)
};

struct PlanTimeline {
  std::vector<Segment> segments;               ///< ordered by start, then sensor
  std::vector<double> observed_ms;             ///< per target, union of observation intervals
  std::vector<double> final_probabilities;     ///< per target
  Matrix time_on_target_ms;                    ///< [sensor][target] summed segment time
  std::vector<ReplanEvent> events;
  double criterion = 0.0;
};

PlanTimeline plan(const FleetScenario& scenario, const Step1Result& step1,
                  const Assignment& initial, const PlannerOptions& options = {});

/// Criterion if the initial groups stayed on their targets for all of T.
double static_baseline(const FleetScenario& scenario, const Assignment& initial);

/// Total length of the union of [start, end) intervals.
double union_length(std::vector<std::pair<double, double>> intervals);

}  // namespace radalloc
