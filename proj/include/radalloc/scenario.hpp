// JSON scenario files and solver dispatch.
//
// Every dimensional field carries its unit in the key (horizon_ms, range_km,
// boresight_rad, ...). Three modes exist:
//   mono-deterministic   one radar, known targets, water-filling over targets
//   mono-probabilistic   one radar, Gaussian priors on a direction x range grid
//   fleet                several radars, known distances, initial assignment + timeline
#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "radalloc/detection_model.hpp"
#include "radalloc/fleet_planner.hpp"
#include "radalloc/prob_space.hpp"
#include "radalloc/waterfill.hpp"

namespace radalloc {

/// Schema or consistency violation; `field()` names the offending JSON path.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ScenarioMode { MonoDeterministic, MonoProbabilistic, Fleet };

std::string to_string(ScenarioMode mode);

/// (duration, probability, distance) anchor for tau = K d^4.
struct CalibrationAnchor {
  double duration_ms = 0.0;
  double probability = 0.0;
  double distance_km = 0.0;

  double scale() const { return calibrate_scale(duration_ms, probability, distance_km); }
};

struct PointTarget {
  std::string name;
  double weight = 1.0;
  std::optional<double> tau_ms;  ///< given directly
  Geometry geometry{};           ///< used when tau_ms is absent
};

struct MonoDeterministicSpec {
  std::optional<RadarModel> radar;  ///< physical radar; enables look counts
  std::optional<double> scale_ms_per_km4;
  std::vector<PointTarget> targets;

  /// tau per target: direct, K r^4 / cos^2 theta, or from the radar model.
  std::vector<double> taus_ms() const;
};

struct NamedPrior {
  std::string name;
  GaussianPrior prior;
};

struct MonoProbabilisticSpec {
  RadarModel radar;
  SurveillanceGrid grid;
  std::vector<NamedPrior> targets;
  std::vector<double> direction_weights;  ///< empty means all ones
};

struct FleetSpec {
  FleetScenario fleet;
  Matrix distances_km;  ///< empty when taus came from positions
  PlannerOptions options;
};

struct ScenarioFile {
  std::string name;
  ScenarioMode mode = ScenarioMode::MonoDeterministic;
  double horizon_ms = 0.0;
  std::optional<CalibrationAnchor> calibration;
  std::optional<double> scale_ms_per_km4;  ///< resolved calibration constant, if any

  std::optional<MonoDeterministicSpec> mono;
  std::optional<MonoProbabilisticSpec> prob;
  std::optional<FleetSpec> fleet;
};

ScenarioFile parse_scenario(const std::filesystem::path& path);
ScenarioFile parse_scenario_text(const std::string& text, const std::string& source = "<string>");

Rule3Variant parse_rule3(const std::string& text);
std::string to_string(Rule3Variant v);

struct MonoReport {
  std::vector<std::string> names;
  AllocationProblem problem;
  Allocation allocation;
  std::vector<double> probabilities;
  std::optional<std::vector<double>> looks;  ///< only with a physical radar
};

struct ProbReport {
  SurveillanceGrid grid;
  DirectionAllocation allocation;
};

struct FleetReport {
  FleetScenario scenario;
  Step1Result step1;
  PseudoSensorTable pseudo;
  AssignmentResult assignment;
  std::vector<ScoredAssignment> ranked;  ///< best candidates, for the report
  PlanTimeline timeline;
  double static_criterion = 0.0;
  PlannerOptions options;
};

struct RunReport {
  std::string scenario_name;
  ScenarioMode mode = ScenarioMode::MonoDeterministic;
  double horizon_ms = 0.0;
  std::optional<double> scale_ms_per_km4;

  std::optional<MonoReport> mono;
  std::optional<ProbReport> prob;
  std::optional<FleetReport> fleet;
};

/// Solves the scenario; solver errors are rethrown with the scenario name attached.
RunReport run(const ScenarioFile& scenario);

}  // namespace radalloc
