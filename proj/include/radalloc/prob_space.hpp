// Allocation under probabilistic target knowledge.
//
// The surveillance sector in front of one radar is cut into N_d angular
// directions and N_r range rings. Gaussian position priors are integrated
// into per-cell occupancy masses; the probability of detecting at least one
// target in a direction is fitted to exp(-omega t^-n), which admits the same
// optimal splitting as the single-target model and hence a time constant
// tau_j. The tau_j then feed the ordinary water-filling solver.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "radalloc/common.hpp"
#include "radalloc/detection_model.hpp"
#include "radalloc/waterfill.hpp"

namespace radalloc {

struct SurveillanceGrid {
  double r_min_km = 0.0;
  double r_max_km = 0.0;
  std::size_t n_range = 0;
  std::size_t n_directions = 0;
  double sector_start_rad = 0.0;  ///< absolute bearing, counter-clockwise from +x
  double sector_end_rad = 0.0;
  Vec2 origin_km{};               ///< radar position

  double ring_width_km() const { return (r_max_km - r_min_km) / static_cast<double>(n_range); }
  double sector_width_rad() const {
    return (sector_end_rad - sector_start_rad) / static_cast<double>(n_directions);
  }
  double ring_center_km(std::size_t i) const {
    return r_min_km + (static_cast<double>(i) + 0.5) * ring_width_km();
  }
  double direction_center_rad(std::size_t j) const {
    return sector_start_rad + (static_cast<double>(j) + 0.5) * sector_width_rad();
  }
  /// Direction index containing absolute bearing `bearing_rad`, if inside the sector.
  std::optional<std::size_t> direction_of(double bearing_rad) const;
};

SurveillanceGrid build_grid(double r_min_km, double r_max_km, std::size_t n_range,
                            std::size_t n_directions, double sector_start_rad,
                            double sector_end_rad, Vec2 origin_km = {});

/// Axis-aligned 2-D Gaussian position prior (Cartesian km).
struct GaussianPrior {
  Vec2 mean_km{};
  Vec2 std_km{1.0, 1.0};

  double density(Vec2 p) const;
  void validate() const;
};

/// rho(i, j): probability that the target lies in ring i, direction j.
/// Mass outside the grid is simply missing, so sum() <= 1.
using MassMatrix = Matrix;

/// Midpoint-rule integration in polar coordinates. Each cell gets at least
/// 4x4 sub-samples, refined so the sample pitch stays below a quarter of the
/// prior's smallest standard deviation; cells farther than 10 sigma from the
/// mean are skipped.
MassMatrix integrate_prior(const GaussianPrior& prior, const SurveillanceGrid& grid);

/// rho * exp(-delta r^4 / t), delta = ln(1/p_fa) / (alpha cos^2 theta). Zero at t = 0.
double cell_detection_probability(double mass, double range_km, double t_ms,
                                  const RadarModel& radar, double off_axis_rad);

/// Everything needed to evaluate detection in one direction.
struct DirectionOccupancy {
  std::size_t direction = 0;
  double off_axis_rad = 0.0;
  std::vector<double> ranges_km;          ///< ring centres
  std::vector<std::vector<double>> mass;  ///< [target][ring]

  double total_mass() const;
  /// Sum over rings of the cell probabilities for target k.
  double target_probability(std::size_t k, double t_ms, const RadarModel& radar) const;
  /// Probability of detecting at least one target (inclusion-exclusion).
  double union_probability(double t_ms, const RadarModel& radar) const;
};

DirectionOccupancy direction_occupancy(const SurveillanceGrid& grid,
                                       std::span<const MassMatrix> masses,
                                       const RadarModel& radar, std::size_t direction);

/// Inclusion-exclusion over independent events. Refuses more than 20 events.
double union_probability(std::span<const double> probabilities);

inline constexpr std::size_t kMaxUnionTargets = 20;

struct ParametricFit {
  double omega = 0.0;
  double exponent = 0.0;
  double fit_error = 0.0;  ///< max |exp(-omega t^-n) - P| over every sample
  std::size_t samples_used = 0;
};

/// Least squares on ln(-ln P) = ln omega - n ln t. Samples whose P is not
/// strictly inside (0, 1) (or too close to 1 to take -ln P) are skipped for
/// the regression but still count toward fit_error. Needs two usable samples.
ParametricFit fit_parametric_model(std::span<const double> times_ms,
                                   std::span<const double> probabilities);

/// Residual of (1 - e^-g) ln(1 - e^-g) + n g e^-g.
double gamma_s_residual(double gamma, double exponent);

/// Unique positive root of gamma_s_residual; ln 2 when n = 1.
double solve_gamma_s(double exponent);

/// tau = -(omega/gamma)^(1/n) / ln(1 - e^-gamma).
double direction_time_constant(double omega, double exponent, double gamma_s);

/// Optimal number of elementary looks for a direction observed t_ms.
double direction_look_count(double omega, double exponent, double gamma_s, double t_ms);

/// 32 log-spaced sample times in [T/100, T].
std::vector<double> fit_sample_times(double horizon_ms);

inline constexpr double kEmptyDirectionMass = 1e-9;

struct DirectionModel {
  std::size_t direction = 0;
  double off_axis_rad = 0.0;
  double mass = 0.0;
  ParametricFit fit;
  double gamma_s = 0.0;
  double tau_ms = 0.0;
};

/// Fits one direction. Empty when the direction holds no mass or its union
/// probability is numerically 0 or 1 on every sample time.
std::optional<DirectionModel> model_direction(const DirectionOccupancy& occupancy,
                                              const RadarModel& radar, double horizon_ms);

struct DirectionAllocation {
  std::size_t n_directions = 0;
  std::vector<double> weights;            ///< per direction
  std::vector<double> times_ms;           ///< per direction, zero when excluded
  std::vector<double> looks;              ///< m_j, zero where t_j = 0
  std::vector<double> probabilities;      ///< 1 - exp(-t_j / tau_j)
  std::vector<DirectionModel> models;     ///< fitted directions only
  std::vector<std::size_t> model_index;   ///< direction -> index in models, or npos
  double lambda = 0.0;
  double criterion = 0.0;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  const DirectionModel* model_for(std::size_t direction) const {
    const std::size_t k = model_index[direction];
    return k == npos ? nullptr : &models[k];
  }
};

/// Fits every occupied direction and water-fills T across them. `weights`
/// is per direction (empty means all ones).
DirectionAllocation allocate_directions(const SurveillanceGrid& grid,
                                        std::span<const GaussianPrior> priors,
                                        const RadarModel& radar, std::vector<double> weights,
                                        double horizon_ms);

}  // namespace radalloc
