// Water-filling split of a time budget across independent looks.
//
// Maximises  sum_i eps_i (1 - exp(-t_i / tau_i))  subject to  sum_i t_i = T,
// t_i >= 0. The KKT solution is
//     t_i = tau_i * max(0, ln(T eps_i / (tau_i lambda)))
// with lambda the unique root of  sum_i (tau_i / T) max(0, ln(T eps_i / (tau_i lambda))) = 1.
#pragma once

#include <optional>
#include <vector>

#include "radalloc/common.hpp"
#include "radalloc/detection_model.hpp"

namespace radalloc {

struct AllocationProblem {
  std::vector<double> taus_ms;
  std::vector<double> weights;
  double horizon_ms = 0.0;

  /// Equal-weight problem.
  static AllocationProblem uniform(std::vector<double> taus_ms, double horizon_ms);

  std::size_t size() const { return taus_ms.size(); }
  void validate() const;
};

struct Allocation {
  std::vector<double> times_ms;
  double lambda = 0.0;
  double log_lambda = 0.0;          ///< ln(lambda); lambda itself underflows when T >> tau
  std::vector<std::size_t> active;  ///< indices with t_i > 0, ascending
  double criterion = 0.0;           ///< sum eps_i (1 - exp(-t_i/tau_i)), from times_ms

  /// Per-look probabilities 1 - exp(-t_i/tau_i).
  std::vector<double> probabilities(const AllocationProblem& problem) const;
};

/// max(x, 0).
inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

/// Left side of the lambda equation minus one; strictly decreasing where positive.
double lambda_residual(const AllocationProblem& problem, double lambda);

/// Same residual as a function of ln(lambda).
double log_lambda_residual(const AllocationProblem& problem, double log_lambda);

/// Throws NoAllocationError when every weight is zero.
double solve_lambda(const AllocationProblem& problem);

/// ln of the multiplier, valid even where lambda is below the smallest double.
double solve_log_lambda(const AllocationProblem& problem);

Allocation allocate(const AllocationProblem& problem);

/// Explicit solution valid when every target is active. Empty when any
/// resulting duration would be <= 0 (or a weight is zero).
std::optional<Allocation> closed_form_allocate(const AllocationProblem& problem);

/// sum eps_i (1 - exp(-t_i/tau_i)).
double allocation_criterion(const AllocationProblem& problem, const std::vector<double>& times_ms);

/// Optimal number of elementary looks per target for the solved durations.
std::vector<double> elementary_counts(const RadarModel& radar, const Allocation& allocation,
                                      const std::vector<Geometry>& geometry);

}  // namespace radalloc
