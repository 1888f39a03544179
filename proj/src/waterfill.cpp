#include "radalloc/waterfill.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace radalloc {

AllocationProblem AllocationProblem::uniform(std::vector<double> taus_ms, double horizon_ms) {
  AllocationProblem p;
  p.weights.assign(taus_ms.size(), 1.0);
  p.taus_ms = std::move(taus_ms);
  p.horizon_ms = horizon_ms;
  return p;
}

void AllocationProblem::validate() const {
  if (taus_ms.empty()) throw DomainError("allocation problem has no targets");
  if (taus_ms.size() != weights.size())
    throw DomainError("allocation problem: taus and weights differ in length");
  if (!(horizon_ms > 0.0) || !std::isfinite(horizon_ms))
    throw DomainError("allocation problem: horizon must be > 0");
  for (std::size_t i = 0; i < taus_ms.size(); ++i) {
    if (!(taus_ms[i] > 0.0) || !std::isfinite(taus_ms[i]))
      throw DomainError("allocation problem: tau[" + std::to_string(i) + "] must be > 0");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
      throw DomainError("allocation problem: weight[" + std::to_string(i) + "] must be >= 0");
  }
}

std::vector<double> Allocation::probabilities(const AllocationProblem& problem) const {
  std::vector<double> p(times_ms.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = optimal_probability(times_ms[i], problem.taus_ms[i]);
  return p;
}

double lambda_residual(const AllocationProblem& problem, double lambda) {
  return log_lambda_residual(problem, std::log(lambda));
}

double log_lambda_residual(const AllocationProblem& problem, double log_lambda) {
  const double T = problem.horizon_ms;
  double s = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const double w = problem.weights[i];
    if (w <= 0.0) continue;
    const double tau = problem.taus_ms[i];
    s += tau / T * positive_part(std::log(T * w / tau) - log_lambda);
  }
  return s - 1.0;
}

namespace {

// Upper end of the bracket, as ln(lambda): no target is active once lambda >= max T eps/tau.
double log_lambda_ceiling(const AllocationProblem& problem) {
  double hi = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i)
    hi = std::max(hi, problem.horizon_ms * problem.weights[i] / problem.taus_ms[i]);
  return std::log(hi);
}

// Lower end: with lambda <= m exp(-T / sum tau) (m the smallest positive
// T eps/tau) every weighted target contributes ln(...) >= T / sum tau.
// Kept in log form because exp(-T / sum tau) underflows for long horizons.
double log_lambda_floor(const AllocationProblem& problem) {
  double m = std::numeric_limits<double>::infinity();
  double tau_sum = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    if (problem.weights[i] <= 0.0) continue;
    m = std::min(m, problem.horizon_ms * problem.weights[i] / problem.taus_ms[i]);
    tau_sum += problem.taus_ms[i];
  }
  return std::log(m) - problem.horizon_ms / tau_sum;
}

std::vector<double> times_for(const AllocationProblem& problem, double log_lambda) {
  const double T = problem.horizon_ms;
  std::vector<double> t(problem.size(), 0.0);
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const double w = problem.weights[i];
    if (w <= 0.0) continue;
    const double tau = problem.taus_ms[i];
    t[i] = tau * positive_part(std::log(T * w / tau) - log_lambda);
  }
  return t;
}

// Exact ln(lambda) for a fixed active set: sum_I tau_i (ln(T eps_i/tau_i) - ln lambda) = T.
double log_lambda_on_active_set(const AllocationProblem& problem, const std::vector<std::size_t>& active) {
  double num = -problem.horizon_ms;
  double den = 0.0;
  for (std::size_t i : active) {
    const double tau = problem.taus_ms[i];
    num += tau * std::log(problem.horizon_ms * problem.weights[i] / tau);
    den += tau;
  }
  return num / den;
}

}  // namespace

double solve_log_lambda(const AllocationProblem& problem) {
  problem.validate();
  if (std::none_of(problem.weights.begin(), problem.weights.end(), [](double w) { return w > 0.0; }))
    throw NoAllocationError("every weight is zero; nothing to allocate");

  // Bisection in ln(lambda); the residual is monotone so the bracket is safe.
  double lo = log_lambda_floor(problem);
  double hi = log_lambda_ceiling(problem);
  const double tol = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (log_lambda_residual(problem, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double log_lambda = 0.5 * (lo + hi);

  // Polish on the active set the bracket identified; keep it only if the set is unchanged.
  std::vector<std::size_t> active;
  const auto t = times_for(problem, log_lambda);
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] > 0.0) active.push_back(i);
  if (!active.empty()) {
    const double exact = log_lambda_on_active_set(problem, active);
    bool consistent = true;
    for (std::size_t i = 0; i < problem.size(); ++i) {
      const bool in = std::binary_search(active.begin(), active.end(), i);
      const double w = problem.weights[i];
      const bool gate = w > 0.0 && exact < std::log(problem.horizon_ms * w / problem.taus_ms[i]);
      if (in != gate) consistent = false;
    }
    if (consistent) log_lambda = exact;
  }
  return log_lambda;
}

double solve_lambda(const AllocationProblem& problem) { return std::exp(solve_log_lambda(problem)); }

Allocation allocate(const AllocationProblem& problem) {
  Allocation a;
  a.log_lambda = solve_log_lambda(problem);
  a.lambda = std::exp(a.log_lambda);
  a.times_ms = times_for(problem, a.log_lambda);
  for (std::size_t i = 0; i < a.times_ms.size(); ++i)
    if (a.times_ms[i] > 0.0) a.active.push_back(i);
  a.criterion = allocation_criterion(problem, a.times_ms);
  return a;
}

std::optional<Allocation> closed_form_allocate(const AllocationProblem& problem) {
  problem.validate();
  const std::size_t n = problem.size();
  const auto& tau = problem.taus_ms;
  const auto& eps = problem.weights;
  if (std::any_of(eps.begin(), eps.end(), [](double w) { return w <= 0.0; })) return std::nullopt;

  Allocation a;
  a.times_ms.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double num = problem.horizon_ms;
    double den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      num += tau[j] * std::log(eps[i] * tau[j] / (eps[j] * tau[i]));
      den += tau[j] / tau[i];
    }
    a.times_ms[i] = num / den;
    if (!(a.times_ms[i] > 0.0)) return std::nullopt;
  }
  a.active.resize(n);
  std::iota(a.active.begin(), a.active.end(), std::size_t{0});
  // lambda from the KKT identity of the first target
  a.log_lambda = std::log(problem.horizon_ms * eps[0] / tau[0]) - a.times_ms[0] / tau[0];
  a.lambda = std::exp(a.log_lambda);
  a.criterion = allocation_criterion(problem, a.times_ms);
  return a;
}

double allocation_criterion(const AllocationProblem& problem, const std::vector<double>& times_ms) {
  double j = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i)
    j += problem.weights[i] * optimal_probability(times_ms[i], problem.taus_ms[i]);
  return j;
}

std::vector<double> elementary_counts(const RadarModel& radar, const Allocation& allocation,
                                      const std::vector<Geometry>& geometry) {
  if (geometry.size() != allocation.times_ms.size())
    throw DomainError("elementary_counts: one geometry per target is required");
  std::vector<double> n(geometry.size(), 0.0);
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (allocation.times_ms[i] > 0.0)
      n[i] = optimal_detection_count(radar, geometry[i], allocation.times_ms[i]);
  }
  return n;
}

}  // namespace radalloc
