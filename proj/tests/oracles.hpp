// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's solvers.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

/// Golden-section maximisation of a unimodal f on [a, b], in long double.
inline long double golden_max(const std::function<long double(long double)>& f, long double a, long double b,
                              int iterations = 200) {
  const long double invphi = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  long double c = b - invphi * (b - a);
  long double d = a + invphi * (b - a);
  long double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0L;
}

/// Best value of sum_i eps_i (1 - exp(-k_i h / tau_i)) over integer k_i >= 0
/// with sum k_i = steps, h = T / steps. Exact max-plus recursion over the grid.
inline double simplex_grid_max(const std::vector<double>& taus, const std::vector<double>& eps, double horizon,
                               std::size_t steps) {
  const double h = horizon / static_cast<double>(steps);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> best(steps + 1, neg_inf);
  best[0] = 0.0;
  std::vector<double> f(steps + 1);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    for (std::size_t k = 0; k <= steps; ++k) f[k] = eps[i] * (1.0 - std::exp(-static_cast<double>(k) * h / taus[i]));
    std::vector<double> next(steps + 1, neg_inf);
    const bool last = i + 1 == taus.size();
    for (std::size_t used = last ? steps : 0; used <= steps; ++used) {
      double m = neg_inf;
      for (std::size_t k = 0; k <= used; ++k) {
        const double v = best[used - k] + f[k];
        if (v > m) m = v;
      }
      next[used] = m;
    }
    best.swap(next);
  }
  return best[steps];
}

/// Literal enumeration of the same grid, for small instances only.
inline double simplex_grid_max_enumerated(const std::vector<double>& taus, const std::vector<double>& eps,
                                          double horizon, std::size_t steps) {
  const double h = horizon / static_cast<double>(steps);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> k(taus.size(), 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
    if (i + 1 == taus.size()) {
      k[i] = left;
      double v = 0.0;
      for (std::size_t j = 0; j < taus.size(); ++j)
        v += eps[j] * (1.0 - std::exp(-static_cast<double>(k[j]) * h / taus[j]));
      if (v > best) best = v;
      return;
    }
    for (std::size_t a = 0; a <= left; ++a) {
      k[i] = a;
      rec(i + 1, left - a);
    }
  };
  rec(0, steps);
  return best;
}

/// Complement-product form of "at least one of independent events".
inline double complement_product(const std::vector<double>& p) {
  double q = 1.0;
  for (double x : p) q *= 1.0 - x;
  return 1.0 - q;
}

/// Argmax gamma = M^n of 1 - (1 - exp(-M^n))^M (omega = t = 1), by golden section on ln M.
inline double split_optimum_gamma(double n) {
  auto score = [n](long double log_m) {
    const long double m = std::exp(log_m);
    const long double g = std::pow(m, static_cast<long double>(n));
    // maximising 1 - (1-e^-g)^M is minimising M ln(1 - e^-g)
    return -m * std::log1p(-std::exp(-g));
  };
  // gamma in [1e-3, 40] keeps exp(-g) representable, so the score has no flat tail
  const long double log_m = golden_max(score, std::log(1e-3L) / n, std::log(40.0L) / n, 400);
  return static_cast<double>(std::pow(std::exp(log_m), static_cast<long double>(n)));
}

}  // namespace oracle
