#include "radalloc/prob_space.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

namespace radalloc {

namespace {

constexpr double kSigmaCutoff = 10.0;
constexpr std::size_t kMinSubsamples = 4;
constexpr std::size_t kMaxSubsamples = 4096;
constexpr std::size_t kFitSamples = 32;

std::size_t subsample_count(double extent_km, double sigma_km) {
  const double wanted = std::ceil(4.0 * extent_km / sigma_km);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(wanted, 0.0)), kMinSubsamples,
                                 kMaxSubsamples);
}

// Shift `a` by whole turns so it lies within pi of `ref`.
double unwrap_near(double a, double ref) {
  return ref + wrap_angle(a - ref);
}

}  // namespace

std::optional<std::size_t> SurveillanceGrid::direction_of(double bearing_rad) const {
  const double width = sector_end_rad - sector_start_rad;
  double rel = std::fmod(bearing_rad - sector_start_rad, 2.0 * std::numbers::pi);
  if (rel < 0.0) rel += 2.0 * std::numbers::pi;
  if (rel >= width) return std::nullopt;
  return std::min(n_directions - 1, static_cast<std::size_t>(rel / sector_width_rad()));
}

SurveillanceGrid build_grid(double r_min_km, double r_max_km, std::size_t n_range,
                            std::size_t n_directions, double sector_start_rad,
                            double sector_end_rad, Vec2 origin_km) {
  if (!(r_min_km > 0.0) || !(r_max_km > r_min_km))
    throw DomainError("grid: need 0 < r_min < r_max");
  if (n_range < 1 || n_directions < 1) throw DomainError("grid: need at least one ring and one direction");
  if (!(sector_end_rad > sector_start_rad) ||
      sector_end_rad - sector_start_rad > 2.0 * std::numbers::pi + 1e-12)
    throw DomainError("grid: sector must satisfy start < end <= start + 2 pi");
  return SurveillanceGrid{r_min_km, r_max_km, n_range, n_directions, sector_start_rad, sector_end_rad,
                          origin_km};
}

double GaussianPrior::density(Vec2 p) const {
  const double zx = (p.x - mean_km.x) / std_km.x;
  const double zy = (p.y - mean_km.y) / std_km.y;
  return std::exp(-0.5 * (zx * zx + zy * zy)) / (2.0 * std::numbers::pi * std_km.x * std_km.y);
}

void GaussianPrior::validate() const {
  if (!(std_km.x > 0.0) || !(std_km.y > 0.0)) throw DomainError("prior: standard deviations must be > 0");
}

MassMatrix integrate_prior(const GaussianPrior& prior, const SurveillanceGrid& grid) {
  prior.validate();
  MassMatrix rho(grid.n_range, grid.n_directions, 0.0);

  const Vec2 rel_mean = prior.mean_km - grid.origin_km;
  const double mean_range = rel_mean.norm();
  const double sigma_min = std::min(prior.std_km.x, prior.std_km.y);
  const double reach = kSigmaCutoff * std::max(prior.std_km.x, prior.std_km.y);
  // polar bounding box of the cutoff disk
  const double r_lo = std::max(0.0, mean_range - reach);
  const double r_hi = mean_range + reach;
  const bool covers_origin = reach >= mean_range;
  const double half_spread = covers_origin ? std::numbers::pi : std::asin(reach / mean_range);

  const double dr = grid.ring_width_km();
  const double dphi = grid.sector_width_rad();
  for (std::size_t j = 0; j < grid.n_directions; ++j) {
    const double phi0 = grid.sector_start_rad + static_cast<double>(j) * dphi;
    const double phi1 = phi0 + dphi;
    double a0 = phi0;
    double a1 = phi1;
    if (!covers_origin) {
      const double centre = unwrap_near(rel_mean.bearing(), 0.5 * (phi0 + phi1));
      a0 = std::max(phi0, centre - half_spread);
      a1 = std::min(phi1, centre + half_spread);
      if (a1 <= a0) continue;
    }
    for (std::size_t i = 0; i < grid.n_range; ++i) {
      const double ring0 = grid.r_min_km + static_cast<double>(i) * dr;
      const double b0 = std::max(ring0, r_lo);
      const double b1 = std::min(ring0 + dr, r_hi);
      if (b1 <= b0) continue;

      const std::size_t nr = subsample_count(b1 - b0, sigma_min);
      const std::size_t na = subsample_count(b1 * (a1 - a0), sigma_min);
      const double hr = (b1 - b0) / static_cast<double>(nr);
      const double ha = (a1 - a0) / static_cast<double>(na);
      double acc = 0.0;
      for (std::size_t u = 0; u < nr; ++u) {
        const double r = b0 + (static_cast<double>(u) + 0.5) * hr;
        double ring_acc = 0.0;
        for (std::size_t v = 0; v < na; ++v) {
          const double phi = a0 + (static_cast<double>(v) + 0.5) * ha;
          ring_acc += prior.density({grid.origin_km.x + r * std::cos(phi), grid.origin_km.y + r * std::sin(phi)});
        }
        acc += ring_acc * r;
      }
      rho(i, j) = acc * hr * ha;
    }
  }
  return rho;
}

double cell_detection_probability(double mass, double range_km, double t_ms,
                                  const RadarModel& radar, double off_axis_rad) {
  if (t_ms < 0.0) throw DomainError("cell detection: time must be >= 0");
  if (mass == 0.0 || t_ms == 0.0) return 0.0;
  const Geometry g{range_km, off_axis_rad};
  g.validate();
  const double delta = std::log(1.0 / radar.p_fa) / (radar.alpha_km4_per_ms * g.cos2());
  const double r2 = range_km * range_km;
  return mass * std::exp(-delta * r2 * r2 / t_ms);
}

double DirectionOccupancy::total_mass() const {
  double s = 0.0;
  for (const auto& m : mass)
    for (double v : m) s += v;
  return s;
}

double DirectionOccupancy::target_probability(std::size_t k, double t_ms, const RadarModel& radar) const {
  double p = 0.0;
  const auto& rho = mass.at(k);
  for (std::size_t i = 0; i < ranges_km.size(); ++i)
    if (rho[i] > 0.0) p += cell_detection_probability(rho[i], ranges_km[i], t_ms, radar, off_axis_rad);
  return p;
}

double DirectionOccupancy::union_probability(double t_ms, const RadarModel& radar) const {
  std::vector<double> p;
  p.reserve(mass.size());
  for (std::size_t k = 0; k < mass.size(); ++k) p.push_back(target_probability(k, t_ms, radar));
  return radalloc::union_probability(p);
}

DirectionOccupancy direction_occupancy(const SurveillanceGrid& grid,
                                       std::span<const MassMatrix> masses,
                                       const RadarModel& radar, std::size_t direction) {
  DirectionOccupancy occ;
  occ.direction = direction;
  occ.off_axis_rad = wrap_angle(grid.direction_center_rad(direction) - radar.boresight_rad);
  occ.ranges_km.resize(grid.n_range);
  for (std::size_t i = 0; i < grid.n_range; ++i) occ.ranges_km[i] = grid.ring_center_km(i);
  for (const auto& rho : masses) {
    std::vector<double> column = rho.col(direction);
    bool any = std::any_of(column.begin(), column.end(), [](double v) { return v > 0.0; });
    if (any) occ.mass.push_back(std::move(column));
  }
  return occ;
}

namespace {

// Alternating sum over all non-empty subsets starting at index `from`.
double inclusion_exclusion(std::span<const double> p, std::size_t from, double prod, int sign) {
  double s = 0.0;
  for (std::size_t k = from; k < p.size(); ++k) {
    const double term = prod * p[k];
    s += sign * term;
    if (term != 0.0) s += inclusion_exclusion(p, k + 1, term, -sign);
  }
  return s;
}

}  // namespace

double union_probability(std::span<const double> probabilities) {
  if (probabilities.size() > kMaxUnionTargets)
    throw CapacityError("union_probability: " + std::to_string(probabilities.size()) +
                        " events exceed the inclusion-exclusion limit of " +
                        std::to_string(kMaxUnionTargets));
  return inclusion_exclusion(probabilities, 0, 1.0, 1);
}

ParametricFit fit_parametric_model(std::span<const double> times_ms,
                                   std::span<const double> probabilities) {
  if (times_ms.size() != probabilities.size()) throw DomainError("fit: times and probabilities differ in length");
  // Keep -ln P away from the cancellation zone near 1.
  constexpr double kMinNegLog = 1e-9;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (std::size_t s = 0; s < times_ms.size(); ++s) {
    const double p = probabilities[s];
    if (!(times_ms[s] > 0.0) || !(p > 0.0) || !(p < 1.0)) continue;
    const double neg_log = -std::log(p);
    if (neg_log < kMinNegLog || !std::isfinite(neg_log)) continue;
    const double x = std::log(times_ms[s]);
    const double y = std::log(neg_log);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 2) throw DomainError("fit: need at least two samples with P strictly inside (0, 1)");
  const double n = static_cast<double>(used);
  const double det = n * sxx - sx * sx;
  if (!(std::abs(det) > 0.0)) throw DomainError("fit: sample times must not all coincide");
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / n;

  ParametricFit fit;
  fit.omega = std::exp(intercept);
  fit.exponent = -slope;
  fit.samples_used = used;
  for (std::size_t s = 0; s < times_ms.size(); ++s) {
    const double model = std::exp(-fit.omega * std::pow(times_ms[s], -fit.exponent));
    fit.fit_error = std::max(fit.fit_error, std::abs(model - probabilities[s]));
  }
  return fit;
}

double gamma_s_residual(double gamma, double exponent) {
  const double e = std::exp(-gamma);
  const double hit = -std::expm1(-gamma);  // 1 - e^-g
  return hit * std::log1p(-e) + exponent * gamma * e;
}

double solve_gamma_s(double exponent) {
  if (!(exponent > 0.0) || !std::isfinite(exponent)) throw DomainError("gamma_s: exponent must be > 0");
  // residual < 0 near 0 and > 0 for large gamma; bisection on (0, 50]
  double lo = 0.0;
  double hi = 50.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double r = gamma_s_residual(mid, exponent);
    if (r == 0.0) return mid;
    if (r < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double direction_time_constant(double omega, double exponent, double gamma_s) {
  if (!(omega > 0.0) || !(exponent > 0.0) || !(gamma_s > 0.0))
    throw DomainError("direction time constant: omega, n and gamma must be > 0");
  return -std::pow(omega / gamma_s, 1.0 / exponent) / std::log1p(-std::exp(-gamma_s));
}

double direction_look_count(double omega, double exponent, double gamma_s, double t_ms) {
  if (t_ms <= 0.0) return 0.0;
  return std::pow(gamma_s * std::pow(t_ms, exponent) / omega, 1.0 / exponent);
}

std::vector<double> fit_sample_times(double horizon_ms) {
  std::vector<double> t(kFitSamples);
  const double lo = std::log(horizon_ms / 100.0);
  const double hi = std::log(horizon_ms);
  for (std::size_t s = 0; s < kFitSamples; ++s)
    t[s] = std::exp(lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(kFitSamples - 1));
  t.back() = horizon_ms;
  return t;
}

std::optional<DirectionModel> model_direction(const DirectionOccupancy& occupancy,
                                              const RadarModel& radar, double horizon_ms) {
  DirectionModel m;
  m.direction = occupancy.direction;
  m.off_axis_rad = occupancy.off_axis_rad;
  m.mass = occupancy.total_mass();
  if (m.mass < kEmptyDirectionMass) return std::nullopt;

  const auto times = fit_sample_times(horizon_ms);
  std::vector<double> probs(times.size());
  std::size_t usable = 0;
  for (std::size_t s = 0; s < times.size(); ++s) {
    probs[s] = occupancy.union_probability(times[s], radar);
    if (probs[s] > 0.0 && probs[s] < 1.0) ++usable;
  }
  if (usable < 2) return std::nullopt;

  m.fit = fit_parametric_model(times, probs);
  if (!(m.fit.exponent > 0.0))
    throw DomainError("direction " + std::to_string(occupancy.direction + 1) +
                      ": fitted exponent is not positive");
  m.gamma_s = solve_gamma_s(m.fit.exponent);
  m.tau_ms = direction_time_constant(m.fit.omega, m.fit.exponent, m.gamma_s);
  return m;
}

DirectionAllocation allocate_directions(const SurveillanceGrid& grid,
                                        std::span<const GaussianPrior> priors,
                                        const RadarModel& radar, std::vector<double> weights,
                                        double horizon_ms) {
  radar.validate();
  if (weights.empty()) weights.assign(grid.n_directions, 1.0);
  if (weights.size() != grid.n_directions)
    throw DomainError("allocate_directions: expected " + std::to_string(grid.n_directions) +
                      " direction weights, got " + std::to_string(weights.size()));

  std::vector<MassMatrix> masses;
  masses.reserve(priors.size());
  for (const auto& p : priors) masses.push_back(integrate_prior(p, grid));

  DirectionAllocation out;
  out.n_directions = grid.n_directions;
  out.weights = weights;
  out.times_ms.assign(grid.n_directions, 0.0);
  out.looks.assign(grid.n_directions, 0.0);
  out.probabilities.assign(grid.n_directions, 0.0);
  out.model_index.assign(grid.n_directions, DirectionAllocation::npos);

  for (std::size_t j = 0; j < grid.n_directions; ++j) {
    const auto occ = direction_occupancy(grid, masses, radar, j);
    if (occ.total_mass() < kEmptyDirectionMass) continue;
    if (auto m = model_direction(occ, radar, horizon_ms)) {
      out.model_index[j] = out.models.size();
      out.models.push_back(*m);
    }
  }
  if (out.models.empty()) throw NoAllocationError("no occupied direction can be modelled");

  AllocationProblem problem;
  problem.horizon_ms = horizon_ms;
  for (const auto& m : out.models) {
    problem.taus_ms.push_back(m.tau_ms);
    problem.weights.push_back(weights[m.direction]);
  }
  const Allocation a = allocate(problem);
  out.lambda = a.lambda;
  out.criterion = a.criterion;
  for (std::size_t k = 0; k < out.models.size(); ++k) {
    const auto& m = out.models[k];
    const double t = a.times_ms[k];
    out.times_ms[m.direction] = t;
    out.looks[m.direction] = direction_look_count(m.fit.omega, m.fit.exponent, m.gamma_s, t);
    out.probabilities[m.direction] = optimal_probability(t, m.tau_ms);
  }
  return out;
}

}  // namespace radalloc
