#include "radalloc/detection_model.hpp"

#include <algorithm>
#include <numbers>

namespace radalloc {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

// ln(1/p_fa) / (alpha cos^2 theta); everything but r^4 and t.
double loss_factor(const RadarModel& radar, const Geometry& geom) {
  return std::log(1.0 / radar.p_fa) / (radar.alpha_km4_per_ms * geom.cos2());
}

}  // namespace

void RadarModel::validate() const {
  require(alpha_km4_per_ms > 0.0 && std::isfinite(alpha_km4_per_ms), "radar alpha must be > 0");
  require(p_fa > 0.0 && p_fa < 1.0, "radar p_fa must lie in (0, 1)");
  require(boresight_rad > -std::numbers::pi && boresight_rad <= std::numbers::pi,
          "radar boresight must lie in (-pi, pi]");
}

void Geometry::validate() const {
  require(range_km > 0.0 && std::isfinite(range_km), "range must be > 0");
  require(std::abs(off_axis_rad) < std::numbers::pi / 2, "target must lie in front of the antenna (|theta| < pi/2)");
  require(cos2() > 0.0, "target must lie in front of the antenna (cos theta > 0)");
}

Geometry Geometry::between(const RadarModel& radar, Vec2 target_km) {
  const Vec2 d = target_km - radar.position_km;
  Geometry g{d.norm(), wrap_angle(d.bearing() - radar.boresight_rad)};
  g.validate();
  return g;
}

double snr(const RadarModel& radar, const Geometry& geom, double t_obs_ms) {
  require(t_obs_ms > 0.0, "observation time must be > 0");
  geom.validate();
  const double r2 = geom.range_km * geom.range_km;
  return radar.alpha_km4_per_ms * t_obs_ms * geom.cos2() / (r2 * r2);
}

double detection_probability(double p_fa, double snr) {
  require(snr >= 0.0, "snr must be >= 0");
  return std::pow(p_fa, 1.0 / (1.0 + snr));
}

double elementary_detection_probability(double p_fa, double snr) {
  require(snr > 0.0, "high-SNR approximation needs snr > 0");
  return std::pow(p_fa, 1.0 / snr);
}

double elementary_detection_probability_beta(double beta, double n_looks) {
  return std::exp(-beta * n_looks);
}

double beta_constant(const RadarModel& radar, const Geometry& geom, double t_total_ms) {
  require(t_total_ms > 0.0, "observation time must be > 0");
  geom.validate();
  const double r2 = geom.range_km * geom.range_km;
  return r2 * r2 * loss_factor(radar, geom) / t_total_ms;
}

double cumulative_detection(double p_de, double n) {
  require(n >= 0.0, "detection count must be >= 0");
  if (n == 0.0) return 0.0;
  // -expm1(n log1p(-p)) keeps precision when p_de or the result is small
  if (p_de >= 1.0) return 1.0;
  return -std::expm1(n * std::log1p(-p_de));
}

double split_detection_probability(const RadarModel& radar, const Geometry& geom,
                                   double t_total_ms, double n_looks) {
  const double b = beta_constant(radar, geom, t_total_ms);
  return cumulative_detection(elementary_detection_probability_beta(b, n_looks), n_looks);
}

double optimal_detection_count(const RadarModel& radar, const Geometry& geom,
                               double t_total_ms) {
  return kGammaR / beta_constant(radar, geom, t_total_ms);
}

double time_constant(const RadarModel& radar, const Geometry& geom) {
  geom.validate();
  const double r2 = geom.range_km * geom.range_km;
  // r^4 ln(p_fa) / (g alpha cos^2 ln(1 - e^-g)), both logs negative
  const double log_miss = std::log1p(-std::exp(-kGammaR));
  return r2 * r2 * std::log(radar.p_fa) /
         (kGammaR * radar.alpha_km4_per_ms * geom.cos2() * log_miss);
}

double optimal_probability(double t_total_ms, double tau_ms) {
  require(t_total_ms >= 0.0, "duration must be >= 0");
  require(tau_ms > 0.0, "time constant must be > 0");
  return -std::expm1(-t_total_ms / tau_ms);
}

RoundingReport rounding_report(const RadarModel& radar, const Geometry& geom,
                               double t_total_ms) {
  RoundingReport rep;
  rep.n_opt = optimal_detection_count(radar, geom, t_total_ms);
  rep.n_floor = std::max(1.0, std::floor(rep.n_opt));
  rep.n_ceil = std::max(1.0, std::ceil(rep.n_opt));
  rep.p_opt = split_detection_probability(radar, geom, t_total_ms, rep.n_opt);
  rep.p_floor = split_detection_probability(radar, geom, t_total_ms, rep.n_floor);
  rep.p_ceil = split_detection_probability(radar, geom, t_total_ms, rep.n_ceil);
  return rep;
}

}  // namespace radalloc
