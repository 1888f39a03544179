// Closed-form detection physics for one ESA radar looking at one target.
//
// The target is a Swerling-1 fluctuating reflector. An observation of length
// T is split into N independent elementary looks (frequency agility); with the
// high-SNR approximation the cumulative probability is maximised when every
// elementary look has P_de = 1/2, which gives P_d = 1 - exp(-T / tau).
#pragma once

#include "radalloc/common.hpp"

namespace radalloc {

struct RadarModel {
  double alpha_km4_per_ms = 1.0;  ///< SNR scale: SNR = alpha * t * cos^2(theta) / r^4
  double p_fa = 1e-4;             ///< false-alarm probability, in (0, 1)
  Vec2 position_km{};
  double boresight_rad = 0.0;     ///< mechanical axis, in (-pi, pi]

  /// Throws DomainError when a field breaks its invariant.
  void validate() const;
};

/// Target position relative to a radar.
struct Geometry {
  double range_km = 1.0;
  double off_axis_rad = 0.0;  ///< angle to the mechanical axis, |theta| < pi/2

  void validate() const;
  double cos2() const {
    const double c = std::cos(off_axis_rad);
    return c * c;
  }

  /// Range and off-axis angle of `target_km` seen from `radar`.
  static Geometry between(const RadarModel& radar, Vec2 target_km);
};

double snr(const RadarModel& radar, const Geometry& geom, double t_obs_ms);

/// Swerling-1 single-look detection probability p_fa^(1/(1+snr)).
double detection_probability(double p_fa, double snr);

/// High-SNR form p_fa^(1/snr). Undefined at snr = 0.
double elementary_detection_probability(double p_fa, double snr);

/// Same quantity in the (beta, N) parameterisation: exp(-beta * N).
double elementary_detection_probability_beta(double beta, double n_looks);

/// beta = r^4 ln(1/p_fa) / (alpha T cos^2 theta).
double beta_constant(const RadarModel& radar, const Geometry& geom, double t_total_ms);

/// 1 - (1 - p_de)^n for real n >= 0.
double cumulative_detection(double p_de, double n);

/// Cumulative probability of splitting `t_total_ms` into `n_looks` equal
/// elementary looks: 1 - (1 - exp(-beta N))^N.
double split_detection_probability(const RadarModel& radar, const Geometry& geom,
                                   double t_total_ms, double n_looks);

/// Real-valued maximiser of split_detection_probability over N.
double optimal_detection_count(const RadarModel& radar, const Geometry& geom,
                               double t_total_ms);

/// tau_r such that the optimally split observation reaches 1 - exp(-T/tau_r).
double time_constant(const RadarModel& radar, const Geometry& geom);

/// 1 - exp(-t/tau).
double optimal_probability(double t_total_ms, double tau_ms);

/// Integer neighbours of the real optimum and what they achieve. Reporting
/// only; the optimisers always work with the real-valued count.
struct RoundingReport {
  double n_opt = 0.0;
  double n_floor = 0.0;
  double n_ceil = 0.0;
  double p_opt = 0.0;
  double p_floor = 0.0;
  double p_ceil = 0.0;
};

RoundingReport rounding_report(const RadarModel& radar, const Geometry& geom,
                               double t_total_ms);

}  // namespace radalloc
