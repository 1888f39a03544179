#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "radalloc/prob_space.hpp"
#include "radalloc/scenario.hpp"

using namespace radalloc;
using doctest::Approx;

namespace {

// Brute-force cell masses: Cartesian midpoint rule on a fine square lattice,
// each sample assigned to whichever annulus-sector cell contains it.
Matrix cartesian_masses(const GaussianPrior& prior, const SurveillanceGrid& grid, double pitch_km) {
  Matrix rho(grid.n_range, grid.n_directions, 0.0);
  const double span_x = 9.0 * prior.std_km.x;
  const double span_y = 9.0 * prior.std_km.y;
  const auto nx = static_cast<long>(std::ceil(2 * span_x / pitch_km));
  const auto ny = static_cast<long>(std::ceil(2 * span_y / pitch_km));
  const double hx = 2 * span_x / static_cast<double>(nx);
  const double hy = 2 * span_y / static_cast<double>(ny);
  for (long a = 0; a < nx; ++a) {
    const double x = prior.mean_km.x - span_x + (static_cast<double>(a) + 0.5) * hx;
    for (long b = 0; b < ny; ++b) {
      const double y = prior.mean_km.y - span_y + (static_cast<double>(b) + 0.5) * hy;
      const double r = std::hypot(x - grid.origin_km.x, y - grid.origin_km.y);
      const double phi = std::atan2(y - grid.origin_km.y, x - grid.origin_km.x);
      if (r < grid.r_min_km || r >= grid.r_max_km) continue;
      if (phi < grid.sector_start_rad || phi >= grid.sector_end_rad) continue;
      const auto i = static_cast<std::size_t>((r - grid.r_min_km) / grid.ring_width_km());
      const auto j = static_cast<std::size_t>((phi - grid.sector_start_rad) / grid.sector_width_rad());
      rho(std::min(i, grid.n_range - 1), std::min(j, grid.n_directions - 1)) += prior.density({x, y}) * hx * hy;
    }
  }
  return rho;
}

}  // namespace

TEST_CASE("grid construction") {
  const auto one = build_grid(10.0, 20.0, 1, 1, 0.0, 1.0);
  CHECK(one.ring_center_km(0) == Approx(15.0));
  CHECK(one.direction_center_rad(0) == Approx(0.5));

  const auto g = build_grid(5.0, 125.0, 240, 40, 0.0, 2.0);
  CHECK(g.sector_width_rad() == Approx(0.05));
  for (std::size_t i = 1; i < g.n_range; ++i) CHECK(g.ring_center_km(i) > g.ring_center_km(i - 1));
  CHECK(g.direction_of(0.07).value() == 1);
  CHECK_FALSE(g.direction_of(2.5).has_value());

  CHECK_THROWS_AS(build_grid(0.0, 10.0, 1, 1, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(build_grid(10.0, 5.0, 1, 1, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(build_grid(1.0, 5.0, 0, 1, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(build_grid(1.0, 5.0, 1, 1, 1.0, 1.0), DomainError);
}

TEST_CASE("prior integration") {
  SUBCASE("narrow prior inside one cell") {
    const auto g = build_grid(10.0, 50.0, 4, 4, 0.0, 1.0);
    const double phi = g.direction_center_rad(2);
    const double r = g.ring_center_km(1);
    const auto rho = integrate_prior({{r * std::cos(phi), r * std::sin(phi)}, {0.1, 0.1}}, g);
    CHECK(rho(1, 2) == Approx(1.0).epsilon(1e-6));
    CHECK(rho.sum() - rho(1, 2) < 1e-9);
  }
  SUBCASE("prior on the boundary of two mirror cells splits evenly") {
    const auto g = build_grid(10.0, 50.0, 2, 2, -0.2, 0.2);
    const auto rho = integrate_prior({{30.0, 0.0}, {1.5, 1.5}}, g);
    CHECK(rho(0, 0) == Approx(rho(0, 1)).epsilon(1e-6));
    CHECK(rho(1, 0) == Approx(rho(1, 1)).epsilon(1e-6));
  }
  SUBCASE("masses agree with a fine Cartesian quadrature") {
    const auto g = build_grid(20.0, 40.0, 4, 3, 0.3, 0.9, {1.0, -2.0});
    // straddles ring and direction boundaries, elongated along x
    const GaussianPrior prior{{1.0 + 30.0 * std::cos(0.5), -2.0 + 30.0 * std::sin(0.5)}, {2.0, 1.0}};
    const auto rho = integrate_prior(prior, g);
    const auto ref = cartesian_masses(prior, g, 0.02);
    for (std::size_t i = 0; i < g.n_range; ++i)
      for (std::size_t j = 0; j < g.n_directions; ++j) CHECK(rho(i, j) == Approx(ref(i, j)).scale(1).epsilon(1e-3));
    CHECK(rho.sum() == Approx(ref.sum()).epsilon(1e-3));
  }
  SUBCASE("mass outside the grid is lost") {
    const auto g = build_grid(10.0, 20.0, 2, 2, 0.0, 0.5);
    const auto rho = integrate_prior({{100.0, 100.0}, {1.0, 1.0}}, g);
    CHECK(rho.sum() == 0.0);
  }
}

TEST_CASE("cell detection probability") {
  const RadarModel radar{2e6, 1e-4};
  CHECK(cell_detection_probability(0.0, 40.0, 3.0, radar, 0.1) == 0.0);
  CHECK(cell_detection_probability(0.7, 40.0, 0.0, radar, 0.1) == 0.0);
  CHECK(cell_detection_probability(0.7, 40.0, 1e12, radar, 0.1) == Approx(0.7));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double mass = u(rng), r = 5 + 80 * u(rng), t = 0.1 + 30 * u(rng), th = (u(rng) - 0.5) * 2.4;
    const double expected = mass * elementary_detection_probability(radar.p_fa, snr(radar, {r, th}, t));
    CHECK(cell_detection_probability(mass, r, t, radar, th) == Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("per-target direction probability") {
  const RadarModel radar{1e6, 1e-4};
  DirectionOccupancy occ;
  occ.ranges_km = {10.0, 20.0, 30.0};
  occ.mass = {{0.0, 0.4, 0.0}, {0.2, 0.0, 0.3}};
  CHECK(occ.target_probability(0, 2.0, radar) == Approx(cell_detection_probability(0.4, 20.0, 2.0, radar, 0.0)));
  const double split = occ.target_probability(1, 2.0, radar);
  CHECK(split == Approx(cell_detection_probability(0.2, 10.0, 2.0, radar, 0.0) +
                        cell_detection_probability(0.3, 30.0, 2.0, radar, 0.0)));
  CHECK(split <= 0.5);
  CHECK(occ.total_mass() == Approx(0.9));
}

TEST_CASE("union of independent detections") {
  const std::vector<double> one{0.3};
  CHECK(union_probability(one) == Approx(0.3));
  const std::vector<double> two{0.3, 0.6};
  CHECK(union_probability(two) == Approx(0.3 + 0.6 - 0.18));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(1 + trial % 12);
    for (auto& x : p) x = u(rng);
    CHECK(union_probability(p) == Approx(oracle::complement_product(p)).epsilon(1e-12));
  }
  const std::vector<double> many(21, 0.1);
  CHECK_THROWS_AS(union_probability(many), CapacityError);
}

TEST_CASE("parametric fit") {
  SUBCASE("exact model data") {
    const auto t = fit_sample_times(30.0);
    std::vector<double> p;
    for (double x : t) p.push_back(std::exp(-2.0 * std::pow(x, -1.5)));
    const auto fit = fit_parametric_model(t, p);
    CHECK(fit.omega == Approx(2.0).epsilon(1e-9));
    CHECK(fit.exponent == Approx(1.5).epsilon(1e-9));
    CHECK(fit.fit_error < 1e-9);
  }
  SUBCASE("one target at one range has exponent one") {
    const RadarModel radar{3e6, 1e-4};
    DirectionOccupancy occ;
    occ.ranges_km = {42.0};
    occ.mass = {{1.0}};
    const auto m = model_direction(occ, radar, 30.0);
    REQUIRE(m.has_value());
    CHECK(m->fit.exponent == Approx(1.0).epsilon(1e-9));
    CHECK(m->gamma_s == Approx(std::numbers::ln2).epsilon(1e-9));
    CHECK(m->tau_ms == Approx(time_constant(radar, {42.0, 0.0})).epsilon(1e-8));
  }
  SUBCASE("reported error is the max deviation over every sample") {
    const std::vector<double> t{1.0, 2.0, 4.0, 8.0, 16.0};
    const std::vector<double> p{0.05, 0.22, 0.41, 0.7, 0.8};
    const auto fit = fit_parametric_model(t, p);
    double worst = 0.0;
    for (std::size_t s = 0; s < t.size(); ++s)
      worst = std::max(worst, std::abs(std::exp(-fit.omega / std::pow(t[s], fit.exponent)) - p[s]));
    CHECK(fit.fit_error == Approx(worst).epsilon(1e-14));
    CHECK(fit.samples_used == 5);
  }
  SUBCASE("too few usable samples") {
    const std::vector<double> t{1.0, 2.0, 3.0};
    const std::vector<double> p{0.0, 0.5, 1.0};
    CHECK_THROWS_AS(fit_parametric_model(t, p), DomainError);
  }
}

TEST_CASE("splitting exponent gamma_s") {
  CHECK(solve_gamma_s(1.0) == Approx(std::numbers::ln2).epsilon(1e-12));
  // the residual rises with n at fixed gamma and rises with gamma at the root,
  // so the root falls as n grows
  double prev = std::numeric_limits<double>::infinity();
  for (double n = 0.25; n <= 4.0; n += 0.25) {
    const double g = solve_gamma_s(n);
    CHECK(std::abs(gamma_s_residual(g, n)) <= 1e-12);
    CHECK(gamma_s_residual(g, n + 0.01) > 0.0);
    CHECK(g < prev);
    prev = g;
  }
  CHECK_THROWS_AS(solve_gamma_s(0.0), DomainError);
  CHECK_THROWS_AS(solve_gamma_s(-1.0), DomainError);
}

TEST_CASE("direction time constant") {
  // with n = 1 the model reduces to the single-target law, whose omega is (ln 2)^2 tau
  const double tau = 3.7;
  const double ln2 = std::numbers::ln2;
  CHECK(direction_time_constant(ln2 * ln2 * tau, 1.0, solve_gamma_s(1.0)) == Approx(tau).epsilon(1e-12));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double omega = 0.01 + 50 * u(rng), n = 0.3 + 3 * u(rng), t = 0.1 + 30 * u(rng);
    const double g = solve_gamma_s(n);
    const double tj = direction_time_constant(omega, n, g);
    CHECK(tj > 0.0);
    CHECK(optimal_probability(t, tj) >= std::exp(-omega * std::pow(t, -n)) - 1e-12);
    // splitting into m looks reaches exactly 1 - exp(-t/tau_j)
    const double m = direction_look_count(omega, n, g, t);
    const double per_look = std::exp(-omega * std::pow(t / m, -n));
    CHECK(1.0 - std::pow(1.0 - per_look, m) == Approx(optimal_probability(t, tj)).epsilon(1e-9));
  }
}

TEST_CASE("direction allocation") {
  const RadarModel radar{2e7, 1e-4, {}, 0.5};
  SUBCASE("a single occupied direction gets the whole horizon") {
    const auto g = build_grid(5.0, 100.0, 50, 8, 0.0, 1.0);
    const std::vector<GaussianPrior> priors{{{40.0 * std::cos(0.55), 40.0 * std::sin(0.55)}, {0.2, 0.2}}};
    const auto a = allocate_directions(g, priors, radar, {}, 12.0);
    const auto j = g.direction_of(0.55).value();
    CHECK(a.times_ms[j] == Approx(12.0));
    CHECK(std::accumulate(a.times_ms.begin(), a.times_ms.end(), 0.0) == Approx(12.0));
    REQUIRE(a.model_for(j) != nullptr);
    CHECK(a.looks[j] > 0.0);
  }
  SUBCASE("no mass in the sector") {
    const auto g = build_grid(5.0, 100.0, 50, 8, 0.0, 1.0);
    const std::vector<GaussianPrior> priors{{{-40.0, -40.0}, {0.2, 0.2}}};
    CHECK_THROWS_AS(allocate_directions(g, priors, radar, {}, 12.0), NoAllocationError);
  }
  SUBCASE("weight vector length is checked") {
    const auto g = build_grid(5.0, 100.0, 50, 8, 0.0, 1.0);
    const std::vector<GaussianPrior> priors{{{40.0, 10.0}, {0.2, 0.2}}};
    CHECK_THROWS_AS(allocate_directions(g, priors, radar, {1.0, 2.0}, 12.0), DomainError);
  }
}

TEST_CASE("bundled four-target scenario") {
  const auto plain = run(parse_scenario(RADALLOC_SCENARIO_DIR "/four_gaussians.json"));
  const auto weighted = run(parse_scenario(RADALLOC_SCENARIO_DIR "/four_gaussians_weighted.json"));
  const auto& a = plain.prob->allocation;
  const auto& w = weighted.prob->allocation;

  // direction numbers as printed (1-based): far target 4, lone target 12, aligned pair 20
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < a.n_directions; ++j)
    if (a.times_ms[j] > 0.0) active.push_back(j + 1);
  CHECK(active == std::vector<std::size_t>{12, 20});
  CHECK(a.times_ms[11] + a.times_ms[19] == Approx(30.0).epsilon(1e-12));
  CHECK(a.times_ms[3] == 0.0);
  REQUIRE(a.model_for(3) != nullptr);
  CHECK(a.model_for(19)->mass == Approx(2.0).epsilon(1e-6));

  // weights move time toward the heaviest direction and raise its probability
  CHECK(w.times_ms[19] > a.times_ms[19]);
  CHECK(w.probabilities[19] > a.probabilities[19]);
  CHECK(w.times_ms[3] == 0.0);
}
