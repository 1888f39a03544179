#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "radalloc/fleet_planner.hpp"
#include "radalloc/waterfill.hpp"

using namespace radalloc;
using doctest::Approx;

namespace {

const double kScale = calibrate_scale(2.5807, 0.4814, 45.0);

std::vector<double> calibrated_taus(std::initializer_list<double> distances_km) {
  std::vector<double> taus;
  for (double d : distances_km) taus.push_back(kScale * std::pow(d, 4));
  return taus;
}

double kkt_level(const AllocationProblem& p, const std::vector<double>& t, std::size_t i) {
  return p.weights[i] / p.taus_ms[i] * std::exp(-t[i] / p.taus_ms[i]);
}

}  // namespace

TEST_CASE("positive part") {
  CHECK(positive_part(-3.0) == 0.0);
  CHECK(positive_part(0.0) == 0.0);
  CHECK(positive_part(2.5) == 2.5);
}

TEST_CASE("lambda for trivial instances") {
  SUBCASE("one target takes the whole horizon") {
    const auto p = AllocationProblem::uniform({4.0}, 10.0);
    CHECK(solve_lambda(p) == Approx(10.0 / 4.0 * std::exp(-10.0 / 4.0)));
    const auto a = allocate(p);
    CHECK(a.times_ms[0] == Approx(10.0));
  }
  SUBCASE("identical targets split evenly") {
    const auto a = allocate(AllocationProblem::uniform({3.0, 3.0}, 8.0));
    CHECK(a.times_ms[0] == Approx(4.0));
    CHECK(a.times_ms[1] == Approx(4.0));
  }
  SUBCASE("all weights zero") {
    AllocationProblem p{{1.0, 2.0}, {0.0, 0.0}, 5.0};
    CHECK_THROWS_AS(solve_lambda(p), NoAllocationError);
  }
}

TEST_CASE("lambda on the second sensor's targets matches the KKT level of its durations") {
  const auto p = AllocationProblem::uniform(calibrated_taus({26, 45, 33}), 5.0);
  const double lambda = solve_lambda(p);
  CHECK(lambda / p.horizon_ms == Approx(0.1576).epsilon(0.002 / 0.1576));
  // the printed durations give the same level to within their rounding
  const std::vector<double> printed{1.1702, 1.8768, 1.9530};
  for (std::size_t i = 0; i < 3; ++i) CHECK(kkt_level(p, printed, i) == Approx(lambda / p.horizon_ms).epsilon(2e-3));
}

TEST_CASE("first sensor's allocation reproduces the printed durations") {
  const auto a = allocate(AllocationProblem::uniform(calibrated_taus({45, 51, 50}), 5.0));
  CHECK(a.times_ms[0] == Approx(2.5807).epsilon(0.01));
  CHECK(a.times_ms[1] == Approx(1.0109).epsilon(0.01));
  CHECK(a.times_ms[2] == Approx(1.4084).epsilon(0.01));
  CHECK(a.active.size() == 3);
}

TEST_CASE("closed form on the third sensor's targets") {
  const auto p = AllocationProblem::uniform(calibrated_taus({52, 25, 41}), 5.0);
  const auto cf = closed_form_allocate(p);
  REQUIRE(cf.has_value());
  CHECK(cf->times_ms[0] == Approx(0.9224).epsilon(0.01));
  CHECK(cf->times_ms[1] == Approx(1.1462).epsilon(0.01));
  CHECK(cf->times_ms[2] == Approx(2.9314).epsilon(0.01));
  CHECK(closed_form_allocate(AllocationProblem::uniform({7.0}, 3.0))->times_ms[0] == Approx(3.0));
  const auto even = closed_form_allocate(AllocationProblem::uniform({2.0, 2.0, 2.0, 2.0}, 6.0));
  for (double t : even->times_ms) CHECK(t == Approx(1.5));
}

TEST_CASE("closed form declines when a target would get no time") {
  // a huge tau is not worth starting when the short one still pays more at t = T
  CHECK_FALSE(closed_form_allocate(AllocationProblem::uniform({1.0, 1000.0}, 1.0)).has_value());
  // a saturated short target hands the remainder to the slow one
  CHECK(closed_form_allocate(AllocationProblem::uniform({0.01, 1000.0}, 1.0)).has_value());
  CHECK_FALSE(closed_form_allocate(AllocationProblem{{1.0, 2.0}, {1.0, 0.0}, 1.0}).has_value());
}

TEST_CASE("weighted two-direction shift") {
  const auto a = allocate(AllocationProblem{{26.3235, 1.86223}, {0.18, 0.74}, 30.0});
  CHECK(a.times_ms[0] == Approx(21.08).epsilon(0.3 / 21.08));
  CHECK(a.times_ms[1] == Approx(8.92).epsilon(0.3 / 8.92));
}

TEST_CASE("zero-weight targets are inactive and get nothing") {
  const auto a = allocate(AllocationProblem{{1.0, 2.0, 3.0}, {1.0, 0.0, 1.0}, 4.0});
  CHECK(a.times_ms[1] == 0.0);
  CHECK(a.active == std::vector<std::size_t>{0, 2});
  CHECK(a.times_ms[0] + a.times_ms[2] == Approx(4.0));
}

TEST_CASE("invalid problems") {
  CHECK_THROWS_AS(allocate(AllocationProblem::uniform({}, 1.0)), DomainError);
  CHECK_THROWS_AS(allocate(AllocationProblem::uniform({1.0, -1.0}, 1.0)), DomainError);
  CHECK_THROWS_AS(allocate(AllocationProblem::uniform({1.0}, 0.0)), DomainError);
  CHECK_THROWS_AS(allocate(AllocationProblem{{1.0, 2.0}, {1.0}, 1.0}), DomainError);
}

TEST_CASE("grid oracle agrees with literal enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> taus, eps;
    for (int i = 0; i < 3; ++i) {
      taus.push_back(std::exp(-1.0 + 4.0 * u(rng)));
      eps.push_back(u(rng));
    }
    CHECK(oracle::simplex_grid_max(taus, eps, 5.0, 120) ==
          Approx(oracle::simplex_grid_max_enumerated(taus, eps, 5.0, 120)).epsilon(1e-14));
  }
}

TEST_CASE("random three-target instances beat the simplex grid") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    AllocationProblem p;
    p.horizon_ms = 1.0 + 20.0 * u(rng);
    for (int i = 0; i < 3; ++i) {
      p.taus_ms.push_back(std::exp(-2.0 + 6.0 * u(rng)));
      p.weights.push_back(u(rng));
    }
    const auto a = allocate(p);
    CHECK(a.criterion >= oracle::simplex_grid_max(p.taus_ms, p.weights, p.horizon_ms, 2000) - 1e-6);
    CHECK(std::accumulate(a.times_ms.begin(), a.times_ms.end(), 0.0) == Approx(p.horizon_ms).epsilon(1e-9));
  }
}

TEST_CASE("look counts follow the durations") {
  const RadarModel radar{4e6, 1e-4};
  const std::vector<Geometry> geoms{{30.0, 0.1}, {80.0, 0.0}, {45.0, -0.3}};
  AllocationProblem p = AllocationProblem::uniform({}, 5.0);
  for (const auto& g : geoms) p.taus_ms.push_back(time_constant(radar, g));
  p.weights.assign(3, 1.0);
  const auto a = allocate(p);
  const auto n = elementary_counts(radar, a, geoms);
  for (std::size_t i = 0; i < 3; ++i) {
    if (a.times_ms[i] == 0.0)
      CHECK(n[i] == 0.0);
    else
      CHECK(n[i] == Approx(optimal_detection_count(radar, geoms[i], a.times_ms[i])));
  }
  Allocation doubled = a;
  for (auto& t : doubled.times_ms) t *= 2.0;
  const auto n2 = elementary_counts(radar, doubled, geoms);
  for (std::size_t i = 0; i < 3; ++i) CHECK(n2[i] == Approx(2.0 * n[i]));
}
