#include <doctest.h>

#include <cmath>
#include <random>

#include "ehub/search.hpp"
#include "fixtures.hpp"
#include "random_hub.hpp"

using namespace ehub;

namespace {

const auto kEbOnly = fixtures::desk_a_plan(1, 0, 4, 0);
const auto kAbOnly = fixtures::desk_a_plan(0, 1, 0, 5);

ParetoPoint point(double target, double upper, double lower, double achieved) {
  ParetoPoint p;
  p.target = target;
  p.feasible = true;
  p.upper = upper;
  p.lower = lower;
  p.achieved = achieved;
  return p;
}

}  // namespace

TEST_CASE("desk trace: gas boiler and a quarter megawatt of gas are added together") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  const auto scen = fixtures::desk_a_scenarios();
  const auto r = neighbor_search(topo, scen, kEbOnly, 100.0, 2);
  REQUIRE(r.trace.size() == 2);
  CHECK(r.trace[0].second.cost == doctest::Approx(74000.0));
  CHECK(r.score.cost == doctest::Approx(67500.0));
  CHECK(r.score.emissions == doctest::Approx(365.0 * 2.0 * (0.25 * 0.181 + 0.775 * 0.1)));
  CHECK(r.plan == fixtures::desk_a_plan(1, 1, 4, 1));

  // One quantity at a time cannot pair the boiler with its fuel.
  const auto single = neighbor_search(topo, scen, kEbOnly, 100.0, 1);
  CHECK_FALSE(single.improved());
  CHECK(single.score.cost == doctest::Approx(74000.0));
}

TEST_CASE("a local optimum is returned unchanged") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  const auto scen = fixtures::desk_a_scenarios();
  const auto start = fixtures::desk_a_plan(1, 1, 4, 1);
  const auto r = neighbor_search(topo, scen, start, 100.0, 2);
  CHECK(r.plan == start);
  CHECK(r.trace.size() == 1);
}

TEST_CASE("no slack under the target means no search") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  const auto scen = fixtures::desk_a_scenarios();
  const auto r = neighbor_search(topo, scen, kEbOnly, 73.0, 2);
  CHECK(r.plan == kEbOnly);
  CHECK(r.evaluations == 1);
}

TEST_CASE("randomized: never costlier, never over the target, never infeasible") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int runs = 0;
  while (runs < 100) {
    const auto h = fixtures::random_hub(rng);
    const auto topo = build_topology(h.spec);
    const auto scen = single_day({"elec", "gas", "heat"}, h.day, 1.0);
    const auto start = fixtures::random_plan(topo, rng);
    const auto s0 = score_plan(topo, scen, start);
    if (!s0.feasible) continue;
    const double cap = s0.emissions + std::abs(s0.emissions) * u(rng) + 1.0;
    const int order = 1 + runs % 2;
    CAPTURE(runs);
    const auto r = neighbor_search(topo, scen, start, cap, order);
    const auto again = score_plan(topo, scen, r.plan);
    REQUIRE(again.feasible);
    CHECK(again.emissions <= cap + 1e-9 * std::max(1.0, cap));
    CHECK(again.cost <= s0.cost + 1e-9 * std::max(1.0, std::abs(s0.cost)));
    CHECK(again.cost == doctest::Approx(r.score.cost));
    for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k].second.cost < r.trace[k - 1].second.cost);
    ++runs;
  }
}

TEST_CASE("order two ends no costlier than order one") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int runs = 0;
  while (runs < 20) {
    const auto h = fixtures::random_hub(rng, false);
    const auto topo = build_topology(h.spec);
    const auto scen = single_day({"elec", "gas", "heat"}, h.day, 1.0);
    const auto start = fixtures::random_plan(topo, rng);
    const auto s0 = score_plan(topo, scen, start);
    if (!s0.feasible) continue;
    const double cap = s0.emissions + std::abs(s0.emissions) * u(rng) + 1.0;
    CAPTURE(runs);
    const auto one = neighbor_search(topo, scen, start, cap, 1);
    const auto two = neighbor_search(topo, scen, start, cap, 2);
    CHECK(two.score.cost <= one.score.cost + 1e-9 * std::max(1.0, std::abs(one.score.cost)));
    ++runs;
  }
}

TEST_CASE("warm start is the cheapest pool member at the given price") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  const auto scen = fixtures::desk_a_scenarios();
  const std::vector<InvestmentPlan> pool = {kAbOnly, kEbOnly};
  CHECK(pick_warm_start(topo, scen, pool, 0.0) == kAbOnly);
  // 41,355.6 + 146,811 > 74,000 + 73,000
  CHECK(pick_warm_start(topo, scen, pool, 1000.0) == kEbOnly);
  CHECK(pick_warm_start(topo, scen, {kEbOnly}, 0.0) == kEbOnly);
  CHECK_THROWS_AS(pick_warm_start(topo, scen, {}, 0.0), std::invalid_argument);
}

TEST_CASE("bound sharing across targets") {
  SUBCASE("a cheaper tighter solution replaces the looser incumbent") {
    std::vector<ParetoPoint> pts = {point(100.0, 70000.0, 60000.0, 95.0), point(80.0, 65000.0, 64000.0, 78.0)};
    share_bounds(pts);
    CHECK(pts[0].upper == 65000.0);
    CHECK(pts[0].achieved == 78.0);
    CHECK(pts[0].target == 100.0);
    CHECK(pts[0].source == PointSource::InheritedFromTighter);
    CHECK(pts[1].source == PointSource::Solved);
  }
  SUBCASE("a looser lower bound lifts a tighter one") {
    std::vector<ParetoPoint> pts = {point(100.0, 70000.0, 66000.0, 95.0), point(80.0, 75000.0, 60000.0, 78.0)};
    share_bounds(pts);
    CHECK(pts[1].lower == 66000.0);
    CHECK(pts[1].source == PointSource::BoundFromLooser);
    CHECK(pts[0].upper == 70000.0);
  }
  SUBCASE("after sharing, upper bounds fall and lower bounds rise as targets loosen") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<ParetoPoint> pts;
      for (int k = 1; k <= 6; ++k) {
        const double target = 20.0 * k;
        const double lower = 1000.0 * u(rng);
        pts.push_back(point(target, lower + 500.0 * u(rng), lower, target * u(rng)));
      }
      share_bounds(pts);
      for (std::size_t k = 1; k < pts.size(); ++k) {
        CHECK(pts[k].upper <= pts[k - 1].upper + 1e-9);
        CHECK(pts[k].lower <= pts[k - 1].lower + 1e-9);
      }
      for (const auto& p : pts) {
        CHECK(p.lower <= p.upper + 1e-9);
        CHECK(p.achieved <= p.target + 1e-9);
      }
    }
  }
}
