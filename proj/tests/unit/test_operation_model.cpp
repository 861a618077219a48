#include <doctest.h>

#include <cmath>
#include <random>

#include "ehub/operation_model.hpp"
#include "fixtures.hpp"
#include "random_hub.hpp"

using namespace ehub;

namespace {

double day_cost(const HubTopology& topo, const DayValues& day, const InvestmentPlan& plan, opt::LpStatus* status = nullptr) {
  const auto scen = single_day(topo.energies, day, 1.0);
  auto lp = build_operation_lp(topo, scen, 0, 0, plan);
  const auto sol = opt::solve_lp(lp.model);
  if (status) *status = sol.status;
  return sol.status == opt::LpStatus::Optimal ? sol.objective : NAN;
}

struct Residuals {
  double q = 0.0, r = 0.0, v = 0.0, sign = 0.0;
};

// Dual feasibility rows written out from the matrices, one per primal
// variable, plus the sign domains.
Residuals dual_residuals(const HubTopology& topo, const DayValues& day, double dt, const DualSolution& d) {
  Residuals res;
  const int T = static_cast<int>(d.mu.size());
  const int L = static_cast<int>(topo.branches.size());
  const int M = static_cast<int>(topo.energies.size());
  const int GC = topo.num_converters();
  const int GS = topo.num_storages();
  const Matrix JA = topo.J * topo.A;
  auto worst = [](double& acc, double v) { acc = std::max(acc, std::abs(v)); };
  for (int t = 0; t < T; ++t) {
    const int next = (t + 1) % T;
    for (int g = 0; g < GS; ++g) {
      worst(res.q, d.beta[t][g] - d.beta[next][g] + d.gamma_hi[t][g] - d.gamma_lo[t][g]);
    }
    for (int m = 0; m < M; ++m) {
      worst(res.r, d.phi_hi[t][m] - d.phi_lo[t][m] - day.feedin[m][t] * dt - d.mu[t][m]);
    }
    for (int l = 0; l < L; ++l) {
      double v = 0.0;
      for (int m = 0; m < M; ++m) v += topo.U(m, l) * (day.price[m][t] * dt + d.rho[t][m]) + topo.W(m, l) * d.mu[t][m];
      for (int g = 0; g < GS; ++g) {
        v += JA(topo.storage_device(g), l) * (dt * d.beta[t][g] + d.kappa_hi[t][g] - d.kappa_lo[t][g]);
      }
      for (int g = 0; g < GC; ++g) v += JA(g, l) * d.zeta[t][g];
      for (int i = 0; i < topo.Z.rows; ++i) v += topo.Z(i, l) * d.alpha[t][i];
      v -= topo.K[l] * d.sigma[t][l];
      worst(res.v, v);
    }
    for (const auto* block : {&d.gamma_lo, &d.gamma_hi, &d.zeta, &d.kappa_lo, &d.kappa_hi, &d.rho, &d.phi_lo,
                              &d.phi_hi, &d.sigma}) {
      for (double x : (*block)[t]) res.sign = std::max(res.sign, -x);
    }
  }
  return res;
}

double dual_objective(const HubTopology& topo, const DayValues& day, const InvestmentPlan& plan, const DualSolution& d) {
  double obj = 0.0;
  for (std::size_t t = 0; t < d.mu.size(); ++t) {
    for (int g = 0; g < topo.num_converters(); ++g) obj -= converter_capacity(topo, plan, g) * d.zeta[t][g];
    for (int g = 0; g < topo.num_storages(); ++g) {
      obj -= storage_energy_capacity(topo, plan, g) * d.gamma_hi[t][g];
      obj -= storage_power_capacity(topo, plan, g) * (d.kappa_lo[t][g] + d.kappa_hi[t][g]);
    }
    for (std::size_t m = 0; m < topo.energies.size(); ++m) {
      const double pmax = grid_capacity(topo, plan, static_cast<int>(m));
      obj -= day.demand[m][t] * d.mu[t][m] + pmax * (day.availability[m][t] * d.rho[t][m] + d.phi_hi[t][m]);
    }
  }
  return obj;
}

}  // namespace

TEST_CASE("gas boiler day costs 111.11") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  CHECK(day_cost(topo, fixtures::desk_a_day(), fixtures::desk_a_plan(0, 1, 0, 5)) == doctest::Approx(1000.0 / 9.0));
  CHECK(day_cost(topo, fixtures::desk_a_day(), fixtures::desk_a_plan(1, 1, 4, 5)) == doctest::Approx(1000.0 / 9.0));
}

TEST_CASE("electric boiler day costs 200 and emits 0.2 t") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  const auto ev = evaluate_plan(topo, fixtures::desk_a_scenarios(), fixtures::desk_a_plan(1, 0, 4, 0));
  REQUIRE(ev.feasible);
  CHECK(ev.days[0][0].cost == doctest::Approx(200.0));
  CHECK(ev.days[0][0].emissions == doctest::Approx(0.2));
  CHECK(ev.breakdown.operate[0] == doctest::Approx(73000.0));
  CHECK(ev.breakdown.emissions[0] == doctest::Approx(73.0));
  CHECK(ev.breakdown.investment == doctest::Approx(1000.0));
}

TEST_CASE("zero demand gives zero flows, cost and demand duals") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  auto day = fixtures::desk_a_day();
  for (auto& row : day.demand) std::fill(row.begin(), row.end(), 0.0);
  const auto scen = single_day(topo.energies, day, 1.0);
  EvalOptions opt;
  opt.keep_dispatch = true;
  const auto ev = evaluate_plan(topo, scen, fixtures::desk_a_plan(1, 1, 4, 5), opt);
  REQUIRE(ev.feasible);
  CHECK(ev.days[0][0].cost == 0.0);
  for (const auto& t : ev.days[0][0].flows) {
    for (double v : t) CHECK(v == doctest::Approx(0.0));
  }
  auto lp = build_operation_lp(topo, scen, 0, 0, fixtures::desk_a_plan(1, 1, 4, 5));
  const auto sol = opt::solve_lp(lp.model);
  const auto duals = extract_duals(sol, lp.block, topo);
  for (const auto& t : duals.mu) {
    for (double v : t) CHECK(v == doctest::Approx(0.0));
  }
}

TEST_CASE("annual totals are 365 times the day") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  const auto ev = evaluate_plan(topo, fixtures::desk_a_scenarios(), fixtures::desk_a_plan(0, 1, 0, 5));
  REQUIRE(ev.feasible);
  CHECK(ev.breakdown.operate[0] == doctest::Approx(365.0 * 1000.0 / 9.0));
  CHECK(ev.breakdown.operate[0] == doctest::Approx(40555.6).epsilon(1e-5));
  CHECK(ev.breakdown.emissions[0] == doctest::Approx(365.0 * 2.0 / 0.9 * 0.181));
  CHECK(ev.breakdown.emissions[0] == doctest::Approx(146.8).epsilon(1e-3));
  CHECK(ev.breakdown.total == doctest::Approx(800.0 + 365.0 * 1000.0 / 9.0));
}

TEST_CASE("discounting at 100% halves a one-year operating term") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  auto scen = fixtures::desk_a_scenarios();
  const auto plan = fixtures::desk_a_plan(0, 1, 0, 5);
  const double undiscounted = evaluate_plan(topo, scen, plan).breakdown.npv_operate;
  scen.discount_rate = 1.0;
  CHECK(evaluate_plan(topo, scen, plan).breakdown.npv_operate == doctest::Approx(undiscounted / 2.0));
  CHECK(discount_factor(0.05, 2) == doctest::Approx(1.0 / std::pow(1.05, 3)));
}

TEST_CASE("infeasible plans name the day and year") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  auto scen = grow_years(fixtures::desk_a_scenarios(), 0.0, 0.5, 3);
  // 1 MW of electric boiler covers 1 and 1.5 MW of demand only in year one.
  const auto ev = evaluate_plan(topo, scen, fixtures::desk_a_plan(1, 0, 15, 0));
  CHECK_FALSE(ev.feasible);
  CHECK(ev.bad_year == 1);
  CHECK(ev.bad_day == 0);
  CHECK(ev.reason.find("network infeasible") != std::string::npos);
  CHECK_THROWS_AS(evaluate_plan(topo, scen, fixtures::desk_a_plan(4, 0, 0, 0)), DataError);
}

TEST_CASE("marginal heat price on a gas-only day") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  auto lp = build_operation_lp(topo, fixtures::desk_a_scenarios(), 0, 0, fixtures::desk_a_plan(0, 1, 0, 5));
  const auto sol = opt::solve_lp(lp.model);
  REQUIRE(sol.status == opt::LpStatus::Optimal);
  const auto d = extract_duals(sol, lp.block, topo);
  const int heat = topo.energy_index("heat");
  for (int t = 0; t < 2; ++t) {
    // mu enters the dual objective as -L*mu, so the price is -mu.
    CHECK(-d.mu[t][heat] == doctest::Approx(50.0 / 0.9));
  }
  const auto res = dual_residuals(topo, fixtures::desk_a_day(), 1.0, d);
  CHECK(res.v < 1e-9);
  CHECK(res.sign < 1e-12);
  CHECK(dual_objective(topo, fixtures::desk_a_day(), fixtures::desk_a_plan(0, 1, 0, 5), d) ==
        doctest::Approx(1000.0 / 9.0));
}

TEST_CASE("binding gas capacity has a positive input dual matching a perturbation") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  const auto day = fixtures::desk_a_day();
  const auto plan = fixtures::desk_a_plan(1, 1, 4, 1);
  auto lp = build_operation_lp(topo, fixtures::desk_a_scenarios(), 0, 0, plan);
  const auto sol = opt::solve_lp(lp.model);
  REQUIRE(sol.status == opt::LpStatus::Optimal);
  const auto d = extract_duals(sol, lp.block, topo);
  const int gas = topo.energy_index("gas");
  double rho = 0.0;
  for (int t = 0; t < 2; ++t) {
    CHECK(d.rho[t][gas] > 0.0);
    rho += d.rho[t][gas] * day.availability[gas][t];
  }
  const double base = day_cost(topo, day, plan);
  const double more = day_cost(topo, day, fixtures::desk_a_plan(1, 1, 4, 2));
  CHECK((base - more) / 0.25 == doctest::Approx(rho));
  CHECK(rho == doctest::Approx(2 * (0.9 * 100.0 - 50.0)));
}

TEST_CASE("random hubs: extracted duals are feasible and close the gap") {
  std::mt19937_64 rng(2024);
  int solved = 0;
  for (int k = 0; k < 60; ++k) {
    auto h = fixtures::random_hub(rng);
    const auto topo = build_topology(h.spec);
    const auto plan = k % 3 == 0 ? fixtures::full_plan(topo) : fixtures::random_plan(topo, rng);
    const auto scen = single_day(topo.energies, h.day, 1.0);
    auto lp = build_operation_lp(topo, scen, 0, 0, plan);
    const auto sol = opt::solve_lp(lp.model);
    if (sol.status != opt::LpStatus::Optimal) continue;
    ++solved;
    const auto d = extract_duals(sol, lp.block, topo);
    const auto res = dual_residuals(topo, h.day, 1.0, d);
    CHECK(res.q < 1e-6);
    CHECK(res.r < 1e-6);
    CHECK(res.v < 1e-6);
    CHECK(res.sign < 1e-9);
    const double dual = dual_objective(topo, h.day, plan, d);
    CHECK(std::abs(dual - sol.objective) <= 1e-6 * std::max(1.0, std::abs(sol.objective)));
  }
  CHECK(solved >= 20);
}

TEST_CASE("random hubs: a larger plan never costs more to operate") {
  std::mt19937_64 rng(99);
  int compared = 0;
  for (int k = 0; k < 60; ++k) {
    auto h = fixtures::random_hub(rng);
    const auto topo = build_topology(h.spec);
    const auto a = fixtures::random_plan(topo, rng);
    auto b = a;
    auto grow = [&](std::vector<long>& v, auto bits_of) {
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += static_cast<long>(rng() % (max_count(bits_of(i)) - v[i] + 1));
    };
    grow(b.grid, [&](std::size_t i) { return topo.grid[i].bits; });
    grow(b.units, [&](std::size_t i) { return topo.spec.converters[i].bits; });
    grow(b.storage_power, [&](std::size_t i) { return topo.spec.storages[i].power_bits; });
    grow(b.storage_energy, [&](std::size_t i) { return topo.spec.storages[i].energy_bits; });
    opt::LpStatus sa, sb;
    const double ca = day_cost(topo, h.day, a, &sa);
    const double cb = day_cost(topo, h.day, b, &sb);
    if (sa != opt::LpStatus::Optimal) continue;
    ++compared;
    REQUIRE(sb == opt::LpStatus::Optimal);
    CHECK(cb <= ca + 1e-7 * std::max(1.0, std::abs(ca)));
  }
  CHECK(compared >= 10);
}

TEST_CASE("random hubs: every bus balances each period") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    auto h = fixtures::random_hub(rng);
    const auto topo = build_topology(h.spec);
    EvalOptions opt;
    opt.keep_dispatch = true;
    const auto ev = evaluate_plan(topo, single_day(topo.energies, h.day, 1.0), fixtures::full_plan(topo), opt);
    REQUIRE(ev.feasible);
    for (const auto& flows : ev.days[0][0].flows) {
      for (const auto& bus : topo.buses) {
        const int in = topo.port_index("bus:" + bus + ":in");
        const int out = topo.port_index("bus:" + bus + ":out");
        double balance = 0.0;
        for (std::size_t l = 0; l < topo.branches.size(); ++l) {
          if (topo.branches[l].to == in) balance += flows[l];
          if (topo.branches[l].from == out) balance -= flows[l];
        }
        CHECK(std::abs(balance) < 1e-9);
      }
    }
  }
}

TEST_CASE("operator ties go to the cleaner dispatch") {
  // Gas and electricity cost the same per unit of heat; electricity is cleaner.
  const auto topo = build_topology(fixtures::desk_a_spec());
  auto day = fixtures::desk_a_day();
  for (int t = 0; t < 2; ++t) day.price[1][t] = 90.0;
  const auto ev = evaluate_plan(topo, single_day(topo.energies, day, 1.0), fixtures::desk_a_plan(1, 1, 4, 5));
  REQUIRE(ev.feasible);
  CHECK(ev.days[0][0].cost == doctest::Approx(200.0));
  CHECK(ev.days[0][0].emissions == doctest::Approx(0.2));
}

TEST_CASE("cooperative dispatch respects a cap and a tax") {
  const auto topo = build_topology(fixtures::desk_a_spec());
  const auto scen = fixtures::desk_a_scenarios();
  const auto plan = fixtures::desk_a_plan(1, 1, 4, 5);
  EvalOptions capped;
  capped.mode = DispatchMode::Cooperative;
  capped.emissions_cap = 100.0;
  const auto ev = evaluate_plan(topo, scen, plan, capped);
  REQUIRE(ev.feasible);
  CHECK(ev.breakdown.emissions[0] == doctest::Approx(100.0));

  capped.emissions_cap = 50.0;
  const auto tight = evaluate_plan(topo, scen, plan, capped);
  CHECK_FALSE(tight.feasible);
  CHECK(tight.reason.find("cap") != std::string::npos);

  // Heat from gas costs 55.56 and emits 0.2011 t; from electricity 100 and 0.1 t.
  // Above (100 - 55.56) / (0.2011 - 0.1) per t, electricity wins.
  EvalOptions taxed;
  taxed.mode = DispatchMode::Cooperative;
  taxed.tax = 450.0;
  const auto t = evaluate_plan(topo, scen, plan, taxed);
  REQUIRE(t.feasible);
  CHECK(t.breakdown.emissions[0] == doctest::Approx(73.0));
  CHECK(t.breakdown.tax[0] == doctest::Approx(450.0 * 73.0));
  taxed.tax = 430.0;
  CHECK(evaluate_plan(topo, scen, plan, taxed).breakdown.emissions[0] == doctest::Approx(146.8).epsilon(1e-3));
}
