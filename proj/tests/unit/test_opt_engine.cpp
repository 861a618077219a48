#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ehub/opt/complexity.hpp"
#include "ehub/opt/lp.hpp"
#include "ehub/opt/milp.hpp"

using namespace ehub::opt;

namespace {

// max over x in the variable box and row slacks in their sign ranges of
// y^T (A x + s); +inf when the direction is unbounded.
double farkas_support(const Model& m, const std::vector<double>& y) {
  std::vector<double> ya(m.num_variables(), 0.0);
  double total = 0.0;
  for (int i = 0; i < m.num_constraints(); ++i) {
    const auto& r = m.constraint(i);
    for (const auto& t : r.terms) ya[t.var] += y[i] * t.coef;
    // slack s = b - a x: <= rows have s >= 0, >= rows have s <= 0
    if (r.sense == Sense::LessEqual && y[i] > 1e-12) return kInf;
    if (r.sense == Sense::GreaterEqual && y[i] < -1e-12) return kInf;
  }
  for (int j = 0; j < m.num_variables(); ++j) {
    const double c = ya[j];
    if (std::abs(c) < 1e-12) continue;
    const double bound = c > 0 ? m.variable(j).upper : m.variable(j).lower;
    if (!std::isfinite(bound)) return kInf;
    total += c * bound;
  }
  return total;
}

double farkas_rhs(const Model& m, const std::vector<double>& y) {
  double s = 0.0;
  for (int i = 0; i < m.num_constraints(); ++i) s += y[i] * m.constraint(i).rhs;
  return s;
}

// Dual objective from row duals and reduced costs on a boxed LP.
double dual_objective(const Model& m, const LpSolution& sol) {
  double z = m.objective_constant();
  for (int i = 0; i < m.num_constraints(); ++i) z += sol.duals[i] * m.constraint(i).rhs;
  for (int j = 0; j < m.num_variables(); ++j) {
    const double d = sol.reduced_costs[j];
    if (std::abs(d) < 1e-10) continue;
    z += d * (d > 0 ? m.variable(j).lower : m.variable(j).upper);
  }
  return z;
}

Model random_boxed_lp(std::mt19937& rng, int n, int rows) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_int_distribution<int> sense(0, 2);
  Model m;
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    const double lo = std::floor(u(rng));
    const double hi = lo + 1.0 + std::abs(u(rng));
    m.add_variable("x" + std::to_string(j), lo, hi);
    x0[j] = lo + 0.5 * (hi - lo);
    m.set_objective(j, u(rng));
  }
  for (int i = 0; i < rows; ++i) {
    std::vector<Term> terms;
    double act = 0.0;
    for (int j = 0; j < n; ++j) {
      const double c = std::round(u(rng) * 10.0) / 10.0;
      terms.push_back({j, c});
      act += c * x0[j];
    }
    const int s = sense(rng);
    if (s == 0) m.add_constraint("r" + std::to_string(i), terms, Sense::LessEqual, act + std::abs(u(rng)));
    if (s == 1) m.add_constraint("r" + std::to_string(i), terms, Sense::GreaterEqual, act - std::abs(u(rng)));
    if (s == 2) m.add_constraint("r" + std::to_string(i), terms, Sense::Equal, act);
  }
  return m;
}

}  // namespace

TEST_CASE("single bound row gives unit dual") {
  Model m;
  const VarId x = m.add_variable("x", -kInf, kInf);
  m.set_objective(x, 1.0);
  m.add_constraint("c", {{x, 1.0}}, Sense::GreaterEqual, 1.0);
  const auto sol = solve_lp(m);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.duals[0] == doctest::Approx(1.0));
  CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("contradictory rows are infeasible with a valid certificate") {
  Model m;
  const VarId x = m.add_variable("x", -kInf, kInf);
  m.add_constraint("le", {{x, 1.0}}, Sense::LessEqual, 1.0);
  m.add_constraint("ge", {{x, 1.0}}, Sense::GreaterEqual, 2.0);
  const auto sol = solve_lp(m);
  REQUIRE(sol.status == LpStatus::Infeasible);
  REQUIRE(sol.farkas.size() == 2);
  CHECK(farkas_rhs(m, sol.farkas) > farkas_support(m, sol.farkas) + 1e-9);
}

TEST_CASE("infeasibility against variable bounds") {
  Model m;
  const VarId x = m.add_variable("x", 0.0, 1.0);
  const VarId y = m.add_variable("y", 0.0, 1.0);
  m.add_constraint("sum", {{x, 1.0}, {y, 1.0}}, Sense::GreaterEqual, 3.0);
  const auto sol = solve_lp(m);
  REQUIRE(sol.status == LpStatus::Infeasible);
  CHECK(farkas_rhs(m, sol.farkas) > farkas_support(m, sol.farkas) + 1e-9);
}

TEST_CASE("unbounded objective returns an improving ray") {
  Model m;
  const VarId x = m.add_variable("x", 0.0, kInf);
  const VarId y = m.add_variable("y", 0.0, kInf);
  m.set_objective(x, -1.0);
  m.add_constraint("c", {{x, 1.0}, {y, -1.0}}, Sense::LessEqual, 2.0);
  const auto sol = solve_lp(m);
  REQUIRE(sol.status == LpStatus::Unbounded);
  double slope = 0.0;
  for (int j = 0; j < 2; ++j) slope += m.objective()[j] * sol.ray[j];
  CHECK(slope < 0.0);
  CHECK(sol.ray[0] - sol.ray[1] <= 1e-9);
}

TEST_CASE("random boxed LPs satisfy strong duality and dual sign rules") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 6;
    const Model m = random_boxed_lp(rng, n, 1 + trial % 7);
    const auto sol = solve_lp(m);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(m.max_violation(sol.x) < 1e-7);
    const double dual = dual_objective(m, sol);
    CHECK(std::abs(dual - sol.objective) <= 1e-6 * std::max(1.0, std::abs(sol.objective)));
    for (int i = 0; i < m.num_constraints(); ++i) {
      if (m.constraint(i).sense == Sense::LessEqual) CHECK(sol.duals[i] <= 1e-9);
      if (m.constraint(i).sense == Sense::GreaterEqual) CHECK(sol.duals[i] >= -1e-9);
    }
  }
}

TEST_CASE("degenerate LP terminates") {
  // Many redundant rows through the optimum vertex.
  Model m;
  const VarId x = m.add_variable("x", 0.0, kInf);
  const VarId y = m.add_variable("y", 0.0, kInf);
  m.set_objective(x, -1.0);
  m.set_objective(y, -1.0);
  for (int k = 1; k <= 12; ++k) {
    m.add_constraint("d" + std::to_string(k), {{x, double(k)}, {y, double(13 - k)}}, Sense::LessEqual, 13.0);
  }
  const auto sol = solve_lp(m);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-2.0));
}

TEST_CASE("warm basis reproduces the optimum") {
  std::mt19937 rng(11);
  const Model m = random_boxed_lp(rng, 5, 4);
  const auto cold = solve_lp(m);
  REQUIRE(cold.status == LpStatus::Optimal);
  LpOptions opt;
  opt.warm = &cold.basis;
  const auto warm = solve_lp(m, opt);
  REQUIRE(warm.status == LpStatus::Optimal);
  CHECK(warm.objective == doctest::Approx(cold.objective));
  CHECK(warm.iterations <= cold.iterations);
}

TEST_CASE("pivot budget exhaustion is an explicit error") {
  Model m;
  const VarId x = m.add_variable("x", 0.0, kInf);
  const VarId y = m.add_variable("y", 0.0, kInf);
  m.set_objective(x, -1.0);
  m.set_objective(y, -1.0);
  m.add_constraint("cx", {{x, 1.0}}, Sense::LessEqual, 1.0);
  m.add_constraint("cy", {{y, 1.0}}, Sense::LessEqual, 1.0);
  LpOptions opt;
  opt.pivot_budget = 1;
  CHECK_THROWS_AS(solve_lp(m, opt), NumericalFailure);
}

namespace {

struct Knap {
  std::vector<double> value, weight;
  double cap;
};

double knapsack_brute(const Knap& k) {
  const int n = static_cast<int>(k.value.size());
  double best = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    double v = 0.0, w = 0.0;
    for (int j = 0; j < n; ++j) {
      if (mask & (1 << j)) {
        v += k.value[j];
        w += k.weight[j];
      }
    }
    if (w <= k.cap + 1e-9) best = std::max(best, v);
  }
  return best;
}

Model knapsack_model(const Knap& k) {
  Model m;
  std::vector<Term> row;
  for (std::size_t j = 0; j < k.value.size(); ++j) {
    const VarId x = m.add_variable("x" + std::to_string(j), 0, 1, VarKind::Binary);
    m.set_objective(x, -k.value[j]);
    row.push_back({x, k.weight[j]});
  }
  m.add_constraint("cap", row, Sense::LessEqual, k.cap);
  return m;
}

}  // namespace

TEST_CASE("four item knapsack matches enumeration") {
  const Knap k{{10, 13, 7, 8}, {2, 3, 1, 2}, 5};
  const auto res = solve_milp(knapsack_model(k));
  REQUIRE(res.status == MilpStatus::Optimal);
  CHECK(-res.objective == doctest::Approx(knapsack_brute(k)));
  CHECK(res.gap <= 1e-6);
}

TEST_CASE("random small MILPs match exhaustive enumeration") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int nb = 3 + trial % 8;  // up to 10 binaries
    Model m;
    for (int j = 0; j < nb; ++j) {
      m.add_variable("b" + std::to_string(j), 0, 1, VarKind::Binary);
      m.set_objective(j, u(rng));
    }
    const VarId c = m.add_variable("c", 0.0, 5.0);
    m.set_objective(c, u(rng));
    for (int i = 0; i < 3; ++i) {
      std::vector<Term> row;
      for (int j = 0; j < nb; ++j) row.push_back({j, std::round(u(rng))});
      row.push_back({c, u(rng)});
      m.add_constraint("r" + std::to_string(i), row, Sense::LessEqual, 2.0 + std::abs(u(rng)));
    }
    // Oracle: enumerate binaries, solve the continuous remainder exactly by
    // scanning the one-dimensional interval for c.
    double best = kInf;
    for (int mask = 0; mask < (1 << nb); ++mask) {
      double clo = 0.0, chi = 5.0, base = 0.0;
      for (int j = 0; j < nb; ++j) base += ((mask >> j) & 1) * m.objective()[j];
      bool ok = true;
      for (int i = 0; i < 3; ++i) {
        double act = 0.0, cc = 0.0;
        for (const auto& t : m.constraint(i).terms) {
          if (t.var == c) cc = t.coef;
          else act += t.coef * ((mask >> t.var) & 1);
        }
        const double slack = m.constraint(i).rhs - act;
        if (std::abs(cc) < 1e-12) {
          if (slack < -1e-9) ok = false;
        } else if (cc > 0) {
          chi = std::min(chi, slack / cc);
        } else {
          clo = std::max(clo, slack / cc);
        }
      }
      if (!ok || clo > chi + 1e-9) continue;
      const double oc = m.objective()[c];
      best = std::min(best, base + oc * (oc >= 0 ? clo : chi));
    }
    const auto res = solve_milp(m);
    if (!std::isfinite(best)) {
      CHECK(res.status == MilpStatus::Infeasible);
    } else {
      REQUIRE(res.status == MilpStatus::Optimal);
      CHECK(res.objective == doctest::Approx(best).epsilon(1e-7));
    }
  }
}

TEST_CASE("warm start at the optimum closes immediately") {
  const Knap k{{10, 13, 7, 8}, {2, 3, 1, 2}, 5};
  const Model m = knapsack_model(k);
  const auto first = solve_milp(m);
  MilpOptions opt;
  opt.warm_start = first.x;
  const auto res = solve_milp(m, opt);
  CHECK(res.warm_start_accepted);
  CHECK(res.status == MilpStatus::Optimal);
  CHECK(res.gap == doctest::Approx(0.0));
  CHECK(res.objective == doctest::Approx(first.objective));
  CHECK(res.nodes <= first.nodes);
}

TEST_CASE("infeasible warm start is rejected with a reason") {
  const Knap k{{10, 13, 7, 8}, {2, 3, 1, 2}, 5};
  const Model m = knapsack_model(k);
  MilpOptions opt;
  opt.warm_start = std::vector<double>{1, 1, 1, 1};
  const auto res = solve_milp(m, opt);
  CHECK_FALSE(res.warm_start_accepted);
  CHECK_FALSE(res.warm_start_reason.empty());
  CHECK(res.status == MilpStatus::Optimal);
  opt.warm_start = std::vector<double>{0.5, 0, 0, 0};
  const auto res2 = solve_milp(m, opt);
  CHECK_FALSE(res2.warm_start_accepted);
  CHECK(res2.warm_start_reason.find("integral") != std::string::npos);
}

TEST_CASE("heuristic hook installs a better point") {
  const Knap k{{10, 13, 7, 8}, {2, 3, 1, 2}, 5};
  const Model m = knapsack_model(k);
  int calls = 0;
  MilpOptions opt;
  opt.heuristic_hook = [&](const std::vector<double>&, double) -> std::optional<std::vector<double>> {
    ++calls;
    return std::vector<double>{1, 0, 1, 1};  // value 25, the optimum
  };
  const auto res = solve_milp(m, opt);
  CHECK(calls >= 1);
  CHECK(-res.objective == doctest::Approx(25.0));
  REQUIRE(!res.trajectory.empty());
  for (std::size_t i = 1; i < res.trajectory.size(); ++i) {
    CHECK(res.trajectory[i].incumbent <= res.trajectory[i - 1].incumbent);
  }
}

TEST_CASE("integer variables with general bounds") {
  Model m;
  const VarId x = m.add_variable("x", 0, 10, VarKind::Integer);
  const VarId y = m.add_variable("y", 0, 10, VarKind::Integer);
  m.set_objective(x, -1.0);
  m.set_objective(y, -1.0);
  m.add_constraint("a", {{x, 2.0}, {y, 2.0}}, Sense::LessEqual, 7.0);
  const auto res = solve_milp(m);
  REQUIRE(res.status == MilpStatus::Optimal);
  CHECK(res.objective == doctest::Approx(-3.0));
}

TEST_CASE("complexity formulas") {
  ComplexityDims d;
  d.S = 1, d.T = 2, d.Y = 1, d.M = 3, d.GS = 0, d.GC = 2, d.NA = 4, d.ND = 2;
  CHECK(count_complexity(d).integer_vars == 5);
  CHECK(count_complexity(d).binary_vars == 4 * 3 + 2 * 2);
  CHECK(count_complexity(ComplexityDims{}) == ComplexityCounts{});
}

TEST_CASE("lp text dump lists sections") {
  Model m;
  const VarId x = m.add_variable("x", 0, 1, VarKind::Binary);
  const VarId y = m.add_variable("y", -kInf, kInf);
  m.set_objective(x, 2.0);
  m.add_constraint("c1", {{x, 1.0}, {y, -1.0}}, Sense::GreaterEqual, 0.0);
  std::ostringstream out;
  write_lp_text(m, out);
  const std::string s = out.str();
  CHECK(s.find("minimize") != std::string::npos);
  CHECK(s.find("c1: 1 x - 1 y >= 0") != std::string::npos);
  CHECK(s.find("y free") != std::string::npos);
  CHECK(s.find("binary\n  x") != std::string::npos);
}
