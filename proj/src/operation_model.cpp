#include "ehub/operation_model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace ehub {

using opt::kInf;
using opt::Model;
using opt::Sense;
using opt::Term;
using opt::VarId;
using opt::VarKind;

InvestmentPlan InvestmentPlan::zero(const HubTopology& topo) {
  InvestmentPlan p;
  p.grid.assign(topo.energies.size(), 0);
  p.units.assign(topo.num_converters(), 0);
  p.storage_power.assign(topo.num_storages(), 0);
  p.storage_energy.assign(topo.num_storages(), 0);
  return p;
}

long max_count(int bits) { return (1L << bits) - 1; }

double grid_capacity(const HubTopology& topo, const InvestmentPlan& plan, int m) {
  return static_cast<double>(plan.grid[m]) * topo.grid[m].capacity_step;
}

double converter_capacity(const HubTopology& topo, const InvestmentPlan& plan, int g) {
  return static_cast<double>(plan.units[g]) * topo.spec.converters[g].unit_rating;
}

double storage_power_capacity(const HubTopology& topo, const InvestmentPlan& plan, int s) {
  return static_cast<double>(plan.storage_power[s]) * topo.spec.storages[s].power_step;
}

double storage_energy_capacity(const HubTopology& topo, const InvestmentPlan& plan, int s) {
  return static_cast<double>(plan.storage_energy[s]) * topo.spec.storages[s].energy_step;
}

double investment_cost(const HubTopology& topo, const InvestmentPlan& plan) {
  double c = 0.0;
  for (std::size_t m = 0; m < topo.energies.size(); ++m) {
    c += topo.grid[m].capacity_cost * grid_capacity(topo, plan, static_cast<int>(m));
  }
  for (int g = 0; g < topo.num_converters(); ++g) c += topo.spec.converters[g].unit_cost * plan.units[g];
  for (int s = 0; s < topo.num_storages(); ++s) {
    c += topo.spec.storages[s].power_cost * storage_power_capacity(topo, plan, s);
    c += topo.spec.storages[s].energy_cost * storage_energy_capacity(topo, plan, s);
  }
  return c;
}

void check_plan(const HubTopology& topo, const InvestmentPlan& plan) {
  auto check = [](const std::vector<long>& v, std::size_t n, const char* what) {
    if (v.size() != n) throw DataError(std::string("plan has the wrong number of ") + what + " entries");
  };
  check(plan.grid, topo.energies.size(), "grid");
  check(plan.units, topo.num_converters(), "converter");
  check(plan.storage_power, topo.num_storages(), "storage power");
  check(plan.storage_energy, topo.num_storages(), "storage energy");
  auto range = [](long v, int bits, const std::string& name) {
    if (v < 0 || v > max_count(bits)) {
      throw DataError("plan value " + std::to_string(v) + " for " + name + " is outside 0.." +
                      std::to_string(max_count(bits)));
    }
  };
  for (std::size_t m = 0; m < plan.grid.size(); ++m) range(plan.grid[m], topo.grid[m].bits, "grid " + topo.energies[m]);
  for (int g = 0; g < topo.num_converters(); ++g) {
    range(plan.units[g], topo.spec.converters[g].bits, topo.spec.converters[g].id);
  }
  for (int s = 0; s < topo.num_storages(); ++s) {
    range(plan.storage_power[s], topo.spec.storages[s].power_bits, topo.spec.storages[s].id + " power");
    range(plan.storage_energy[s], topo.spec.storages[s].energy_bits, topo.spec.storages[s].id + " energy");
  }
}

std::string describe_plan(const HubTopology& topo, const InvestmentPlan& plan) {
  std::ostringstream out;
  bool first = true;
  auto sep = [&]() {
    if (!first) out << ", ";
    first = false;
  };
  for (int g = 0; g < topo.num_converters(); ++g) {
    if (plan.units[g] == 0) continue;
    sep();
    out << topo.spec.converters[g].id << ':' << plan.units[g];
  }
  for (std::size_t m = 0; m < topo.energies.size(); ++m) {
    if (plan.grid[m] == 0) continue;
    sep();
    out << topo.energies[m] << ' ' << grid_capacity(topo, plan, static_cast<int>(m)) << " MW";
  }
  for (int s = 0; s < topo.num_storages(); ++s) {
    if (plan.storage_power[s] == 0 && plan.storage_energy[s] == 0) continue;
    sep();
    out << topo.spec.storages[s].id << ' ' << storage_power_capacity(topo, plan, s) << " MW/"
        << storage_energy_capacity(topo, plan, s) << " MWh";
  }
  if (first) out << "nothing";
  return out.str();
}

LinExpr LinExpr::scaled(double k) const {
  LinExpr e{constant * k, terms};
  for (auto& t : e.terms) t.coef *= k;
  return e;
}

double LinExpr::value(const std::vector<double>& x) const {
  double v = constant;
  for (const auto& t : terms) v += t.coef * x[t.var];
  return v;
}

PlanExprs fixed_plan_exprs(const HubTopology& topo, const InvestmentPlan& plan) {
  PlanExprs e;
  for (std::size_t m = 0; m < topo.energies.size(); ++m) {
    e.pmax.push_back(LinExpr::of(grid_capacity(topo, plan, static_cast<int>(m))));
  }
  for (int g = 0; g < topo.num_converters(); ++g) e.conv_cap.push_back(LinExpr::of(converter_capacity(topo, plan, g)));
  for (int s = 0; s < topo.num_storages(); ++s) {
    e.stor_power.push_back(LinExpr::of(storage_power_capacity(topo, plan, s)));
    e.stor_energy.push_back(LinExpr::of(storage_energy_capacity(topo, plan, s)));
  }
  return e;
}

namespace {

std::string idx(const std::string& prefix, const char* name, int t, int k) {
  return prefix + name + "_" + std::to_string(t) + "_" + std::to_string(k);
}

// Row "lhs - expr.terms <= expr.constant".
void add_le_expr(Model& model, std::string name, std::vector<Term> lhs, const LinExpr& expr, const char* group) {
  for (const auto& t : expr.terms) lhs.push_back({t.var, -t.coef});
  model.add_constraint(std::move(name), std::move(lhs), Sense::LessEqual, expr.constant, group);
}

}  // namespace

DayBlock add_day_block(Model& model, const HubTopology& topo, const DayValues& day, double dt, const PlanExprs& plan,
                       const std::string& prefix) {
  const int T = static_cast<int>(day.price.at(0).size());
  const int L = static_cast<int>(topo.branches.size());
  const int M = static_cast<int>(topo.energies.size());
  const int GC = topo.num_converters();
  const int GS = topo.num_storages();
  const Matrix JA = topo.J * topo.A;

  DayBlock b;
  b.periods = T;
  b.dt = dt;
  b.V.assign(T, {});
  b.Q.assign(T, {});
  b.r.assign(T, {});
  for (int t = 0; t < T; ++t) {
    for (int l = 0; l < L; ++l) {
      const double lo = topo.K[l] ? 0.0 : -kInf;
      b.V[t].push_back(model.add_variable(idx(prefix, "V", t, l), lo, kInf, VarKind::Continuous, "primal.V"));
    }
    for (int g = 0; g < GS; ++g) {
      b.Q[t].push_back(model.add_variable(idx(prefix, "Q", t, g), 0.0, kInf, VarKind::Continuous, "primal.Q"));
    }
    for (int m = 0; m < M; ++m) {
      b.r[t].push_back(model.add_variable(idx(prefix, "r", t, m), 0.0, kInf, VarKind::Continuous, "primal.r"));
    }
  }
  auto ja_terms = [&](int dev, int t, double k) {
    std::vector<Term> terms;
    for (int l = 0; l < L; ++l) {
      if (JA(dev, l) != 0.0) terms.push_back({b.V[t][l], k * JA(dev, l)});
    }
    return terms;
  };

  for (auto* rows : {&b.z, &b.soc, &b.qcap, &b.ccap, &b.slo, &b.shi, &b.inp, &b.out, &b.rcap}) rows->assign(T, {});
  for (int t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < topo.out_ports.size(); ++i) {
      std::vector<Term> terms;
      for (int l = 0; l < L; ++l) {
        if (topo.Z(static_cast<int>(i), l) != 0.0) terms.push_back({b.V[t][l], topo.Z(static_cast<int>(i), l)});
      }
      b.z[t].push_back(model.add_constraint(idx(prefix, "z", t, static_cast<int>(i)), terms, Sense::Equal, 0.0,
                                            "primal.z"));
    }
    for (int g = 0; g < GS; ++g) {
      const int prev = (t + T - 1) % T;
      auto terms = ja_terms(topo.storage_device(g), t, dt);
      terms.push_back({b.Q[t][g], 1.0});
      terms.push_back({b.Q[prev][g], -1.0});
      b.soc[t].push_back(model.add_constraint(idx(prefix, "soc", t, g), terms, Sense::Equal, 0.0, "primal.soc"));
      add_le_expr(model, idx(prefix, "qcap", t, g), {{b.Q[t][g], 1.0}}, plan.stor_energy[g], "primal.qcap");
      b.qcap[t].push_back(model.num_constraints() - 1);
    }
    for (int g = 0; g < GC; ++g) {
      add_le_expr(model, idx(prefix, "ccap", t, g), ja_terms(g, t, 1.0), plan.conv_cap[g], "primal.ccap");
      b.ccap[t].push_back(model.num_constraints() - 1);
    }
    for (int g = 0; g < GS; ++g) {
      add_le_expr(model, idx(prefix, "slo", t, g), ja_terms(topo.storage_device(g), t, -1.0), plan.stor_power[g],
                  "primal.slo");
      b.slo[t].push_back(model.num_constraints() - 1);
      add_le_expr(model, idx(prefix, "shi", t, g), ja_terms(topo.storage_device(g), t, 1.0), plan.stor_power[g],
                  "primal.shi");
      b.shi[t].push_back(model.num_constraints() - 1);
    }
    for (int m = 0; m < M; ++m) {
      std::vector<Term> u, w;
      for (int l = 0; l < L; ++l) {
        if (topo.U(m, l) != 0.0) u.push_back({b.V[t][l], topo.U(m, l)});
        if (topo.W(m, l) != 0.0) w.push_back({b.V[t][l], topo.W(m, l)});
      }
      add_le_expr(model, idx(prefix, "inp", t, m), u, plan.pmax[m].scaled(day.availability[m][t]), "primal.inp");
      b.inp[t].push_back(model.num_constraints() - 1);
      w.push_back({b.r[t][m], -1.0});
      b.out[t].push_back(model.add_constraint(idx(prefix, "out", t, m), w, Sense::Equal, day.demand[m][t], "primal.out"));
      add_le_expr(model, idx(prefix, "rcap", t, m), {{b.r[t][m], 1.0}}, plan.pmax[m], "primal.rcap");
      b.rcap[t].push_back(model.num_constraints() - 1);

      for (const auto& term : u) {
        b.purchase.push_back({term.var, day.price[m][t] * dt * term.coef});
        b.cost.push_back({term.var, day.price[m][t] * dt * term.coef});
        b.emissions.push_back({term.var, day.emissions[m][t] * dt * term.coef});
      }
      if (day.feedin[m][t] != 0.0) {
        b.revenue.push_back({b.r[t][m], day.feedin[m][t] * dt});
        b.cost.push_back({b.r[t][m], -day.feedin[m][t] * dt});
      }
    }
  }
  return b;
}

OperationLp build_operation_lp(const HubTopology& topo, const ScenarioSet& scen, int s, int y,
                               const InvestmentPlan& plan) {
  OperationLp lp;
  lp.block = add_day_block(lp.model, topo, scen.at(s, y), scen.dt, fixed_plan_exprs(topo, plan), "");
  lp.model.add_objective(lp.block.cost);
  return lp;
}

DualSolution extract_duals(const opt::LpSolution& sol, const DayBlock& b, const HubTopology& topo) {
  if (sol.status != opt::LpStatus::Optimal) throw std::invalid_argument("duals need an optimal LP solution");
  auto neg = [&](const std::vector<std::vector<opt::RowId>>& rows, bool sign_restricted) {
    std::vector<std::vector<double>> out(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
      for (opt::RowId r : rows[t]) {
        double v = -sol.duals[r];
        if (sign_restricted && v < 0.0 && v > -1e-7) v = 0.0;
        out[t].push_back(v);
      }
    }
    return out;
  };
  auto reduced = [&](const std::vector<std::vector<VarId>>& vars, bool only_real) {
    std::vector<std::vector<double>> out(vars.size());
    for (std::size_t t = 0; t < vars.size(); ++t) {
      for (std::size_t k = 0; k < vars[t].size(); ++k) {
        double v = sol.reduced_costs[vars[t][k]];
        if (only_real && !topo.K[k]) v = 0.0;
        if (v < 0.0 && v > -1e-7) v = 0.0;
        out[t].push_back(v);
      }
    }
    return out;
  };
  DualSolution d;
  d.alpha = neg(b.z, false);
  d.beta = neg(b.soc, false);
  d.gamma_hi = neg(b.qcap, true);
  d.gamma_lo = reduced(b.Q, false);
  d.zeta = neg(b.ccap, true);
  d.kappa_lo = neg(b.slo, true);
  d.kappa_hi = neg(b.shi, true);
  d.rho = neg(b.inp, true);
  d.mu = neg(b.out, false);
  d.phi_hi = neg(b.rcap, true);
  d.phi_lo = reduced(b.r, false);
  d.sigma = reduced(b.V, true);
  return d;
}

double CostBreakdown::max_emissions() const {
  double m = -kInf;
  for (double e : emissions) m = std::max(m, e);
  return emissions.empty() ? 0.0 : m;
}

double discount_factor(double rate, int year_index) { return 1.0 / std::pow(1.0 + rate, year_index + 1); }

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

double eval_terms(const std::vector<Term>& terms, const std::vector<double>& x) {
  double v = 0.0;
  for (const auto& t : terms) v += t.coef * x[t.var];
  return v;
}

DayOutcome outcome_of(const DayBlock& b, const std::vector<double>& x, bool keep) {
  DayOutcome o;
  o.purchase = eval_terms(b.purchase, x);
  o.revenue = eval_terms(b.revenue, x);
  o.cost = o.purchase - o.revenue;
  o.emissions = eval_terms(b.emissions, x);
  if (keep) {
    for (int t = 0; t < b.periods; ++t) {
      std::vector<double> f, q, r;
      for (VarId v : b.V[t]) f.push_back(x[v]);
      for (VarId v : b.Q[t]) q.push_back(x[v]);
      for (VarId v : b.r[t]) r.push_back(x[v]);
      o.flows.push_back(std::move(f));
      o.soc.push_back(std::move(q));
      o.exports.push_back(std::move(r));
    }
  }
  return o;
}

// Re-solves with the primary objective capped at its optimum and emissions
// minimized, so ties resolve toward the cleaner dispatch.
std::vector<double> tie_break(Model model, const std::vector<Term>& primary, double optimum,
                              const std::vector<Term>& emissions, double tol, const std::vector<double>& fallback) {
  model.add_constraint("tie_cost", primary, Sense::LessEqual, optimum + tol * std::max(1.0, std::abs(optimum)));
  for (int j = 0; j < model.num_variables(); ++j) model.set_objective(j, 0.0);
  model.set_objective_constant(0.0);
  model.add_objective(emissions);
  const auto sol = opt::solve_lp(model);
  return sol.status == opt::LpStatus::Optimal ? sol.x : fallback;
}

}  // namespace

Evaluation evaluate_plan(const HubTopology& topo, const ScenarioSet& scen, const InvestmentPlan& plan,
                         const EvalOptions& options) {
  check_plan(topo, plan);
  const int S = scen.num_days();
  const int Y = scen.num_years();
  Evaluation ev;
  ev.days.assign(Y, std::vector<DayOutcome>(S));
  ev.breakdown.investment = investment_cost(topo, plan);
  const PlanExprs exprs = fixed_plan_exprs(topo, plan);

  const bool coupled =
      options.mode == DispatchMode::Cooperative && (options.emissions_cap.has_value() || options.tax > 0.0);
  std::vector<std::string> failures(static_cast<std::size_t>(S) * Y);
  if (!coupled) {
    parallel_for(S * Y, options.threads, [&](int k) {
      const int y = k / S;
      const int s = k % S;
      Model model;
      const DayBlock b = add_day_block(model, topo, scen.at(s, y), scen.dt, exprs, "");
      model.add_objective(b.cost);
      const auto sol = opt::solve_lp(model);
      if (sol.status != opt::LpStatus::Optimal) {
        failures[k] = "network infeasible";
        return;
      }
      const auto x = tie_break(model, b.cost, sol.objective, b.emissions, options.tie_tolerance, sol.x);
      ev.days[y][s] = outcome_of(b, x, options.keep_dispatch);
    });
  } else {
    parallel_for(Y, options.threads, [&](int y) {
      Model model;
      std::vector<DayBlock> blocks;
      std::vector<Term> objective, emissions;
      for (int s = 0; s < S; ++s) {
        blocks.push_back(add_day_block(model, topo, scen.at(s, y), scen.dt, exprs, "d" + std::to_string(s) + "_"));
        const double w = 365.0 * scen.probability(s);
        for (const auto& t : blocks.back().cost) objective.push_back({t.var, w * t.coef});
        for (const auto& t : blocks.back().emissions) emissions.push_back({t.var, w * t.coef});
      }
      if (options.emissions_cap) {
        model.add_constraint("cap", emissions, Sense::LessEqual, *options.emissions_cap, "cap");
      }
      if (options.tax > 0.0) {
        const VarId tax = model.add_variable("tax", 0.0, kInf);
        std::vector<Term> row = {{tax, 1.0}};
        for (const auto& t : emissions) row.push_back({t.var, -options.tax * t.coef});
        model.add_constraint("tax_floor", row, Sense::GreaterEqual, 0.0, "tax");
        objective.push_back({tax, 1.0});
      }
      model.add_objective(objective);
      // Network feasibility is checked per day so the report can name the day.
      const auto sol = opt::solve_lp(model);
      if (sol.status != opt::LpStatus::Optimal) {
        for (int s = 0; s < S; ++s) {
          Model day;
          const DayBlock b = add_day_block(day, topo, scen.at(s, y), scen.dt, exprs, "");
          day.add_objective(b.cost);
          if (opt::solve_lp(day).status != opt::LpStatus::Optimal) {
            failures[static_cast<std::size_t>(y) * S + s] = "network infeasible";
            return;
          }
        }
        failures[static_cast<std::size_t>(y) * S] = "emissions cap infeasible";
        return;
      }
      const auto x = tie_break(model, objective, sol.objective, emissions, options.tie_tolerance, sol.x);
      for (int s = 0; s < S; ++s) ev.days[y][s] = outcome_of(blocks[s], x, options.keep_dispatch);
    });
  }
  for (int y = 0; y < Y; ++y) {
    for (int s = 0; s < S; ++s) {
      const auto& f = failures[static_cast<std::size_t>(y) * S + s];
      if (!f.empty()) {
        ev.feasible = false;
        ev.reason = f + " (day " + std::to_string(s) + ", year " + std::to_string(y + 1) + ")";
        ev.bad_day = s;
        ev.bad_year = y;
        return ev;
      }
    }
  }

  auto& br = ev.breakdown;
  br.operate.assign(Y, 0.0);
  br.revenue.assign(Y, 0.0);
  br.emissions.assign(Y, 0.0);
  br.tax.assign(Y, 0.0);
  for (int y = 0; y < Y; ++y) {
    for (int s = 0; s < S; ++s) {
      const double w = 365.0 * scen.probability(s);
      br.operate[y] += w * ev.days[y][s].purchase;
      br.revenue[y] += w * ev.days[y][s].revenue;
      br.emissions[y] += w * ev.days[y][s].emissions;
    }
    br.tax[y] = std::max(options.tax * br.emissions[y], 0.0);
    br.npv_operate += (br.operate[y] - br.revenue[y] + br.tax[y]) * discount_factor(scen.discount_rate, y);
  }
  br.total = br.investment + br.npv_operate;
  ev.feasible = true;
  return ev;
}

}  // namespace ehub
