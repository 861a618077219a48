#include "ehub/frameworks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

namespace ehub {

using opt::kInf;
using opt::Model;
using opt::Sense;
using opt::Term;
using opt::VarId;
using opt::VarKind;

Framework parse_framework(const std::string& s) {
  std::string t = s;
  if (!t.empty() && (t[0] == 'f' || t[0] == 'F')) t = t.substr(1);
  if (t == "1") return Framework::F1;
  if (t == "2") return Framework::F2;
  if (t == "3") return Framework::F3;
  if (t == "4") return Framework::F4;
  throw std::invalid_argument("unknown framework '" + s + "' (expected 1-4)");
}

namespace {

double weight(const ScenarioSet& scen, int s) { return 365.0 * scen.probability(s); }

double rel(double a) { return std::max(1.0, std::abs(a)); }

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

PlanningModel build_planning_model(const HubTopology& topo, const ScenarioSet& scen, bool independent_operator,
                                   double big_m) {
  PlanningModel pm;
  pm.big_m = big_m;
  pm.bits = discretize_plan(pm.model, topo);
  const PlanExprs exprs = pm.bits.exprs();
  const int S = scen.num_days();
  const int Y = scen.num_years();
  pm.days.assign(Y, {});
  pm.operators.assign(independent_operator ? Y : 0, {});
  pm.year_cost.assign(Y, {});
  pm.year_emissions.assign(Y, {});
  for (int y = 0; y < Y; ++y) {
    for (int s = 0; s < S; ++s) {
      const std::string prefix = "y" + std::to_string(y + 1) + "s" + std::to_string(s) + "_";
      if (independent_operator) {
        pm.operators[y].push_back(build_strong_duality(pm.model, topo, scen.at(s, y), scen.dt, pm.bits, big_m, prefix));
        pm.days[y].push_back(pm.operators[y].back().primal);
      } else {
        pm.days[y].push_back(add_day_block(pm.model, topo, scen.at(s, y), scen.dt, exprs, prefix));
      }
      const double w = weight(scen, s);
      for (const auto& t : pm.days[y].back().cost) pm.year_cost[y].push_back({t.var, w * t.coef});
      for (const auto& t : pm.days[y].back().emissions) pm.year_emissions[y].push_back({t.var, w * t.coef});
    }
  }
  return pm;
}

opt::ComplexityDims dims_of(const HubTopology& topo, const ScenarioSet& scen) {
  opt::ComplexityDims d;
  d.S = scen.num_days();
  d.T = scen.periods;
  d.Y = scen.num_years();
  d.L = static_cast<long>(topo.branches.size());
  d.M = static_cast<long>(topo.energies.size());
  d.Pout = static_cast<long>(topo.out_ports.size());
  d.GC = topo.num_converters();
  d.GS = topo.num_storages();
  auto uniform = [](const std::vector<int>& v, const char* what) -> long {
    for (int b : v) {
      if (b != v.front()) throw std::invalid_argument(std::string("bit counts differ across ") + what);
    }
    return v.empty() ? 0 : v.front();
  };
  std::vector<int> na, nb, nc, nd;
  for (const auto& g : topo.grid) na.push_back(g.bits);
  for (const auto& s : topo.spec.storages) {
    nb.push_back(s.energy_bits);
    nc.push_back(s.power_bits);
  }
  for (const auto& c : topo.spec.converters) nd.push_back(c.bits);
  d.NA = uniform(na, "grid connections");
  d.NB = uniform(nb, "storage energy");
  d.NC = uniform(nc, "storage power");
  d.ND = uniform(nd, "converters");
  return d;
}

namespace {

struct Setup {
  bool independent = false;
  std::optional<double> cap;
  double tax = 0.0;   // discounted, floored per year
  double scoc = 0.0;  // undiscounted
  bool hook = false;
};

std::string status_of(opt::MilpStatus s) {
  switch (s) {
    case opt::MilpStatus::Optimal: return "optimal";
    case opt::MilpStatus::Feasible: return "feasible";
    case opt::MilpStatus::Infeasible: return "infeasible";
    case opt::MilpStatus::Unbounded: return "unbounded";
    case opt::MilpStatus::NoSolution: return "no-solution";
  }
  return "?";
}

void add_objective(PlanningModel& pm, const HubTopology& topo, const ScenarioSet& scen, const Setup& st) {
  auto& m = pm.model;
  m.add_objective(pm.bits.investment_cost(topo).terms);
  for (int y = 0; y < scen.num_years(); ++y) {
    const double disc = discount_factor(scen.discount_rate, y);
    m.add_objective(pm.year_cost[y], disc);
    if (st.tax > 0.0) {
      const VarId t = m.add_variable("tax_y" + std::to_string(y + 1), 0.0, kInf, VarKind::Continuous, "tax");
      std::vector<Term> row = {{t, 1.0}};
      for (const auto& e : pm.year_emissions[y]) row.push_back({e.var, -st.tax * e.coef});
      m.add_constraint("tax_floor_y" + std::to_string(y + 1), row, Sense::GreaterEqual, 0.0, "tax");
      m.add_objective(t, disc);
    }
    if (st.scoc > 0.0) m.add_objective(pm.year_emissions[y], st.scoc);
    if (st.cap) {
      m.add_constraint("cap_y" + std::to_string(y + 1), pm.year_emissions[y], Sense::LessEqual, *st.cap, "cap");
    }
  }
}

std::vector<double> encode_point(const PlanningModel& pm, const InvestmentPlan& plan) {
  std::vector<double> x(pm.model.num_variables(), 0.0);
  for (const auto& [v, val] : pm.bits.encode(plan)) x[v] = val;
  return x;
}

// Least worst-year emissions over the same feasible set, for infeasible targets.
void attach_certificate(FrameworkResult& r, const HubTopology& topo, const ScenarioSet& scen, const Setup& st,
                        double M, const EconConfig& econ) {
  auto pm = build_planning_model(topo, scen, st.independent, M);
  const VarId z = pm.model.add_variable("worst_year", -kInf, kInf);
  for (int y = 0; y < scen.num_years(); ++y) {
    std::vector<Term> row = {{z, 1.0}};
    for (const auto& e : pm.year_emissions[y]) row.push_back({e.var, -e.coef});
    pm.model.add_constraint("worst", row, Sense::GreaterEqual, 0.0);
  }
  pm.model.set_objective(z, 1.0);
  auto opts = econ.milp;
  opts.warm_start.reset();
  opts.heuristic_hook = nullptr;
  const auto res = opt::solve_milp(pm.model, opts);
  if (res.x.empty()) return;
  r.certificate = pm.bits.decode(res.x);
  r.certificate_emissions = res.objective;
  std::ostringstream s;
  s << "emissions target " << *st.cap << " t/yr is below the least achievable " << res.objective
    << " t/yr (plan: " << describe_plan(topo, *r.certificate) << ")";
  r.message = s.str();
}

FrameworkResult solve_planning(Framework f, const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ,
                               const Setup& st) {
  Stopwatch clock;
  FrameworkResult r;
  r.framework = f;
  r.plan = InvestmentPlan::zero(topo);
  double M = econ.big_m > 0.0 ? econ.big_m : default_big_m(scen);
  opt::MilpResult res;
  PlanningModel pm;
  for (int escalation = 0;; ++escalation) {
    pm = build_planning_model(topo, scen, st.independent, st.independent ? M : 0.0);
    add_objective(pm, topo, scen, st);
    auto opts = econ.milp;
    if (econ.warm_start) opts.warm_start = encode_point(pm, *econ.warm_start);
    if (st.hook && econ.use_heuristic && st.cap) {
      const double cap = *st.cap;
      opts.heuristic_hook = [&, cap](const std::vector<double>& x, double) -> std::optional<std::vector<double>> {
        InvestmentPlan start;
        try {
          start = pm.bits.decode(x);
          check_plan(topo, start);
        } catch (const DataError&) {
          return std::nullopt;
        }
        const auto found = neighbor_search(topo, scen, start, cap, econ.neighbor_order, econ.threads);
        if (!found.improved()) return std::nullopt;
        auto y = x;
        for (const auto& [v, val] : pm.bits.encode(found.plan)) y[v] = val;
        return y;
      };
    }
    res = opt::solve_milp(pm.model, opts);
    if (!st.independent || res.x.empty()) break;
    std::vector<LinearizedProduct> products;
    for (const auto& year : pm.operators) {
      for (const auto& ob : year) products.insert(products.end(), ob.objective.products.begin(), ob.objective.products.end());
    }
    const auto report = validate_products(products, res.x);
    if (!report.tripped) break;
    r.warnings.push_back(report.message);
    if (escalation >= econ.max_escalations) {
      r.warnings.push_back("big-M still binding after " + std::to_string(escalation) + " escalations");
      break;
    }
    M *= 10.0;
  }
  r.big_m = st.independent ? M : 0.0;
  r.complexity = opt::tally_model(pm.model);
  r.status = status_of(res.status);
  r.nodes = res.nodes;
  r.gap = res.gap;
  r.bound = res.bound;
  r.objective = res.objective;
  r.trajectory = res.trajectory;
  r.warm_start_used = res.warm_start_accepted;
  r.warm_start_reason = res.warm_start_reason;
  if (!res.limit.empty()) r.warnings.push_back("search stopped by " + res.limit + " limit");
  if (st.tax > 0.0) r.price = st.tax;
  if (st.scoc > 0.0) r.price = st.scoc;

  if (res.x.empty()) {
    r.feasible = false;
    if (res.status == opt::MilpStatus::Infeasible && st.cap) attach_certificate(r, topo, scen, st, M, econ);
    if (r.message.empty()) r.message = "no feasible plan found (" + r.status + ")";
    r.seconds = clock.seconds();
    return r;
  }

  r.plan = pm.bits.decode(res.x);
  // Re-price independently of the solver.
  EvalOptions eo;
  eo.threads = econ.threads;
  if (!st.independent) {
    eo.mode = DispatchMode::Cooperative;
    eo.emissions_cap = st.cap;
    eo.tax = st.tax;
  }
  const auto ev = evaluate_plan(topo, scen, r.plan, eo);
  if (!ev.feasible) {
    r.feasible = false;
    r.status = "verification-failed";
    r.message = "solver plan failed re-evaluation: " + ev.reason;
    r.seconds = clock.seconds();
    return r;
  }
  r.feasible = true;
  r.breakdown = ev.breakdown;
  r.total = ev.breakdown.total;
  r.total_ex_tax = r.total;
  for (int y = 0; y < scen.num_years(); ++y) r.total_ex_tax -= ev.breakdown.tax[y] * discount_factor(scen.discount_rate, y);
  r.achieved_emissions = ev.breakdown.max_emissions();

  double expected = r.total;
  if (st.scoc > 0.0) {
    for (double e : ev.breakdown.emissions) expected += st.scoc * e;
  }
  if (std::abs(expected - res.objective) > 1e-6 * rel(expected)) {
    r.warnings.push_back("re-priced objective " + fmt(expected) + " differs from solver objective " +
                         fmt(res.objective));
  }
  if (st.cap && r.achieved_emissions > *st.cap + 1e-6 * rel(*st.cap)) {
    r.feasible = false;
    r.status = "verification-failed";
    r.message = "re-evaluated emissions " + fmt(r.achieved_emissions) + " exceed the cap " + fmt(*st.cap);
  }
  r.seconds = clock.seconds();
  return r;
}

using Responder = std::function<FrameworkResult(double, const EconConfig&)>;

// Smallest price on a doubling-then-bisection grid whose response meets the cap.
// Each probe is warm-started from the best earlier response at its price.
FrameworkResult bisect_price(Framework f, const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ,
                             const Responder& respond, const char* kind) {
  Stopwatch clock;
  const double cap = *econ.emissions_cap;
  std::vector<PriceProbe> probes;
  std::vector<InvestmentPlan> pool;
  if (econ.warm_start) pool.push_back(*econ.warm_start);
  auto probe = [&](double price, FrameworkResult& out) {
    EconConfig e = econ;
    if (!pool.empty()) e.warm_start = pick_warm_start(topo, scen, pool, price);
    out = respond(price, e);
    if (out.feasible) pool.push_back(out.plan);
    probes.push_back({price, out.feasible, out.achieved_emissions, out.total, out.plan});
    return out.feasible && out.achieved_emissions <= cap + 1e-6 * rel(cap);
  };
  FrameworkResult best;
  FrameworkResult last;
  double lo = 0.0, hi = 0.0;
  if (!probe(0.0, best)) {
    hi = 1.0;
    while (!probe(hi, last)) {
      lo = hi;
      if (hi >= econ.price_limit) {
        last.framework = f;
        last.feasible = false;
        last.status = std::string(kind) + "-infeasible";
        last.message = "emissions target " + fmt(cap) + " t/yr not reached at the price limit " +
                       fmt(econ.price_limit) + "; emissions floor there is " + fmt(last.achieved_emissions) + " t/yr";
        last.probes = probes;
        last.iterations = static_cast<int>(probes.size());
        last.seconds = clock.seconds();
        return last;
      }
      hi = std::min(hi * 2.0, econ.price_limit);
    }
    best = last;
    while (hi - lo > econ.price_tolerance) {
      const double mid = 0.5 * (lo + hi);
      FrameworkResult r;
      if (probe(mid, r)) {
        hi = mid;
        best = r;
      } else {
        lo = mid;
      }
    }
  }
  best.framework = f;
  best.price = hi;
  best.probes = probes;
  best.iterations = static_cast<int>(probes.size());
  auto sorted = probes;
  std::sort(sorted.begin(), sorted.end(), [](const PriceProbe& a, const PriceProbe& b) { return a.price < b.price; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].feasible && sorted[i - 1].feasible &&
        sorted[i].emissions > sorted[i - 1].emissions + 1e-6 * rel(sorted[i - 1].emissions)) {
      best.warnings.push_back("emissions rise from " + fmt(sorted[i - 1].emissions) + " to " +
                              fmt(sorted[i].emissions) + " between prices " + fmt(sorted[i - 1].price) + " and " +
                              fmt(sorted[i].price));
    }
  }
  best.seconds = clock.seconds();
  return best;
}

}  // namespace

FrameworkResult solve_f1(const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ) {
  Setup st;
  st.cap = econ.emissions_cap;
  return solve_planning(Framework::F1, topo, scen, econ, st);
}

FrameworkResult respond_to_tax(const HubTopology& topo, const ScenarioSet& scen, double tax, const EconConfig& econ) {
  Setup st;
  st.tax = tax;
  auto r = solve_planning(Framework::F2, topo, scen, econ, st);
  r.price = tax;
  return r;
}

FrameworkResult solve_f2(const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ) {
  if (!econ.emissions_cap) return respond_to_tax(topo, scen, 0.0, econ);
  if (!(econ.price_tolerance > 0.0)) throw std::invalid_argument("price tolerance must be positive");
  return bisect_price(Framework::F2, topo, scen, econ,
                      [&](double p, const EconConfig& e) { return respond_to_tax(topo, scen, p, e); }, "tax");
}

FrameworkResult solve_f3(const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ) {
  Setup st;
  st.independent = true;
  st.cap = econ.emissions_cap;
  st.hook = true;
  return solve_planning(Framework::F3, topo, scen, econ, st);
}

FrameworkResult respond_to_scoc(const HubTopology& topo, const ScenarioSet& scen, double scoc, const EconConfig& econ) {
  Setup st;
  st.independent = true;
  st.scoc = scoc;
  auto r = solve_planning(Framework::F4, topo, scen, econ, st);
  r.price = scoc;
  return r;
}

FrameworkResult solve_f4(const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ) {
  if (!econ.emissions_cap) return respond_to_scoc(topo, scen, 0.0, econ);
  if (!(econ.price_tolerance > 0.0)) throw std::invalid_argument("price tolerance must be positive");
  return bisect_price(Framework::F4, topo, scen, econ,
                      [&](double p, const EconConfig& e) { return respond_to_scoc(topo, scen, p, e); }, "scoc");
}

namespace {

// One day's dispatch LP with the plan bits (and the day's emission allowance)
// as fixed continuous columns, so their reduced costs give cut coefficients.
struct BendersSub {
  Model model;
  std::vector<std::pair<VarId, VarId>> links;  // (sub column, master column)
};

BendersSub make_sub(const HubTopology& topo, const DayValues& day, double dt, const PlanBits& master_bits,
                    std::optional<VarId> master_allowance) {
  BendersSub sub;
  Model scratch;
  PlanBits copy = discretize_plan(scratch, topo);
  // Rebuild the same expansions on fresh continuous columns of the sub model.
  PlanBits local;
  local.energies = copy.energies;
  local.converters = copy.converters;
  local.storages = copy.storages;
  for (std::size_t q = 0; q < copy.all.size(); ++q) {
    BitExpansion b = copy.all[q];
    b.count = -1;
    b.x.clear();
    for (int n = 0; n < b.bits; ++n) {
      b.x.push_back(sub.model.add_variable("x_" + b.target + "_" + std::to_string(n), 0.0, 1.0));
      sub.links.emplace_back(b.x.back(), master_bits.all[q].x[n]);
    }
    local.all.push_back(std::move(b));
  }
  const DayBlock block = add_day_block(sub.model, topo, day, dt, local.exprs(), "");
  sub.model.add_objective(block.cost);
  if (master_allowance) {
    const VarId e = sub.model.add_variable("allowance", -kInf, kInf);
    sub.links.emplace_back(e, *master_allowance);
    auto row = block.emissions;
    row.push_back({e, -1.0});
    sub.model.add_constraint("allowance", row, Sense::LessEqual, 0.0);
  }
  return sub;
}

}  // namespace

FrameworkResult solve_f1_benders(const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ) {
  Stopwatch clock;
  FrameworkResult r;
  r.framework = Framework::F1;
  r.plan = InvestmentPlan::zero(topo);
  const int S = scen.num_days();
  const int Y = scen.num_years();
  const bool capped = econ.emissions_cap.has_value();

  Model master;
  const PlanBits bits = discretize_plan(master, topo);
  master.add_objective(bits.investment_cost(topo).terms);
  std::vector<std::vector<VarId>> theta(Y), allowance(Y);
  std::vector<std::vector<BendersSub>> subs(Y);
  for (int y = 0; y < Y; ++y) {
    std::vector<Term> cap_row;
    for (int s = 0; s < S; ++s) {
      const auto& day = scen.at(s, y);
      // Bounds on a day's cost and emissions from the largest possible grid.
      double revenue = 0.0, e_lo = 0.0, e_hi = 0.0;
      for (std::size_t m = 0; m < topo.energies.size(); ++m) {
        const double pmax = bits.grid(static_cast<int>(m)).max_value();
        for (int t = 0; t < scen.periods; ++t) {
          revenue += std::max(0.0, day.feedin[m][t]) * scen.dt * pmax;
          e_lo += std::min(0.0, day.emissions[m][t]) * scen.dt * pmax;
          e_hi += std::max(0.0, day.emissions[m][t]) * scen.dt * pmax;
        }
      }
      const std::string tag = "y" + std::to_string(y + 1) + "s" + std::to_string(s);
      theta[y].push_back(master.add_variable("theta_" + tag, -revenue, kInf));
      master.add_objective(theta[y].back(), discount_factor(scen.discount_rate, y) * weight(scen, s));
      std::optional<VarId> e;
      if (capped) {
        e = master.add_variable("allowance_" + tag, e_lo, e_hi);
        allowance[y].push_back(*e);
        cap_row.push_back({*e, weight(scen, s)});
      }
      subs[y].push_back(make_sub(topo, day, scen.dt, bits, e));
    }
    if (capped) master.add_constraint("cap_y" + std::to_string(y + 1), cap_row, Sense::LessEqual, *econ.emissions_cap, "cap");
  }

  double upper = kInf;
  std::optional<InvestmentPlan> best;
  double lower = -kInf;
  std::optional<std::vector<double>> warm;
  int it = 0;
  bool converged = false;
  for (; it < econ.benders_iterations; ++it) {
    auto opts = econ.milp;
    opts.heuristic_hook = nullptr;
    opts.warm_start = warm;
    const auto mres = opt::solve_milp(master, opts);
    if (mres.x.empty()) {
      r.status = status_of(mres.status);
      r.message = mres.status == opt::MilpStatus::Infeasible ? "no plan meets the emissions target"
                                                             : "master problem stopped without a plan";
      break;
    }
    lower = std::max(lower, mres.bound);
    const auto& xm = mres.x;
    double plan_value = bits.investment_cost(topo).value(xm);
    bool all_feasible = true;
    int cuts = 0;
    for (int y = 0; y < Y; ++y) {
      for (int s = 0; s < S; ++s) {
        auto& sub = subs[y][s];
        for (const auto& [c, mcol] : sub.links) {
          const double v = master.variable(mcol).kind == VarKind::Binary ? std::round(xm[mcol]) : xm[mcol];
          sub.model.set_bounds(c, v, v);
        }
        const auto sol = opt::solve_lp(sub.model);
        std::vector<Term> row;
        double rhs = 0.0;
        if (sol.status == opt::LpStatus::Infeasible) {
          // y^T b > max y^T A z over bounds; keep plans where that maximum reaches y^T b.
          all_feasible = false;
          const auto& cons = sub.model.constraints();
          std::vector<double> g(sub.model.num_variables(), 0.0);
          double yb = 0.0;
          for (std::size_t i = 0; i < cons.size(); ++i) {
            yb += sol.farkas[i] * cons[i].rhs;
            for (const auto& t : cons[i].terms) g[t.var] += sol.farkas[i] * t.coef;
          }
          std::vector<char> linked(sub.model.num_variables(), 0);
          for (const auto& [c, mcol] : sub.links) {
            linked[c] = 1;
            if (g[c] != 0.0) row.push_back({mcol, g[c]});
          }
          double rest = 0.0;
          for (int j = 0; j < sub.model.num_variables(); ++j) {
            if (linked[j] || std::abs(g[j]) < 1e-12) continue;
            const auto& v = sub.model.variable(j);
            rest += g[j] > 0.0 ? g[j] * v.upper : g[j] * v.lower;
          }
          if (!std::isfinite(rest)) throw std::runtime_error("feasibility certificate is not bounded");
          master.add_constraint("feas", row, Sense::GreaterEqual, yb - rest, "benders");
          ++cuts;
          continue;
        }
        if (sol.status != opt::LpStatus::Optimal) throw std::runtime_error("day subproblem is unbounded");
        plan_value += discount_factor(scen.discount_rate, y) * weight(scen, s) * sol.objective;
        if (xm[theta[y][s]] < sol.objective - 1e-9 * rel(sol.objective)) {
          row.push_back({theta[y][s], 1.0});
          rhs = sol.objective;
          for (const auto& [c, mcol] : sub.links) {
            const double d = sol.reduced_costs[c];
            if (d == 0.0) continue;
            row.push_back({mcol, -d});
            rhs -= d * sub.model.variable(c).lower;
          }
          master.add_constraint("opt", row, Sense::GreaterEqual, rhs, "benders");
          ++cuts;
        }
      }
    }
    if (all_feasible && plan_value < upper) {
      upper = plan_value;
      best = bits.decode(xm);
      warm = xm;
    }
    if (cuts == 0 || (best && upper - lower <= std::max(econ.milp.gap_tol, 1e-9) * rel(upper))) {
      converged = true;
      ++it;
      break;
    }
  }
  r.iterations = it;
  r.seconds = clock.seconds();
  if (!best) {
    r.feasible = false;
    if (r.status.empty()) r.status = "no-solution";
    if (r.message.empty()) r.message = "no feasible plan within " + std::to_string(it) + " iterations";
    return r;
  }
  r.plan = *best;
  r.objective = upper;
  r.bound = std::min(lower, upper);
  r.gap = opt::relative_gap(upper, r.bound);
  r.status = converged ? "optimal" : "feasible";
  if (!converged) r.warnings.push_back("iteration budget reached with gap " + fmt(r.gap));
  EvalOptions eo;
  eo.mode = DispatchMode::Cooperative;
  eo.emissions_cap = econ.emissions_cap;
  eo.threads = econ.threads;
  const auto ev = evaluate_plan(topo, scen, r.plan, eo);
  if (!ev.feasible) {
    r.feasible = false;
    r.status = "verification-failed";
    r.message = "Benders plan failed re-evaluation: " + ev.reason;
    return r;
  }
  r.feasible = true;
  r.breakdown = ev.breakdown;
  r.total = r.total_ex_tax = ev.breakdown.total;
  r.achieved_emissions = ev.breakdown.max_emissions();
  return r;
}

FrameworkResult solve_framework(Framework f, const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ) {
  switch (f) {
    case Framework::F1: return solve_f1(topo, scen, econ);
    case Framework::F2: return solve_f2(topo, scen, econ);
    case Framework::F3: return solve_f3(topo, scen, econ);
    case Framework::F4: return solve_f4(topo, scen, econ);
  }
  throw std::invalid_argument("unknown framework");
}

}  // namespace ehub
