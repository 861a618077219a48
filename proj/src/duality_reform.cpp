#include "ehub/duality_reform.hpp"

#include <cmath>
#include <sstream>

namespace ehub {

using opt::kInf;
using opt::Model;
using opt::Sense;
using opt::Term;
using opt::VarId;
using opt::VarKind;

LinExpr BitExpansion::expr() const {
  LinExpr e;
  for (int n = 0; n < bits; ++n) e.terms.push_back({x[n], std::ldexp(step, n)});
  return e;
}

long BitExpansion::decode(const std::vector<double>& sol) const {
  long v = 0;
  for (int n = 0; n < bits; ++n) {
    if (sol[x[n]] > 0.5) v += 1L << n;
  }
  return v;
}

std::vector<int> to_bits(long value, int bits) {
  if (value < 0 || value > max_count(bits)) {
    throw std::invalid_argument(std::to_string(value) + " does not fit in " + std::to_string(bits) + " bits");
  }
  std::vector<int> b(bits);
  for (int n = 0; n < bits; ++n) b[n] = static_cast<int>((value >> n) & 1L);
  return b;
}

std::string bit_string(long value, int bits) {
  const auto b = to_bits(value, bits);
  std::string s;
  for (int n = bits - 1; n >= 0; --n) s += b[n] ? '1' : '0';
  return s;
}

SnapResult snap_to_grid(double value, double step, int bits, const std::string& what) {
  SnapResult r;
  const double raw = value / step;
  long c = static_cast<long>(std::floor(raw + 1e-9));
  c = std::max(0L, std::min(c, max_count(bits)));
  r.count = c;
  const double realized = static_cast<double>(c) * step;
  if (std::abs(realized - value) > 1e-9 * std::max(1.0, std::abs(value))) {
    r.snapped = true;
    std::ostringstream w;
    w << what << ": " << value << " is not on the grid of " << step << " x 0.." << max_count(bits) << "; using "
      << realized;
    r.warning = w.str();
  }
  return r;
}

PlanExprs PlanBits::exprs() const {
  PlanExprs e;
  for (int m = 0; m < energies; ++m) e.pmax.push_back(grid(m).expr());
  for (int g = 0; g < converters; ++g) e.conv_cap.push_back(units(g).expr());
  for (int s = 0; s < storages; ++s) {
    e.stor_power.push_back(power(s).expr());
    e.stor_energy.push_back(energy(s).expr());
  }
  return e;
}

InvestmentPlan PlanBits::decode(const std::vector<double>& sol) const {
  InvestmentPlan p;
  for (int m = 0; m < energies; ++m) p.grid.push_back(grid(m).decode(sol));
  for (int g = 0; g < converters; ++g) p.units.push_back(units(g).decode(sol));
  for (int s = 0; s < storages; ++s) {
    p.storage_power.push_back(power(s).decode(sol));
    p.storage_energy.push_back(energy(s).decode(sol));
  }
  return p;
}

namespace {

std::vector<long> flatten(const InvestmentPlan& p) {
  std::vector<long> v = p.grid;
  v.insert(v.end(), p.units.begin(), p.units.end());
  v.insert(v.end(), p.storage_power.begin(), p.storage_power.end());
  v.insert(v.end(), p.storage_energy.begin(), p.storage_energy.end());
  return v;
}

}  // namespace

std::vector<std::pair<VarId, double>> PlanBits::encode(const InvestmentPlan& plan) const {
  const auto counts = flatten(plan);
  if (counts.size() != all.size()) throw DataError("plan does not match the discretized quantities");
  std::vector<std::pair<VarId, double>> out;
  for (std::size_t q = 0; q < all.size(); ++q) {
    const auto b = to_bits(counts[q], all[q].bits);
    out.emplace_back(all[q].count, static_cast<double>(counts[q]));
    for (int n = 0; n < all[q].bits; ++n) out.emplace_back(all[q].x[n], b[n]);
  }
  return out;
}

void PlanBits::fix(Model& model, const InvestmentPlan& plan) const {
  for (const auto& [var, value] : encode(plan)) model.set_bounds(var, value, value);
}

LinExpr PlanBits::investment_cost(const HubTopology& topo) const {
  LinExpr e;
  for (int m = 0; m < energies; ++m) e.terms.push_back({grid(m).count, topo.grid[m].capacity_cost * grid(m).step});
  for (int g = 0; g < converters; ++g) e.terms.push_back({units(g).count, topo.spec.converters[g].unit_cost});
  for (int s = 0; s < storages; ++s) {
    e.terms.push_back({power(s).count, topo.spec.storages[s].power_cost * power(s).step});
    e.terms.push_back({energy(s).count, topo.spec.storages[s].energy_cost * energy(s).step});
  }
  return e;
}

PlanBits discretize_plan(Model& model, const HubTopology& topo) {
  PlanBits pb;
  pb.energies = static_cast<int>(topo.energies.size());
  pb.converters = topo.num_converters();
  pb.storages = topo.num_storages();
  auto add = [&](const std::string& target, double step, int bits) {
    BitExpansion b;
    b.target = target;
    b.step = step;
    b.bits = bits;
    b.count = model.add_variable("n_" + target, 0.0, static_cast<double>(max_count(bits)), VarKind::Integer,
                                 "plan.count");
    std::vector<Term> row = {{b.count, 1.0}};
    for (int n = 0; n < bits; ++n) {
      b.x.push_back(model.add_variable("x_" + target + "_" + std::to_string(n), 0.0, 1.0, VarKind::Binary, "plan.bit"));
      row.push_back({b.x.back(), -std::ldexp(1.0, n)});
    }
    model.add_constraint("bits_" + target, row, Sense::Equal, 0.0, "bitdef");
    pb.all.push_back(std::move(b));
  };
  for (int m = 0; m < pb.energies; ++m) add("grid:" + topo.energies[m], topo.grid[m].capacity_step, topo.grid[m].bits);
  for (const auto& c : topo.spec.converters) add("units:" + c.id, c.unit_rating, c.bits);
  for (const auto& s : topo.spec.storages) add("power:" + s.id, s.power_step, s.power_bits);
  for (const auto& s : topo.spec.storages) add("energy:" + s.id, s.energy_step, s.energy_bits);
  return pb;
}

std::vector<std::string> describe_bounds(const HubTopology& topo) {
  std::vector<std::string> out;
  auto line = [&](const std::string& what, double step, int bits, const char* unit) {
    std::ostringstream s;
    s << what << ": 0 to " << static_cast<double>(max_count(bits)) * step << ' ' << unit << " in steps of " << step
      << ' ' << unit << " (" << bits << " bits)";
    out.push_back(s.str());
  };
  for (std::size_t m = 0; m < topo.energies.size(); ++m) {
    line("grid " + topo.energies[m], topo.grid[m].capacity_step, topo.grid[m].bits, "MW");
  }
  for (const auto& c : topo.spec.converters) line(c.id + " capacity", c.unit_rating, c.bits, "MW");
  for (const auto& s : topo.spec.storages) {
    line(s.id + " power", s.power_step, s.power_bits, "MW");
    line(s.id + " energy", s.energy_step, s.energy_bits, "MWh");
  }
  return out;
}

DualBlock build_dual(Model& model, const HubTopology& topo, const DayValues& day, double dt, const std::string& prefix) {
  const int T = static_cast<int>(day.price.at(0).size());
  const int L = static_cast<int>(topo.branches.size());
  const int M = static_cast<int>(topo.energies.size());
  const int GC = topo.num_converters();
  const int GS = topo.num_storages();
  const int P = static_cast<int>(topo.out_ports.size());
  const int NC = topo.num_converters();
  const Matrix JA = topo.J * topo.A;

  DualBlock d;
  auto make = [&](std::vector<std::vector<VarId>>& vars, const char* name, int n, bool nonneg) {
    vars.assign(T, {});
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < n; ++k) {
        vars[t].push_back(model.add_variable(prefix + name + "_" + std::to_string(t) + "_" + std::to_string(k),
                                             nonneg ? 0.0 : -kInf, kInf, VarKind::Continuous,
                                             std::string("dual.") + name));
      }
    }
  };
  make(d.alpha, "alpha", P, false);
  make(d.beta, "beta", GS, false);
  make(d.gamma_lo, "gamma_lo", GS, true);
  make(d.gamma_hi, "gamma_hi", GS, true);
  make(d.zeta, "zeta", GC, true);
  make(d.kappa_lo, "kappa_lo", GS, true);
  make(d.kappa_hi, "kappa_hi", GS, true);
  make(d.rho, "rho", M, true);
  make(d.mu, "mu", M, false);
  make(d.phi_lo, "phi_lo", M, true);
  make(d.phi_hi, "phi_hi", M, true);
  make(d.sigma, "sigma", L, true);
  for (int t = 0; t < T; ++t) {
    for (int l = 0; l < L; ++l) {
      if (!topo.K[l]) model.set_bounds(d.sigma[t][l], 0.0, 0.0);
    }
  }

  d.q_rows.assign(T, {});
  d.r_rows.assign(T, {});
  d.v_rows.assign(T, {});
  const std::string tag = prefix.empty() ? "" : prefix;
  for (int t = 0; t < T; ++t) {
    const int next = (t + 1) % T;
    for (int g = 0; g < GS; ++g) {
      d.q_rows[t].push_back(model.add_constraint(
          tag + "dq_" + std::to_string(t) + "_" + std::to_string(g),
          {{d.beta[t][g], 1.0}, {d.beta[next][g], -1.0}, {d.gamma_hi[t][g], 1.0}, {d.gamma_lo[t][g], -1.0}},
          Sense::Equal, 0.0, "dual.q"));
    }
    for (int m = 0; m < M; ++m) {
      d.r_rows[t].push_back(model.add_constraint(tag + "dr_" + std::to_string(t) + "_" + std::to_string(m),
                                                 {{d.phi_hi[t][m], 1.0}, {d.phi_lo[t][m], -1.0}, {d.mu[t][m], -1.0}},
                                                 Sense::Equal, day.feedin[m][t] * dt, "dual.r"));
    }
    for (int l = 0; l < L; ++l) {
      std::vector<Term> row;
      double rhs = 0.0;
      for (int m = 0; m < M; ++m) {
        if (topo.U(m, l) != 0.0) {
          rhs -= topo.U(m, l) * day.price[m][t] * dt;
          row.push_back({d.rho[t][m], topo.U(m, l)});
        }
        if (topo.W(m, l) != 0.0) row.push_back({d.mu[t][m], topo.W(m, l)});
      }
      for (int g = 0; g < GS; ++g) {
        const double a = JA(topo.storage_device(g), l);
        if (a == 0.0) continue;
        row.push_back({d.beta[t][g], dt * a});
        row.push_back({d.kappa_hi[t][g], a});
        row.push_back({d.kappa_lo[t][g], -a});
      }
      for (int g = 0; g < NC; ++g) {
        if (JA(g, l) != 0.0) row.push_back({d.zeta[t][g], JA(g, l)});
      }
      for (int i = 0; i < P; ++i) {
        if (topo.Z(i, l) != 0.0) row.push_back({d.alpha[t][i], topo.Z(i, l)});
      }
      if (topo.K[l]) row.push_back({d.sigma[t][l], -1.0});
      d.v_rows[t].push_back(model.add_constraint(tag + "dv_" + std::to_string(t) + "_" + std::to_string(l), row,
                                                 Sense::Equal, rhs, "dual.v"));
    }

    for (int m = 0; m < M; ++m) {
      if (day.demand[m][t] != 0.0) d.fixed_terms.push_back({d.mu[t][m], -day.demand[m][t]});
    }
    for (int g = 0; g < GC; ++g) d.plan_terms.push_back({M + g, -1.0, d.zeta[t][g]});
    for (int g = 0; g < GS; ++g) {
      d.plan_terms.push_back({M + GC + GS + g, -1.0, d.gamma_hi[t][g]});
      d.plan_terms.push_back({M + GC + g, -1.0, d.kappa_lo[t][g]});
      d.plan_terms.push_back({M + GC + g, -1.0, d.kappa_hi[t][g]});
    }
    for (int m = 0; m < M; ++m) {
      d.plan_terms.push_back({m, -day.availability[m][t], d.rho[t][m]});
      d.plan_terms.push_back({m, -1.0, d.phi_hi[t][m]});
    }
  }
  return d;
}

LinExpr dual_objective_fixed(const DualBlock& dual, const HubTopology& topo, const InvestmentPlan& plan) {
  const auto exprs = fixed_plan_exprs(topo, plan);
  std::vector<double> quantity;
  for (const auto& e : exprs.pmax) quantity.push_back(e.constant);
  for (const auto& e : exprs.conv_cap) quantity.push_back(e.constant);
  for (const auto& e : exprs.stor_power) quantity.push_back(e.constant);
  for (const auto& e : exprs.stor_energy) quantity.push_back(e.constant);
  LinExpr out;
  out.terms = dual.fixed_terms;
  for (const auto& p : dual.plan_terms) {
    const double c = p.coef * quantity.at(p.quantity);
    if (c != 0.0) out.terms.push_back({p.dual, c});
  }
  return out;
}

LinearizedProduct linearize_product(Model& model, VarId x, VarId d, double M, bool d_nonnegative,
                                    const std::string& name) {
  LinearizedProduct p{x, d, -1, M, !d_nonnegative};
  p.w = model.add_variable(name, d_nonnegative ? 0.0 : -kInf, kInf, VarKind::Continuous, "aux.w");
  model.add_constraint(name + "_on", {{p.w, 1.0}, {x, -M}}, Sense::LessEqual, 0.0, "aux.env");
  if (d_nonnegative) {
    model.add_constraint(name + "_le", {{p.w, 1.0}, {d, -1.0}}, Sense::LessEqual, 0.0, "aux.env");
  } else {
    model.add_constraint(name + "_off", {{p.w, 1.0}, {x, M}}, Sense::GreaterEqual, 0.0, "aux.env");
    model.add_constraint(name + "_le", {{p.w, 1.0}, {d, -1.0}, {x, M}}, Sense::LessEqual, M, "aux.env");
  }
  model.add_constraint(name + "_ge", {{p.w, 1.0}, {d, -1.0}, {x, -M}}, Sense::GreaterEqual, -M, "aux.env");
  return p;
}

LinearizedObjective linearize_products(Model& model, const DualBlock& dual, const PlanBits& bits, double M,
                                       const std::string& prefix) {
  if (bits.all.empty()) throw std::invalid_argument("no bit expansions for the plan quantities");
  LinearizedObjective out;
  out.expr.terms = dual.fixed_terms;
  int k = 0;
  for (const auto& p : dual.plan_terms) {
    if (p.quantity < 0 || p.quantity >= static_cast<int>(bits.all.size())) {
      throw std::invalid_argument("missing bit expansion for plan quantity " + std::to_string(p.quantity));
    }
    const auto& b = bits.all[p.quantity];
    for (int n = 0; n < b.bits; ++n) {
      const auto prod = linearize_product(model, b.x[n], p.dual, M, true, prefix + "w" + std::to_string(k++));
      const double c = p.coef * std::ldexp(b.step, n);
      if (c != 0.0) out.expr.terms.push_back({prod.w, c});
      // Products whose coefficient is zero leave their dual unpriced, so
      // the validator ignores them.
      if (c != 0.0) out.products.push_back(prod);
    }
  }
  return out;
}

double default_big_m(const ScenarioSet& scen, double carbon_price) {
  double worst = 0.0;
  for (const auto& day : scen.days) {
    for (const auto& v : day.years) {
      for (std::size_t m = 0; m < v.price.size(); ++m) {
        for (std::size_t t = 0; t < v.price[m].size(); ++t) {
          worst = std::max(worst, std::abs(v.price[m][t]) + std::abs(v.feedin[m][t]) +
                                      std::abs(carbon_price * v.emissions[m][t]));
        }
      }
    }
  }
  return 10.0 * std::max(worst, 1.0) * scen.dt;
}

BigMReport validate_products(const std::vector<LinearizedProduct>& products, const std::vector<double>& sol,
                             double feastol) {
  BigMReport r;
  for (const auto& p : products) {
    const double d = sol[p.d];
    const double x = sol[p.x] > 0.5 ? 1.0 : 0.0;
    r.worst_mismatch = std::max(r.worst_mismatch, std::abs(sol[p.w] - x * d));
    if (std::abs(d) >= p.M * (1.0 - 1e-4)) ++r.near_bound;
  }
  double limit = 0.0;
  for (const auto& p : products) limit = std::max(limit, 4.0 * feastol * p.M);
  r.tripped = r.near_bound > 0 || r.worst_mismatch > limit;
  if (r.tripped) {
    std::ostringstream s;
    s << "big-M binding: " << r.near_bound << " of " << products.size()
      << " products have a dual within 1e-4*M of M";
    if (!products.empty()) s << " (M=" << products.front().M << ")";
    s << ", worst |w - x*d| = " << r.worst_mismatch << "; raise M tenfold and re-solve";
    r.message = s.str();
  }
  return r;
}

OperatorBlock build_strong_duality(Model& model, const HubTopology& topo, const DayValues& day, double dt,
                                   const PlanBits& bits, double M, const std::string& prefix) {
  const std::size_t expected = topo.energies.size() + topo.num_converters() + 2 * topo.num_storages();
  if (bits.all.size() != expected) throw std::invalid_argument("missing bit expansion for some plan quantity");
  OperatorBlock ob;
  ob.primal = add_day_block(model, topo, day, dt, bits.exprs(), prefix + "p_");
  ob.dual = build_dual(model, topo, day, dt, prefix + "d_");
  ob.objective = linearize_products(model, ob.dual, bits, M, prefix);
  std::vector<Term> row = ob.primal.cost;
  for (const auto& t : ob.objective.expr.terms) row.push_back({t.var, -t.coef});
  ob.strong_duality = model.add_constraint(prefix + "sd", row, Sense::Equal, ob.objective.expr.constant, "sd");
  return ob;
}

}  // namespace ehub
