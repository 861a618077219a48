#pragma once

#include <string>
#include <vector>

#include "ehub/operation_model.hpp"

namespace ehub {

/// One investment quantity written as sum_n 2^n * step * x_n, with an
/// integer count variable tied to the bits.
struct BitExpansion {
  std::string target;  // "grid:elec", "units:EB", "power:TES", "energy:TES"
  double step = 1.0;   // MW or MWh per count
  int bits = 1;
  opt::VarId count = -1;
  std::vector<opt::VarId> x;  // least significant first

  double max_value() const { return static_cast<double>(max_count(bits)) * step; }
  LinExpr expr() const;
  long decode(const std::vector<double>& sol) const;
};

/// Bits of `value`, least significant first.
std::vector<int> to_bits(long value, int bits);
/// Most significant first, e.g. "1010101001" for 681 on 10 bits.
std::string bit_string(long value, int bits);

struct SnapResult {
  long count = 0;
  bool snapped = false;
  std::string warning;
};

/// Largest grid count whose value does not exceed `value`, clamped to the bit range.
SnapResult snap_to_grid(double value, double step, int bits, const std::string& what);

/// Bit expansions of every plan quantity: grid per energy, then converter
/// units, storage power and storage energy.
struct PlanBits {
  std::vector<BitExpansion> all;
  int energies = 0;
  int converters = 0;
  int storages = 0;

  const BitExpansion& grid(int m) const { return all[m]; }
  const BitExpansion& units(int g) const { return all[energies + g]; }
  const BitExpansion& power(int s) const { return all[energies + converters + s]; }
  const BitExpansion& energy(int s) const { return all[energies + converters + storages + s]; }

  PlanExprs exprs() const;
  InvestmentPlan decode(const std::vector<double>& sol) const;
  /// Variable values (counts and bits) that realize `plan`.
  std::vector<std::pair<opt::VarId, double>> encode(const InvestmentPlan& plan) const;
  /// Pins every count and bit to `plan` through variable bounds.
  void fix(opt::Model& model, const InvestmentPlan& plan) const;
  LinExpr investment_cost(const HubTopology& topo) const;
};

/// Adds count and bit variables for every plan quantity to `model`.
PlanBits discretize_plan(opt::Model& model, const HubTopology& topo);

/// One line per quantity with its implicit range and step.
std::vector<std::string> describe_bounds(const HubTopology& topo);

/// Dual variables of one day, indexed [t][...] like DualSolution.
struct DualBlock {
  std::vector<std::vector<opt::VarId>> alpha, beta, gamma_lo, gamma_hi, zeta, kappa_lo, kappa_hi, rho, mu, phi_lo,
      phi_hi, sigma;
  std::vector<std::vector<opt::RowId>> q_rows, r_rows, v_rows;

  /// Objective part that does not involve the plan.
  std::vector<opt::Term> fixed_terms;
  /// Objective part coef * quantity * dual, quantity indexing PlanBits::all.
  struct PlanTerm {
    int quantity = 0;
    double coef = 0.0;
    opt::VarId dual = -1;
  };
  std::vector<PlanTerm> plan_terms;
};

/// Adds the dual variables, their domains and one feasibility row per
/// primal variable (storage level, export, branch flow) for one day.
DualBlock build_dual(opt::Model& model, const HubTopology& topo, const DayValues& day, double dt,
                     const std::string& prefix);

/// Dual objective with the plan held fixed: linear in the duals.
LinExpr dual_objective_fixed(const DualBlock& dual, const HubTopology& topo, const InvestmentPlan& plan);

/// w = x * d for binary x and bounded d, via big-M envelope rows. A sign
/// restricted d (d >= 0) needs three rows and w >= 0; a free d needs four.
struct LinearizedProduct {
  opt::VarId x = -1;
  opt::VarId d = -1;
  opt::VarId w = -1;
  double M = 0.0;
  bool signed_d = false;
};

LinearizedProduct linearize_product(opt::Model& model, opt::VarId x, opt::VarId d, double M, bool d_nonnegative,
                                    const std::string& name);

struct LinearizedObjective {
  LinExpr expr;
  std::vector<LinearizedProduct> products;
};

/// Dual objective with every plan-times-dual product replaced by per-bit
/// auxiliaries.
LinearizedObjective linearize_products(opt::Model& model, const DualBlock& dual, const PlanBits& bits, double M,
                                       const std::string& prefix);

/// 10 * max(|f| + |h| + carbon_price * |e|) * dt over all days, years and periods.
double default_big_m(const ScenarioSet& scen, double carbon_price = 0.0);

struct BigMReport {
  bool tripped = false;       // some dual within 1e-4 * M of M
  int near_bound = 0;
  double worst_mismatch = 0;  // max |w - x d|
  std::string message;
};

BigMReport validate_products(const std::vector<LinearizedProduct>& products, const std::vector<double>& sol,
                             double feastol = 1e-7);

/// Primal rows, dual rows and the equality "day cost = dual objective" for
/// one day. Any feasible point's (V, Q, r) is an optimal operator response to
/// the plan encoded in `bits`.
struct OperatorBlock {
  DayBlock primal;
  DualBlock dual;
  LinearizedObjective objective;
  opt::RowId strong_duality = -1;
};

OperatorBlock build_strong_duality(opt::Model& model, const HubTopology& topo, const DayValues& day, double dt,
                                   const PlanBits& bits, double M, const std::string& prefix);

}  // namespace ehub
