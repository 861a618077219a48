#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ehub/hub_model.hpp"
#include "ehub/opt/lp.hpp"
#include "ehub/opt/model.hpp"
#include "ehub/scenarios.hpp"

namespace ehub {

/// Investment decisions as integer counts on each quantity's step grid.
struct InvestmentPlan {
  std::vector<long> grid;            // per energy, in capacity steps
  std::vector<long> units;           // per converter
  std::vector<long> storage_power;   // per storage, in power steps
  std::vector<long> storage_energy;  // per storage, in energy steps

  static InvestmentPlan zero(const HubTopology& topo);
  bool operator==(const InvestmentPlan&) const = default;
};

long max_count(int bits);
double grid_capacity(const HubTopology& topo, const InvestmentPlan& plan, int m);
double converter_capacity(const HubTopology& topo, const InvestmentPlan& plan, int g);
double storage_power_capacity(const HubTopology& topo, const InvestmentPlan& plan, int s);
double storage_energy_capacity(const HubTopology& topo, const InvestmentPlan& plan, int s);
double investment_cost(const HubTopology& topo, const InvestmentPlan& plan);
/// Throws DataError if any count is negative or exceeds its bit range.
void check_plan(const HubTopology& topo, const InvestmentPlan& plan);
std::string describe_plan(const HubTopology& topo, const InvestmentPlan& plan);

/// constant + sum(coef * var)
struct LinExpr {
  double constant = 0.0;
  std::vector<opt::Term> terms;

  static LinExpr of(double c) { return LinExpr{c, {}}; }
  LinExpr scaled(double k) const;
  double value(const std::vector<double>& x) const;
};

/// Plan quantities as expressions: constants for a fixed plan, or linear in
/// the plan variables of a planning model.
struct PlanExprs {
  std::vector<LinExpr> pmax;       // MW per energy
  std::vector<LinExpr> conv_cap;   // MW of input per converter, D_g * I_g
  std::vector<LinExpr> stor_power; // MW per storage
  std::vector<LinExpr> stor_energy;// MWh per storage
};

PlanExprs fixed_plan_exprs(const HubTopology& topo, const InvestmentPlan& plan);

/// Variables and rows of one representative day's operation, indexed [t][...].
struct DayBlock {
  int periods = 0;
  double dt = 1.0;
  std::vector<std::vector<opt::VarId>> V;  // [t][branch]
  std::vector<std::vector<opt::VarId>> Q;  // [t][storage]
  std::vector<std::vector<opt::VarId>> r;  // [t][energy]
  std::vector<std::vector<opt::RowId>> z, soc, qcap, ccap, slo, shi, inp, out, rcap;
  std::vector<opt::Term> cost;       // day import cost minus export revenue
  std::vector<opt::Term> purchase;   // day import cost
  std::vector<opt::Term> revenue;    // day export revenue
  std::vector<opt::Term> emissions;  // day emissions, t
};

/// Adds the network constraints of one day to `model`. Plan quantities enter
/// through `plan`; moving their variable terms to the left keeps each row in
/// the sense used for dual extraction.
DayBlock add_day_block(opt::Model& model, const HubTopology& topo, const DayValues& day, double dt,
                       const PlanExprs& plan, const std::string& prefix);

struct OperationLp {
  opt::Model model;
  DayBlock block;
};

/// Day dispatch LP for scenario day s, year y under a fixed plan. The
/// objective is the day's import cost minus export revenue.
OperationLp build_operation_lp(const HubTopology& topo, const ScenarioSet& scen, int s, int y,
                               const InvestmentPlan& plan);

struct DualSolution {
  std::vector<std::vector<double>> alpha;  // [t][out port row]
  std::vector<std::vector<double>> beta, gamma_lo, gamma_hi;  // [t][storage]
  std::vector<std::vector<double>> zeta;                      // [t][converter]
  std::vector<std::vector<double>> kappa_lo, kappa_hi;        // [t][storage]
  std::vector<std::vector<double>> rho, mu, phi_lo, phi_hi;   // [t][energy]
  std::vector<std::vector<double>> sigma;                     // [t][branch]
};

/// Maps row duals and reduced costs of a solved operation LP to named
/// multipliers. Sign-restricted multipliers come out non-negative.
DualSolution extract_duals(const opt::LpSolution& sol, const DayBlock& block, const HubTopology& topo);

struct DayOutcome {
  double cost = 0.0;       // purchase - revenue, raw day
  double purchase = 0.0;
  double revenue = 0.0;
  double emissions = 0.0;  // t per day
  std::vector<std::vector<double>> flows;    // [t][branch]
  std::vector<std::vector<double>> soc;      // [t][storage]
  std::vector<std::vector<double>> exports;  // [t][energy]
};

struct CostBreakdown {
  double investment = 0.0;
  std::vector<double> operate;    // per year, annualized
  std::vector<double> revenue;
  std::vector<double> emissions;  // t per year
  std::vector<double> tax;
  double npv_operate = 0.0;  // sum over years of (operate - revenue + tax) / (1+i)^y
  double total = 0.0;        // investment + npv_operate
  double max_emissions() const;
};

enum class DispatchMode {
  Operator,     // each day minimizes its own cost; ties go to lower emissions
  Cooperative,  // days of a year are dispatched jointly under an optional cap or tax
};

struct EvalOptions {
  DispatchMode mode = DispatchMode::Operator;
  std::optional<double> emissions_cap;  // t per year, cooperative mode
  double tax = 0.0;                     // per t, cooperative mode, floored at zero per year
  double tie_tolerance = 1e-9;          // relative slack on cost in the tie-break
  bool keep_dispatch = false;
  int threads = 0;  // 0 = hardware concurrency
};

struct Evaluation {
  bool feasible = false;
  std::string reason;
  int bad_day = -1;
  int bad_year = -1;
  CostBreakdown breakdown;
  std::vector<std::vector<DayOutcome>> days;  // [y][s]
};

double discount_factor(double rate, int year_index);

Evaluation evaluate_plan(const HubTopology& topo, const ScenarioSet& scen, const InvestmentPlan& plan,
                         const EvalOptions& options = {});

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace ehub
