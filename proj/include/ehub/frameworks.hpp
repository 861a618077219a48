#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ehub/duality_reform.hpp"
#include "ehub/opt/complexity.hpp"
#include "ehub/opt/milp.hpp"
#include "ehub/search.hpp"

namespace ehub {

/// 1: builder-operator with a cap. 2: builder-operator under the smallest
/// sufficient carbon tax. 3: builder with a cap, independent operator.
/// 4: builder under the smallest sufficient social cost of carbon,
/// independent operator.
enum class Framework { F1 = 1, F2 = 2, F3 = 3, F4 = 4 };

/// Accepts "1".."4", "f1".."f4" or "F1".."F4"; throws std::invalid_argument.
Framework parse_framework(const std::string& s);

struct EconConfig {
  std::optional<double> emissions_cap;  // t/yr
  double price_tolerance = 0.5;         // per t, bisection width at exit
  double price_limit = 1048576.0;       // 2^20 per t
  opt::MilpOptions milp;
  double big_m = 0.0;  // 0 = derived from prices
  int max_escalations = 3;
  bool use_heuristic = true;
  int neighbor_order = 2;
  std::optional<InvestmentPlan> warm_start;
  int benders_iterations = 50;
  int threads = 1;

  EconConfig() { milp.gap_tol = 1e-9; }
};

struct PriceProbe {
  double price = 0.0;
  bool feasible = false;
  double emissions = 0.0;  // worst year of the response
  double total = 0.0;
  InvestmentPlan plan;
};

struct FrameworkResult {
  Framework framework = Framework::F1;
  bool feasible = false;
  std::string status;  // optimal, feasible, infeasible, tax-infeasible, no-solution
  std::string message;
  InvestmentPlan plan;
  CostBreakdown breakdown;      // re-priced by evaluate_plan in the framework's dispatch mode
  double total = 0.0;           // investment + NPV of operation (+ discounted tax for F2)
  double total_ex_tax = 0.0;    // investment + NPV of operation
  double achieved_emissions = 0.0;  // worst year
  std::optional<double> price;      // tax (F2) or social cost of carbon (F4)
  double objective = 0.0;           // solver objective
  double bound = 0.0;
  double gap = 0.0;
  long nodes = 0;
  int iterations = 0;  // Benders rounds or bisection probes
  bool warm_start_used = false;
  std::string warm_start_reason;
  double big_m = 0.0;
  double seconds = 0.0;
  std::vector<PriceProbe> probes;  // in probing order
  std::vector<std::string> warnings;
  opt::ComplexityCounts complexity;
  std::optional<InvestmentPlan> certificate;  // least-emitting plan when a target is infeasible
  double certificate_emissions = 0.0;
  std::vector<opt::TrajectoryPoint> trajectory;
};

/// Planning model shared by all frameworks: plan bits plus one day block per
/// (s, y), either free dispatch or operator-optimal dispatch.
struct PlanningModel {
  opt::Model model;
  PlanBits bits;
  std::vector<std::vector<DayBlock>> days;             // [y][s]
  std::vector<std::vector<OperatorBlock>> operators;   // [y][s], operator lower level only
  std::vector<std::vector<opt::Term>> year_cost;       // annualized cost - revenue per year
  std::vector<std::vector<opt::Term>> year_emissions;  // annualized t per year
  double big_m = 0.0;
};

PlanningModel build_planning_model(const HubTopology& topo, const ScenarioSet& scen, bool independent_operator,
                                   double big_m);

/// Dimensions of `topo` and `scen` in the terms of the complexity formulas.
/// Bit counts must be uniform per quantity class.
opt::ComplexityDims dims_of(const HubTopology& topo, const ScenarioSet& scen);

FrameworkResult solve_f1(const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ);
FrameworkResult solve_f2(const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ);
FrameworkResult solve_f3(const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ);
FrameworkResult solve_f4(const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ);
FrameworkResult solve_f1_benders(const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ);
FrameworkResult solve_framework(Framework f, const HubTopology& topo, const ScenarioSet& scen, const EconConfig& econ);

/// Builder-operator response to a fixed tax: minimizes investment plus
/// discounted operation plus discounted max(tax * E_y, 0).
FrameworkResult respond_to_tax(const HubTopology& topo, const ScenarioSet& scen, double tax, const EconConfig& econ);

/// Builder response to a fixed social cost of carbon with an independent
/// operator; the carbon term is undiscounted and is not part of `total`.
FrameworkResult respond_to_scoc(const HubTopology& topo, const ScenarioSet& scen, double scoc, const EconConfig& econ);

/// Solves the unconstrained baseline, then targets baseline * k / resolution
/// for k = resolution-1 .. 1 concurrently. Cap frameworks (1, 3) share bounds
/// across targets; price frameworks (2, 4) report each response as its own
/// bound. Failed targets stay in the list with feasible = false.
std::vector<ParetoPoint> pareto_sweep(Framework f, const HubTopology& topo, const ScenarioSet& scen, int resolution,
                                      const EconConfig& econ, int parallelism = 1);

}  // namespace ehub
