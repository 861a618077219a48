#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ehub/operation_model.hpp"

namespace ehub {

struct PlanScore {
  bool feasible = false;
  double cost = 0.0;       // investment + NPV operation
  double emissions = 0.0;  // worst year, t
};

/// Prices a plan with the independent operator (optimistic ties).
PlanScore score_plan(const HubTopology& topo, const ScenarioSet& scen, const InvestmentPlan& plan, int threads = 1);

struct SearchResult {
  InvestmentPlan plan;
  PlanScore score;
  int evaluations = 0;
  std::vector<std::pair<InvestmentPlan, PlanScore>> trace;  // every accepted move, start first
  bool improved() const { return trace.size() > 1; }
};

/// Greedy one-step moves on the count grid. Order 1 changes one quantity by
/// one step, order 2 also changes any two at once. Each round moves to the
/// cheaper feasible neighbor with the best cost reduction per tonne of
/// added emissions; it stops when no neighbor is cheaper.
SearchResult neighbor_search(const HubTopology& topo, const ScenarioSet& scen, const InvestmentPlan& incumbent,
                             double emissions_cap, int order, int threads = 1);

enum class PointSource { Solved, InheritedFromTighter, BoundFromLooser };
const char* to_string(PointSource s);

struct ParetoPoint {
  double target = 0.0;  // t/yr
  bool feasible = false;
  InvestmentPlan plan;
  double upper = 0.0;  // incumbent total
  double lower = 0.0;
  double invest = 0.0;
  double net_operate = 0.0;
  double achieved = 0.0;
  std::optional<double> price;
  double gap = 0.0;
  PointSource source = PointSource::Solved;
  std::string message;
};

/// A solution for a tighter target is also valid for a looser one, and a
/// lower bound for a looser target also bounds a tighter one.
void share_bounds(std::vector<ParetoPoint>& points);

/// argmin over `pool` of investment + NPV operation + price * total emissions.
InvestmentPlan pick_warm_start(const HubTopology& topo, const ScenarioSet& scen, const std::vector<InvestmentPlan>& pool,
                               double price);

}  // namespace ehub
