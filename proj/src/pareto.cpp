#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ehub/frameworks.hpp"

namespace ehub {

namespace {

ParetoPoint to_point(double target, const FrameworkResult& r) {
  ParetoPoint p;
  p.target = target;
  p.feasible = r.feasible;
  p.message = r.feasible ? std::string() : (r.message.empty() ? r.status : r.message);
  if (!r.feasible) return p;
  p.plan = r.plan;
  p.upper = r.total_ex_tax;
  p.invest = r.breakdown.investment;
  p.net_operate = r.total_ex_tax - p.invest;
  p.achieved = r.achieved_emissions;
  p.price = r.price;
  const bool capped = r.framework == Framework::F1 || r.framework == Framework::F3;
  // The solver bound covers the cap frameworks only; a price response is
  // exact at its own price.
  p.lower = capped && r.status == "optimal" ? std::min(r.bound, p.upper) : (capped ? r.bound : p.upper);
  p.gap = std::max(0.0, (p.upper - p.lower) / std::max(1.0, std::abs(p.upper)));
  return p;
}

}  // namespace

std::vector<ParetoPoint> pareto_sweep(Framework f, const HubTopology& topo, const ScenarioSet& scen, int resolution,
                                      const EconConfig& econ, int parallelism) {
  if (resolution < 1) throw std::invalid_argument("resolution must be at least 1");
  EconConfig base = econ;
  base.emissions_cap.reset();
  const FrameworkResult baseline = solve_framework(f, topo, scen, base);
  if (!baseline.feasible) {
    ParetoPoint p;
    p.message = "baseline: " + (baseline.message.empty() ? baseline.status : baseline.message);
    return {p};
  }
  const double b = baseline.achieved_emissions;
  std::vector<ParetoPoint> points(resolution);
  points[0] = to_point(b, baseline);
  parallel_for(resolution - 1, parallelism, [&](int i) {
    const int k = resolution - 1 - i;
    const double target = b * k / resolution;
    EconConfig e = econ;
    e.emissions_cap = target;
    e.threads = 1;
    try {
      points[i + 1] = to_point(target, solve_framework(f, topo, scen, e));
    } catch (const std::exception& ex) {
      points[i + 1] = ParetoPoint{};
      points[i + 1].target = target;
      points[i + 1].message = ex.what();
    }
  });
  if (f == Framework::F1 || f == Framework::F3) share_bounds(points);
  return points;
}

}  // namespace ehub
