#include "ehub/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ehub {

PlanScore score_plan(const HubTopology& topo, const ScenarioSet& scen, const InvestmentPlan& plan, int threads) {
  EvalOptions o;
  o.threads = threads;
  const auto ev = evaluate_plan(topo, scen, plan, o);
  PlanScore s;
  s.feasible = ev.feasible;
  if (ev.feasible) {
    s.cost = ev.breakdown.total;
    s.emissions = ev.breakdown.max_emissions();
  }
  return s;
}

namespace {

std::vector<long>* slot(InvestmentPlan& p, int q, const HubTopology& topo, int& index) {
  const int M = static_cast<int>(topo.energies.size());
  const int GC = topo.num_converters();
  const int GS = topo.num_storages();
  if (q < M) return index = q, &p.grid;
  q -= M;
  if (q < GC) return index = q, &p.units;
  q -= GC;
  if (q < GS) return index = q, &p.storage_power;
  return index = q - GS, &p.storage_energy;
}

int bits_of(int q, const HubTopology& topo) {
  const int M = static_cast<int>(topo.energies.size());
  const int GC = topo.num_converters();
  const int GS = topo.num_storages();
  if (q < M) return topo.grid[q].bits;
  q -= M;
  if (q < GC) return topo.spec.converters[q].bits;
  q -= GC;
  if (q < GS) return topo.spec.storages[q].power_bits;
  return topo.spec.storages[q - GS].energy_bits;
}

// Applies one step of `delta` to quantity q; false if it leaves the bit range.
bool step(InvestmentPlan& p, int q, int delta, const HubTopology& topo) {
  int i = 0;
  auto* v = slot(p, q, topo, i);
  const long next = (*v)[i] + delta;
  if (next < 0 || next > max_count(bits_of(q, topo))) return false;
  (*v)[i] = next;
  return true;
}

struct Move {
  std::vector<int> key;  // (quantity, delta) pairs flattened, for the final tie-break
  InvestmentPlan plan;
  PlanScore score;
};

}  // namespace

SearchResult neighbor_search(const HubTopology& topo, const ScenarioSet& scen, const InvestmentPlan& incumbent,
                             double emissions_cap, int order, int threads) {
  check_plan(topo, incumbent);
  SearchResult res;
  res.plan = incumbent;
  res.score = score_plan(topo, scen, incumbent, threads);
  ++res.evaluations;
  res.trace.emplace_back(res.plan, res.score);
  if (!res.score.feasible || res.score.emissions >= emissions_cap) return res;

  const int Q = static_cast<int>(topo.energies.size()) + topo.num_converters() + 2 * topo.num_storages();
  const double tol = 1e-9;
  while (true) {
    std::vector<Move> moves;
    auto consider = [&](std::vector<int> key) {
      Move m{key, res.plan, {}};
      for (std::size_t k = 0; k < key.size(); k += 2) {
        if (!step(m.plan, key[k], key[k + 1], topo)) return;
      }
      moves.push_back(std::move(m));
    };
    for (int a = 0; a < Q; ++a) {
      for (int da : {-1, 1}) {
        consider({a, da});
        if (order < 2) continue;
        for (int b = a + 1; b < Q; ++b) {
          for (int db : {-1, 1}) consider({a, da, b, db});
        }
      }
    }
    parallel_for(static_cast<int>(moves.size()), threads,
                 [&](int i) { moves[i].score = score_plan(topo, scen, moves[i].plan, 1); });
    res.evaluations += static_cast<int>(moves.size());

    const Move* best = nullptr;
    double best_ratio = 0.0, best_gain = 0.0;
    for (const auto& m : moves) {
      if (!m.score.feasible || m.score.emissions > emissions_cap + 1e-9 * std::max(1.0, emissions_cap)) continue;
      const double gain = res.score.cost - m.score.cost;
      if (gain <= tol * std::max(1.0, std::abs(res.score.cost))) continue;
      const double added = m.score.emissions - res.score.emissions;
      const double ratio = added <= 0.0 ? std::numeric_limits<double>::infinity() : gain / added;
      const bool better = !best || ratio > best_ratio || (ratio == best_ratio && gain > best_gain) ||
                          (ratio == best_ratio && gain == best_gain && m.key < best->key);
      if (better) {
        best = &m;
        best_ratio = ratio;
        best_gain = gain;
      }
    }
    if (!best) break;
    res.plan = best->plan;
    res.score = best->score;
    res.trace.emplace_back(res.plan, res.score);
  }
  return res;
}

const char* to_string(PointSource s) {
  switch (s) {
    case PointSource::Solved: return "solved";
    case PointSource::InheritedFromTighter: return "inherited-from-tighter";
    case PointSource::BoundFromLooser: return "bound-from-looser";
  }
  return "?";
}

void share_bounds(std::vector<ParetoPoint>& points) {
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // loosest first
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a].target > points[b].target; });

  // Upper bounds: sweep from the tightest target outward.
  for (std::size_t k = order.size(); k-- > 0;) {
    auto& loose = points[order[k]];
    for (std::size_t j = k + 1; j < order.size(); ++j) {
      const auto& tight = points[order[j]];
      if (!tight.feasible || tight.achieved > loose.target + 1e-9 * std::max(1.0, loose.target)) continue;
      if (!loose.feasible || tight.upper < loose.upper - 1e-9 * std::max(1.0, std::abs(loose.upper))) {
        const double keep_lower = loose.lower;
        const double keep_target = loose.target;
        const bool had = loose.feasible;
        loose = tight;
        loose.target = keep_target;
        loose.lower = had ? keep_lower : tight.lower;
        loose.gap = 0.0;
        loose.source = PointSource::InheritedFromTighter;
      }
    }
  }
  // Lower bounds: a looser target's bound holds for every tighter one.
  double best_lower = -std::numeric_limits<double>::infinity();
  for (std::size_t idx : order) {
    auto& p = points[idx];
    if (p.feasible && best_lower > p.lower + 1e-9 * std::max(1.0, std::abs(p.lower))) {
      p.lower = best_lower;
      if (p.source == PointSource::Solved) p.source = PointSource::BoundFromLooser;
    }
    if (p.feasible) best_lower = std::max(best_lower, p.lower);
  }
  for (auto& p : points) {
    if (p.feasible) {
      p.lower = std::min(p.lower, p.upper);
      p.gap = std::max(0.0, (p.upper - p.lower) / std::max(1.0, std::abs(p.upper)));
    }
  }
}

InvestmentPlan pick_warm_start(const HubTopology& topo, const ScenarioSet& scen, const std::vector<InvestmentPlan>& pool,
                               double price) {
  if (pool.empty()) throw std::invalid_argument("warm-start pool is empty");
  const InvestmentPlan* best = nullptr;
  double best_value = std::numeric_limits<double>::infinity();
  for (const auto& p : pool) {
    const auto ev = evaluate_plan(topo, scen, p);
    if (!ev.feasible) continue;
    double value = ev.breakdown.total;
    for (double e : ev.breakdown.emissions) value += price * e;
    if (value < best_value) {
      best_value = value;
      best = &p;
    }
  }
  return best ? *best : pool.front();
}

}  // namespace ehub
