#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ehub/opt/lp.hpp"
#include "ehub/opt/model.hpp"

namespace ehub::opt {

enum class MilpStatus : std::uint8_t {
  Optimal,     // gap closed within tolerance
  Feasible,    // limit hit with an incumbent
  Infeasible,  // proven
  Unbounded,   // relaxation unbounded
  NoSolution,  // limit hit without an incumbent
};

const char* to_string(MilpStatus s);

/// Candidate point proposed by a heuristic. Only integer entries are used;
/// continuous entries are re-optimized with the integers fixed.
using HeuristicHook =
    std::function<std::optional<std::vector<double>>(const std::vector<double>& x, double objective)>;

struct MilpOptions {
  double gap_tol = 1e-6;  // relative gap (obj - bound) / max(1, |obj|)
  double int_tol = 1e-6;
  double time_limit_s = 0.0;  // 0 = none
  long node_limit = 0;        // 0 = none
  int pivot_budget = 0;       // per LP, 0 = automatic
  std::optional<std::vector<double>> warm_start;
  /// Called at the root and whenever a new incumbent is found by the search.
  HeuristicHook heuristic_hook;
  /// Known objective value of some feasible point; nodes at or above it are pruned.
  std::optional<double> cutoff;
  /// Known valid lower bound; used only in gap reporting and termination.
  std::optional<double> lower_bound;
};

struct TrajectoryPoint {
  double seconds = 0.0;
  long nodes = 0;
  double bound = 0.0;
  double incumbent = kInf;
};

struct MilpResult {
  MilpStatus status = MilpStatus::NoSolution;
  std::vector<double> x;
  double objective = kInf;
  double bound = -kInf;
  double gap = kInf;
  long nodes = 0;
  std::string limit;  // which limit stopped the search, empty if none
  bool warm_start_accepted = false;
  std::string warm_start_reason;  // why a supplied warm start was rejected
  std::vector<TrajectoryPoint> trajectory;
};

double relative_gap(double objective, double bound);

/// Best-first branch-and-bound with depth-first diving. Branches on the
/// most fractional integer variable (lowest index on ties).
MilpResult solve_milp(const Model& model, const MilpOptions& options = {});

}  // namespace ehub::opt
