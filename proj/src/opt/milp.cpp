#include "ehub/opt/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

namespace ehub::opt {

const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::Optimal: return "optimal";
    case MilpStatus::Feasible: return "feasible";
    case MilpStatus::Infeasible: return "infeasible";
    case MilpStatus::Unbounded: return "unbounded";
    case MilpStatus::NoSolution: return "no_solution";
  }
  return "unknown";
}

double relative_gap(double objective, double bound) {
  if (!std::isfinite(objective)) return kInf;
  if (!std::isfinite(bound)) return kInf;
  return std::max(0.0, (objective - bound) / std::max(1.0, std::abs(objective)));
}

namespace {

struct Node {
  std::vector<double> lo;
  std::vector<double> hi;
  double bound = -kInf;
  int depth = 0;
};

struct WorseBound {
  bool operator()(const Node& a, const Node& b) const { return a.bound > b.bound; }
};

class BranchAndBound {
 public:
  BranchAndBound(const Model& model, const MilpOptions& options)
      : model_(model), opt_(options), engine_(model), start_(std::chrono::steady_clock::now()) {
    if (opt_.pivot_budget > 0) engine_.set_pivot_budget(opt_.pivot_budget);
    for (int j = 0; j < model.num_variables(); ++j) {
      if (model.variable(j).kind != VarKind::Continuous) ints_.push_back(j);
    }
  }

  MilpResult run();

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  double prune_level() const {
    double level = result_.objective;
    if (opt_.cutoff) level = std::min(level, *opt_.cutoff);
    return level;
  }
  bool prunable(double bound) const {
    const double level = prune_level();
    if (!std::isfinite(level)) return false;
    return bound >= level - opt_.gap_tol * std::max(1.0, std::abs(level));
  }
  int pick_branch(const std::vector<double>& x) const;
  bool try_candidate(const std::vector<double>& cand, bool from_hook, std::string* reason);
  void install(const std::vector<double>& x, double obj, bool from_hook);
  LpSolution solve_node(const Node& node, bool first);
  void record(double bound);

  const Model& model_;
  const MilpOptions& opt_;
  SimplexEngine engine_;
  std::chrono::steady_clock::time_point start_;
  std::vector<int> ints_;
  MilpResult result_;
  double pruned_min_ = kInf;
};

int BranchAndBound::pick_branch(const std::vector<double>& x) const {
  int best = -1;
  double best_frac = opt_.int_tol;
  for (int j : ints_) {
    const double f = x[j] - std::floor(x[j]);
    const double dist = std::min(f, 1.0 - f);
    if (dist > best_frac + 1e-12) {
      best_frac = dist;
      best = j;
    }
  }
  return best;
}

void BranchAndBound::record(double bound) {
  result_.trajectory.push_back(TrajectoryPoint{elapsed(), result_.nodes, bound, result_.objective});
}

void BranchAndBound::install(const std::vector<double>& x, double obj, bool from_hook) {
  result_.x = x;
  result_.objective = obj;
  if (from_hook || !opt_.heuristic_hook) return;
  auto cand = opt_.heuristic_hook(x, obj);
  if (cand) try_candidate(*cand, true, nullptr);
}

bool BranchAndBound::try_candidate(const std::vector<double>& cand, bool from_hook, std::string* reason) {
  const int n = model_.num_variables();
  if (static_cast<int>(cand.size()) != n) {
    if (reason) *reason = "candidate has wrong length";
    return false;
  }
  std::vector<double> lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    lo[j] = model_.variable(j).lower;
    hi[j] = model_.variable(j).upper;
  }
  for (int j : ints_) {
    const double v = cand[j];
    const double r = std::round(v);
    if (std::abs(v - r) > opt_.int_tol) {
      if (reason) *reason = "variable '" + model_.variable(j).name + "' is not integral";
      return false;
    }
    if (r < lo[j] - opt_.int_tol || r > hi[j] + opt_.int_tol) {
      if (reason) *reason = "variable '" + model_.variable(j).name + "' is outside its bounds";
      return false;
    }
    lo[j] = r;
    hi[j] = r;
  }
  LpOptions lp;
  lp.lower = lo;
  lp.upper = hi;
  lp.pivot_budget = opt_.pivot_budget;
  const LpSolution sol = solve_lp(model_, lp);
  if (sol.status != LpStatus::Optimal) {
    if (reason) *reason = std::string("continuous completion is ") + to_string(sol.status);
    return false;
  }
  if (sol.objective < result_.objective) {
    install(sol.x, sol.objective, from_hook);
    record(result_.bound);
  }
  return true;
}

LpSolution BranchAndBound::solve_node(const Node& node, bool first) {
  ++result_.nodes;
  if (first) return engine_.solve(node.lo, node.hi);
  try {
    return engine_.resolve(node.lo, node.hi);
  } catch (const NumericalFailure&) {
    return engine_.solve(node.lo, node.hi);
  }
}

MilpResult BranchAndBound::run() {
  const int n = model_.num_variables();
  Node root;
  root.lo.resize(n);
  root.hi.resize(n);
  for (int j = 0; j < n; ++j) {
    root.lo[j] = model_.variable(j).lower;
    root.hi[j] = model_.variable(j).upper;
  }
  for (int j : ints_) {
    root.lo[j] = std::ceil(root.lo[j] - opt_.int_tol);
    root.hi[j] = std::floor(root.hi[j] + opt_.int_tol);
  }

  if (opt_.warm_start) {
    std::string why;
    result_.warm_start_accepted = try_candidate(*opt_.warm_start, false, &why);
    if (!result_.warm_start_accepted) result_.warm_start_reason = why;
  }

  std::priority_queue<Node, std::vector<Node>, WorseBound> open;
  std::optional<Node> dive;
  bool first = true;
  dive = std::move(root);

  auto global_bound = [&]() {
    double b = pruned_min_;
    if (!open.empty()) b = std::min(b, open.top().bound);
    if (dive) b = std::min(b, dive->bound);
    b = std::min(b, result_.objective);
    if (opt_.lower_bound) b = std::max(b, *opt_.lower_bound);
    return b;
  };

  while (dive || !open.empty()) {
    const double gb = global_bound();
    result_.bound = gb;
    if (std::isfinite(result_.objective) && relative_gap(result_.objective, gb) <= opt_.gap_tol) break;
    if (opt_.node_limit > 0 && result_.nodes >= opt_.node_limit) {
      result_.limit = "node_limit";
      break;
    }
    if (opt_.time_limit_s > 0.0 && elapsed() >= opt_.time_limit_s) {
      result_.limit = "time_limit";
      break;
    }

    Node node;
    if (dive) {
      node = std::move(*dive);
      dive.reset();
    } else {
      node = open.top();
      open.pop();
    }
    if (prunable(node.bound)) {
      pruned_min_ = std::min(pruned_min_, node.bound);
      continue;
    }

    const LpSolution lp = solve_node(node, first);
    const bool was_root = first;
    first = false;
    if (lp.status == LpStatus::Unbounded) {
      if (was_root) {
        result_.status = MilpStatus::Unbounded;
        return result_;
      }
      continue;
    }
    if (lp.status == LpStatus::Infeasible) {
      if (was_root) record(kInf);
      continue;
    }
    if (was_root) {
      record(lp.objective);
      if (opt_.heuristic_hook) {
        auto cand = opt_.heuristic_hook(lp.x, lp.objective);
        if (cand) try_candidate(*cand, true, nullptr);
      }
    }
    if (prunable(lp.objective)) {
      pruned_min_ = std::min(pruned_min_, lp.objective);
      continue;
    }
    const int j = pick_branch(lp.x);
    if (j < 0) {
      if (lp.objective < result_.objective) {
        install(lp.x, lp.objective, false);
        record(global_bound());
      }
      continue;
    }
    const double v = lp.x[j];
    Node down = node;
    down.hi[j] = std::floor(v);
    down.bound = lp.objective;
    down.depth = node.depth + 1;
    Node up = std::move(node);
    up.lo[j] = std::ceil(v);
    up.bound = lp.objective;
    up.depth = down.depth;
    if (v - std::floor(v) < 0.5) {
      dive = std::move(down);
      open.push(std::move(up));
    } else {
      dive = std::move(up);
      open.push(std::move(down));
    }
    if (result_.nodes % 100 == 0) record(global_bound());
  }

  result_.bound = global_bound();
  if (!dive && open.empty() && result_.limit.empty()) {
    // Search exhausted: every leaf is closed.
    result_.bound = std::isfinite(result_.objective) ? std::min(pruned_min_, result_.objective) : pruned_min_;
    if (opt_.lower_bound) result_.bound = std::max(result_.bound, *opt_.lower_bound);
  }
  if (std::isfinite(result_.objective)) {
    result_.gap = relative_gap(result_.objective, result_.bound);
    result_.status = result_.gap <= opt_.gap_tol ? MilpStatus::Optimal : MilpStatus::Feasible;
  } else if (result_.limit.empty()) {
    if (opt_.cutoff && std::isfinite(pruned_min_)) {
      result_.status = MilpStatus::NoSolution;
      result_.limit = "cutoff";
    } else {
      result_.status = MilpStatus::Infeasible;
    }
  } else {
    result_.status = MilpStatus::NoSolution;
  }
  record(result_.bound);
  return result_;
}

}  // namespace

MilpResult solve_milp(const Model& model, const MilpOptions& options) {
  model.validate();
  BranchAndBound bb(model, options);
  return bb.run();
}

}  // namespace ehub::opt
