#include <algorithm>
#include <cmath>
#include <string>

#include "ehub/opt/lp.hpp"

namespace ehub::opt {

namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kBlandAfter = 50;
constexpr int kRefactorEvery = 300;

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

SimplexEngine::SimplexEngine(const Model& model) : model_(model) {
  model.validate();
  m_ = model.num_constraints();
  n_ = model.num_variables();
  ncols_ = n_ + m_;
  stride_ = static_cast<std::size_t>(ncols_) + 1;

  a_.assign(static_cast<std::size_t>(m_) * n_, 0.0);
  b_.assign(m_, 0.0);
  row_scale_.assign(m_, 1.0);
  true_lo_.assign(ncols_, 0.0);
  true_hi_.assign(ncols_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const auto& row = model.constraint(i);
    double big = 0.0;
    for (const auto& t : row.terms) big = std::max(big, std::abs(t.coef));
    const double s = big > 0.0 ? 1.0 / big : 1.0;
    row_scale_[i] = s;
    for (const auto& t : row.terms) a_[static_cast<std::size_t>(i) * n_ + t.var] += s * t.coef;
    b_[i] = s * row.rhs;
    const int j = n_ + i;
    switch (row.sense) {
      case Sense::LessEqual: true_lo_[j] = 0.0; true_hi_[j] = kInf; break;
      case Sense::GreaterEqual: true_lo_[j] = -kInf; true_hi_[j] = 0.0; break;
      case Sense::Equal: true_lo_[j] = 0.0; true_hi_[j] = 0.0; break;
    }
  }
  double cbig = 0.0;
  for (double c : model.objective()) cbig = std::max(cbig, std::abs(c));
  obj_scale_ = cbig > 0.0 ? 1.0 / cbig : 1.0;
  c_.resize(n_);
  for (int j = 0; j < n_; ++j) c_[j] = obj_scale_ * model.objective()[j];

  tab_.assign(static_cast<std::size_t>(m_) * stride_, 0.0);
  value_.assign(ncols_, 0.0);
  lo_ = true_lo_;
  hi_ = true_hi_;
  cost_.assign(ncols_, 0.0);
  d_.assign(ncols_, 0.0);
  basic_.assign(m_, 0);
  row_of_.assign(ncols_, -1);
  state_.assign(ncols_, BoundState::AtLower);
  artificial_.assign(ncols_, 0);
  budget_ = 50 * (m_ + n_) + 5000;
}

void SimplexEngine::reset_identity() {
  std::fill(tab_.begin(), tab_.end(), 0.0);
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < n_; ++j) at(i, j) = a_[static_cast<std::size_t>(i) * n_ + j];
    at(i, n_ + i) = 1.0;
    at(i, ncols_) = b_[i];
  }
  std::fill(row_of_.begin(), row_of_.end(), -1);
  for (int i = 0; i < m_; ++i) {
    basic_[i] = n_ + i;
    row_of_[n_ + i] = i;
    state_[n_ + i] = BoundState::Basic;
  }
  since_refactor_ = 0;
}

void SimplexEngine::place_nonbasic(int j) {
  const bool lo_fin = std::isfinite(lo_[j]);
  const bool hi_fin = std::isfinite(hi_[j]);
  BoundState s = state_[j];
  if (s == BoundState::Basic) s = BoundState::AtLower;
  if (s == BoundState::AtUpper && !hi_fin) s = BoundState::AtLower;
  if (s == BoundState::AtLower && !lo_fin) s = hi_fin ? BoundState::AtUpper : BoundState::Free;
  if (s == BoundState::Free && lo_fin) s = BoundState::AtLower;
  if (s == BoundState::Free && hi_fin) s = BoundState::AtUpper;
  state_[j] = s;
  switch (s) {
    case BoundState::AtLower: value_[j] = lo_[j]; break;
    case BoundState::AtUpper: value_[j] = hi_[j]; break;
    default: value_[j] = 0.0; break;
  }
}

void SimplexEngine::recompute_basic_values() {
  for (int i = 0; i < m_; ++i) {
    double v = at(i, ncols_);
    const double* row = &tab_[static_cast<std::size_t>(i) * stride_];
    for (int j = 0; j < ncols_; ++j) {
      if (state_[j] != BoundState::Basic && value_[j] != 0.0) v -= row[j] * value_[j];
    }
    value_[basic_[i]] = v;
  }
}

void SimplexEngine::recompute_reduced_costs() {
  for (int j = 0; j < ncols_; ++j) d_[j] = cost_[j];
  for (int i = 0; i < m_; ++i) {
    const double cb = cost_[basic_[i]];
    if (cb == 0.0) continue;
    const double* row = &tab_[static_cast<std::size_t>(i) * stride_];
    for (int j = 0; j < ncols_; ++j) d_[j] -= cb * row[j];
  }
  for (int i = 0; i < m_; ++i) d_[basic_[i]] = 0.0;
}

void SimplexEngine::pivot(int r, int q) {
  double* prow = &tab_[static_cast<std::size_t>(r) * stride_];
  const double p = prow[q];
  const double inv = 1.0 / p;
  std::vector<int> nz;
  nz.reserve(64);
  for (std::size_t j = 0; j < stride_; ++j) {
    if (prow[j] != 0.0) {
      prow[j] *= inv;
      nz.push_back(static_cast<int>(j));
    }
  }
  prow[q] = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* row = &tab_[static_cast<std::size_t>(i) * stride_];
    const double f = row[q];
    if (f == 0.0) continue;
    for (int j : nz) row[j] -= f * prow[j];
    row[q] = 0.0;
  }
  const double fd = d_[q];
  if (fd != 0.0) {
    for (int j : nz) {
      if (j < ncols_) d_[j] -= fd * prow[j];
    }
  }
  d_[q] = 0.0;
  const int leaving = basic_[r];
  row_of_[leaving] = -1;
  basic_[r] = q;
  row_of_[q] = r;
  state_[q] = BoundState::Basic;
  ++since_refactor_;
}

Basis SimplexEngine::basis() const { return Basis{state_}; }

bool SimplexEngine::refactor(const Basis& target) {
  if (static_cast<int>(target.state.size()) != ncols_) return false;
  reset_identity();
  // Temporarily neutral costs; reduced costs are recomputed by the caller.
  for (int j = 0; j < n_; ++j) {
    if (target.state[j] != BoundState::Basic) continue;
    int best = -1;
    double big = 1e-9;
    for (int i = 0; i < m_; ++i) {
      const int k = basic_[i];
      if (k < n_) continue;
      if (target.state[k] == BoundState::Basic) continue;
      const double v = std::abs(at(i, j));
      if (v > big) {
        big = v;
        best = i;
      }
    }
    if (best < 0) return false;
    pivot(best, j);
  }
  // pivot() leaves the outgoing state to the caller, so membership comes from row_of_.
  for (int j = 0; j < ncols_; ++j) {
    if (row_of_[j] >= 0) continue;
    state_[j] = target.state[j] == BoundState::Basic ? BoundState::AtLower : target.state[j];
    place_nonbasic(j);
  }
  recompute_basic_values();
  since_refactor_ = 0;
  return true;
}

void SimplexEngine::set_bounds(const std::vector<double>& lower, const std::vector<double>& upper) {
  for (int j = 0; j < n_; ++j) {
    true_lo_[j] = lower.empty() ? model_.variable(j).lower : lower[j];
    true_hi_[j] = upper.empty() ? model_.variable(j).upper : upper[j];
  }
  lo_ = true_lo_;
  hi_ = true_hi_;
  std::fill(artificial_.begin(), artificial_.end(), 0);
}

bool SimplexEngine::start_phase_one() {
  std::fill(cost_.begin(), cost_.end(), 0.0);
  bool any = false;
  for (int i = 0; i < m_; ++i) {
    const int k = basic_[i];
    const double v = value_[k];
    if (v > true_hi_[k] + kPrimalTol) {
      lo_[k] = true_hi_[k];
      hi_[k] = v;
      cost_[k] = 1.0;
      artificial_[k] = 1;
      any = true;
    } else if (v < true_lo_[k] - kPrimalTol) {
      lo_[k] = v;
      hi_[k] = true_lo_[k];
      cost_[k] = -1.0;
      artificial_[k] = 1;
      any = true;
    }
  }
  if (any) recompute_reduced_costs();
  return any;
}

void SimplexEngine::restore_artificial(int j) {
  lo_[j] = true_lo_[j];
  hi_[j] = true_hi_[j];
  cost_[j] = 0.0;
  artificial_[j] = 0;
  if (state_[j] != BoundState::Basic) {
    if (std::abs(value_[j] - lo_[j]) <= std::abs(value_[j] - hi_[j])) {
      state_[j] = BoundState::AtLower;
    } else {
      state_[j] = BoundState::AtUpper;
    }
    place_nonbasic(j);
  }
}

bool SimplexEngine::primal_loop(Phase phase) {
  int degenerate = 0;
  bool bland = false;
  while (true) {
    if (++iterations_ > budget_) throw NumericalFailure("simplex pivot budget exhausted");
    if (since_refactor_ > kRefactorEvery) {
      const Basis snap = basis();
      const auto saved_value = value_;
      if (refactor(snap)) {
        // refactor() re-places nonbasics at bounds; artificial nonbasics keep their values.
        for (int j = 0; j < ncols_; ++j) {
          if (state_[j] != BoundState::Basic) value_[j] = saved_value[j];
        }
        recompute_basic_values();
        recompute_reduced_costs();
      }
    }

    int q = -1;
    int dir = 0;
    double best = 0.0;
    for (int j = 0; j < ncols_; ++j) {
      const BoundState s = state_[j];
      if (s == BoundState::Basic) continue;
      if (lo_[j] == hi_[j]) continue;
      const double dj = d_[j];
      const bool can_inc = s == BoundState::AtLower || s == BoundState::Free;
      const bool can_dec = s == BoundState::AtUpper || s == BoundState::Free;
      int cand = 0;
      if (dj < -kDualTol && can_inc) cand = 1;
      else if (dj > kDualTol && can_dec) cand = -1;
      if (cand == 0) continue;
      if (bland) {
        q = j;
        dir = cand;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        q = j;
        dir = cand;
      }
    }
    if (q < 0) return true;

    double theta = (std::isfinite(lo_[q]) && std::isfinite(hi_[q])) ? hi_[q] - lo_[q] : kInf;
    int r = -1;
    double r_alpha = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double alpha = at(i, q) * dir;
      if (std::abs(alpha) < kPivotTol) continue;
      const int k = basic_[i];
      double ratio;
      if (alpha > 0.0) {
        if (!std::isfinite(lo_[k])) continue;
        ratio = (value_[k] - lo_[k]) / alpha;
      } else {
        if (!std::isfinite(hi_[k])) continue;
        ratio = (hi_[k] - value_[k]) / (-alpha);
      }
      if (ratio < 0.0) ratio = 0.0;
      bool take = false;
      if (ratio < theta - 1e-12) {
        take = true;
      } else if (r >= 0 && ratio <= theta + 1e-12) {
        take = bland ? k < basic_[r] : std::abs(alpha) > std::abs(r_alpha);
      }
      if (take) {
        theta = std::min(theta, ratio);
        r = i;
        r_alpha = alpha;
      }
    }
    if (!std::isfinite(theta)) {
      if (phase == Phase::One) throw NumericalFailure("phase one ray encountered");
      unbounded_col_ = q;
      unbounded_dir_ = dir;
      return false;
    }

    const double delta = dir * theta;
    if (delta != 0.0) {
      for (int i = 0; i < m_; ++i) {
        const double t = at(i, q);
        if (t != 0.0) value_[basic_[i]] -= t * delta;
      }
      value_[q] += delta;
    }
    if (r < 0) {
      state_[q] = dir > 0 ? BoundState::AtUpper : BoundState::AtLower;
      value_[q] = dir > 0 ? hi_[q] : lo_[q];
    } else {
      const int k = basic_[r];
      const bool to_lower = r_alpha > 0.0;
      value_[k] = to_lower ? lo_[k] : hi_[k];
      pivot(r, q);
      state_[k] = to_lower ? BoundState::AtLower : BoundState::AtUpper;
    }

    if (theta < 1e-12) {
      if (++degenerate > kBlandAfter) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }

    if (phase == Phase::One) {
      bool changed = false;
      bool remaining = false;
      for (int j = n_; j < ncols_; ++j) {
        if (!artificial_[j]) continue;
        const double v = value_[j];
        if (v >= true_lo_[j] - kPrimalTol && v <= true_hi_[j] + kPrimalTol) {
          restore_artificial(j);
          changed = true;
        } else {
          remaining = true;
        }
      }
      if (changed) {
        recompute_basic_values();
        recompute_reduced_costs();
      }
      if (!remaining) return true;
    }
  }
}

bool SimplexEngine::dual_loop() {
  while (true) {
    if (++iterations_ > budget_) throw NumericalFailure("dual simplex pivot budget exhausted");
    int r = -1;
    double worst = kPrimalTol;
    for (int i = 0; i < m_; ++i) {
      const int k = basic_[i];
      const double v = value_[k];
      const double viol = std::max(lo_[k] - v, v - hi_[k]);
      if (viol > worst) {
        worst = viol;
        r = i;
      }
    }
    if (r < 0) return true;
    const int k = basic_[r];
    const bool increase = value_[k] < lo_[k];
    const double target = increase ? lo_[k] : hi_[k];

    int q = -1;
    double best = kInf;
    double q_alpha = 0.0;
    for (int j = 0; j < ncols_; ++j) {
      const BoundState s = state_[j];
      if (s == BoundState::Basic) continue;
      if (lo_[j] == hi_[j]) continue;
      const double alpha = at(r, j);
      if (std::abs(alpha) < kPivotTol) continue;
      // x_k changes by -alpha * delta_j.
      const int need = increase ? (alpha < 0 ? 1 : -1) : (alpha > 0 ? 1 : -1);
      if (need > 0 && !(s == BoundState::AtLower || s == BoundState::Free)) continue;
      if (need < 0 && !(s == BoundState::AtUpper || s == BoundState::Free)) continue;
      const double ratio = std::abs(d_[j]) / std::abs(alpha);
      if (ratio < best - 1e-12 || (ratio <= best + 1e-12 && std::abs(alpha) > std::abs(q_alpha))) {
        best = ratio;
        q = j;
        q_alpha = alpha;
      }
    }
    if (q < 0) return false;

    const double delta = (value_[k] - target) / q_alpha;
    for (int i = 0; i < m_; ++i) {
      const double t = at(i, q);
      if (t != 0.0) value_[basic_[i]] -= t * delta;
    }
    value_[q] += delta;
    value_[k] = target;
    pivot(r, q);
    state_[k] = increase ? BoundState::AtLower : BoundState::AtUpper;
  }
}

bool SimplexEngine::primal_feasible(double tol) const {
  for (int i = 0; i < m_; ++i) {
    const int k = basic_[i];
    if (value_[k] < lo_[k] - tol || value_[k] > hi_[k] + tol) return false;
  }
  return true;
}

bool SimplexEngine::dual_feasible(double tol) const {
  for (int j = 0; j < ncols_; ++j) {
    switch (state_[j]) {
      case BoundState::Basic: break;
      case BoundState::AtLower:
        if (lo_[j] != hi_[j] && d_[j] < -tol) return false;
        break;
      case BoundState::AtUpper:
        if (lo_[j] != hi_[j] && d_[j] > tol) return false;
        break;
      case BoundState::Free:
        if (std::abs(d_[j]) > tol) return false;
        break;
    }
  }
  return true;
}

bool SimplexEngine::verify_and_repair() {
  // Recompute logical values from structurals and compare with the tableau state.
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    double act = 0.0;
    const double* arow = &a_[static_cast<std::size_t>(i) * n_];
    for (int j = 0; j < n_; ++j) act += arow[j] * value_[j];
    const double s = b_[i] - act;
    worst = std::max(worst, std::abs(s - value_[n_ + i]));
  }
  if (worst <= 1e-9) return true;
  const Basis snap = basis();
  if (!refactor(snap)) return false;
  recompute_reduced_costs();
  return false;
}

LpSolution SimplexEngine::cold_solve() {
  reset_identity();
  for (int j = 0; j < n_; ++j) {
    state_[j] = BoundState::AtLower;
    place_nonbasic(j);
  }
  recompute_basic_values();
  if (start_phase_one()) {
    primal_loop(Phase::One);
    bool remaining = false;
    for (int j = n_; j < ncols_; ++j) remaining = remaining || artificial_[j];
    if (remaining) return finish_infeasible_phase_one();
  }
  for (int j = 0; j < ncols_; ++j) cost_[j] = j < n_ ? c_[j] : 0.0;
  recompute_reduced_costs();
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (!primal_loop(Phase::Two)) return finish_unbounded(unbounded_col_, unbounded_dir_);
    if (verify_and_repair()) return finish(LpStatus::Optimal);
    if (!primal_feasible(kPrimalTol)) {
      if (!dual_loop()) break;
    }
  }
  if (verify_and_repair() && primal_feasible(1e-7)) return finish(LpStatus::Optimal);
  throw NumericalFailure("simplex could not restore primal feasibility after refactorization");
}

LpSolution SimplexEngine::solve(const std::vector<double>& lower, const std::vector<double>& upper,
                                const Basis* warm) {
  iterations_ = 0;
  set_bounds(lower, upper);
  if (warm != nullptr && !warm->empty() && refactor(*warm)) {
    for (int j = 0; j < ncols_; ++j) cost_[j] = j < n_ ? c_[j] : 0.0;
    recompute_reduced_costs();
    if (primal_feasible(kPrimalTol)) {
      if (!primal_loop(Phase::Two)) return finish_unbounded(unbounded_col_, unbounded_dir_);
      if (verify_and_repair() && primal_feasible(kPrimalTol)) return finish(LpStatus::Optimal);
    } else if (dual_feasible(kDualTol)) {
      if (dual_loop()) {
        if (!primal_loop(Phase::Two)) return finish_unbounded(unbounded_col_, unbounded_dir_);
        if (verify_and_repair() && primal_feasible(kPrimalTol)) return finish(LpStatus::Optimal);
      }
    }
  }
  return cold_solve();
}

LpSolution SimplexEngine::resolve(const std::vector<double>& lower, const std::vector<double>& upper) {
  iterations_ = 0;
  for (int j = 0; j < n_; ++j) {
    true_lo_[j] = lower[j];
    true_hi_[j] = upper[j];
    lo_[j] = lower[j];
    hi_[j] = upper[j];
  }
  for (int j = 0; j < ncols_; ++j) {
    if (artificial_[j]) return solve(lower, upper);
  }
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == BoundState::Basic) continue;
    const double old = value_[j];
    const bool lo_fin = std::isfinite(lo_[j]);
    const bool hi_fin = std::isfinite(hi_[j]);
    if (lo_fin && hi_fin) {
      state_[j] = d_[j] >= 0.0 ? BoundState::AtLower : BoundState::AtUpper;
    } else if (lo_fin) {
      state_[j] = BoundState::AtLower;
    } else if (hi_fin) {
      state_[j] = BoundState::AtUpper;
    } else {
      state_[j] = BoundState::Free;
    }
    place_nonbasic(j);
    const double delta = value_[j] - old;
    if (delta != 0.0) {
      for (int i = 0; i < m_; ++i) {
        const double t = at(i, j);
        if (t != 0.0) value_[basic_[i]] -= t * delta;
      }
    }
  }
  if (!dual_feasible(kDualTol)) return solve(lower, upper);
  if (!dual_loop()) {
    LpSolution out;
    out.status = LpStatus::Infeasible;
    out.iterations = iterations_;
    out.basis = basis();
    return out;
  }
  if (!primal_loop(Phase::Two)) return finish_unbounded(unbounded_col_, unbounded_dir_);
  if (verify_and_repair() && primal_feasible(kPrimalTol)) return finish(LpStatus::Optimal);
  return solve(lower, upper);
}

LpSolution SimplexEngine::finish(LpStatus status) {
  LpSolution out;
  out.status = status;
  out.iterations = iterations_;
  out.x.assign(value_.begin(), value_.begin() + n_);
  // Snap tiny bound violations caused by round-off.
  for (int j = 0; j < n_; ++j) {
    out.x[j] = std::clamp(out.x[j], true_lo_[j], true_hi_[j]);
  }
  out.objective = model_.objective_value(out.x);
  out.duals.resize(m_);
  for (int i = 0; i < m_; ++i) out.duals[i] = -d_[n_ + i] * row_scale_[i] / obj_scale_;
  out.reduced_costs.resize(n_);
  for (int j = 0; j < n_; ++j) out.reduced_costs[j] = d_[j] / obj_scale_;
  out.basis = basis();
  return out;
}

LpSolution SimplexEngine::finish_infeasible_phase_one() {
  LpSolution out;
  out.status = LpStatus::Infeasible;
  out.iterations = iterations_;
  out.farkas.resize(m_);
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    out.farkas[i] = (cost_[j] - d_[j]) * row_scale_[i];
  }
  out.basis = basis();
  return out;
}

LpSolution SimplexEngine::finish_unbounded(int entering, int dir) {
  LpSolution out;
  out.status = LpStatus::Unbounded;
  out.iterations = iterations_;
  out.ray.assign(n_, 0.0);
  if (entering < n_) out.ray[entering] = dir;
  for (int i = 0; i < m_; ++i) {
    const int k = basic_[i];
    if (k < n_) out.ray[k] = -at(i, entering) * dir;
  }
  out.x.assign(value_.begin(), value_.begin() + n_);
  out.basis = basis();
  return out;
}

LpSolution solve_lp(const Model& model, const LpOptions& options) {
  SimplexEngine engine(model);
  if (options.pivot_budget > 0) engine.set_pivot_budget(options.pivot_budget);
  return engine.solve(options.lower, options.upper, options.warm);
}

}  // namespace ehub::opt
