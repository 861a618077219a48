#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ehub/opt/model.hpp"

namespace ehub::opt {

enum class LpStatus : std::uint8_t { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

/// Raised when the simplex exhausts its pivot budget or cannot restore
/// primal feasibility after refactorization.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nonbasic position of a column in a simplex basis.
enum class BoundState : std::uint8_t { Basic, AtLower, AtUpper, Free };

/// Basis snapshot over structural columns followed by one logical column
/// per row.
struct Basis {
  std::vector<BoundState> state;
  bool empty() const { return state.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  /// d(objective)/d(rhs) per row; sign follows the row as written.
  std::vector<double> duals;
  /// c_j - A_j^T y per structural column.
  std::vector<double> reduced_costs;
  /// Infeasible: y with y^T b > max{y^T a x : x within bounds, rows' slack ranges}.
  std::vector<double> farkas;
  /// Unbounded: improving direction over structural columns.
  std::vector<double> ray;
  Basis basis;
  int iterations = 0;
};

struct LpOptions {
  /// Optional starting basis (e.g. from a previous solve of a related model).
  const Basis* warm = nullptr;
  /// Bound overrides; empty means the model's own bounds.
  std::vector<double> lower;
  std::vector<double> upper;
  int pivot_budget = 0;  // 0 = automatic
};

/// Dense bounded primal/dual simplex on a scaled tableau.
///
/// Rows and the objective are scaled to unit max-abs before solving. The
/// engine keeps its tableau between calls so that branch-and-bound can
/// tighten bounds and re-optimize with the dual simplex.
class SimplexEngine {
 public:
  explicit SimplexEngine(const Model& model);

  /// Cold solve (or crash from `warm` when supplied).
  LpSolution solve(const std::vector<double>& lower, const std::vector<double>& upper,
                   const Basis* warm = nullptr);
  /// Re-optimize after bound changes, reusing the current basis.
  LpSolution resolve(const std::vector<double>& lower, const std::vector<double>& upper);

  Basis basis() const;
  void set_pivot_budget(int budget) { budget_ = budget; }
  int rows() const { return m_; }
  int cols() const { return n_; }

 private:
  enum class Phase : std::uint8_t { One, Two };

  double& at(int i, int j) { return tab_[static_cast<std::size_t>(i) * stride_ + j]; }
  double at(int i, int j) const { return tab_[static_cast<std::size_t>(i) * stride_ + j]; }

  void reset_identity();
  bool refactor(const Basis& target);
  void place_nonbasic(int j);
  void recompute_basic_values();
  void recompute_reduced_costs();
  void pivot(int r, int j);
  void set_bounds(const std::vector<double>& lower, const std::vector<double>& upper);
  bool start_phase_one();
  void restore_artificial(int j);
  bool primal_loop(Phase phase);
  bool dual_loop();
  bool primal_feasible(double tol) const;
  bool dual_feasible(double tol) const;
  LpSolution cold_solve();
  LpSolution finish(LpStatus status);
  LpSolution finish_infeasible_phase_one();
  LpSolution finish_unbounded(int entering, int dir);
  bool verify_and_repair();

  const Model& model_;
  int m_ = 0;
  int n_ = 0;      // structural columns
  int ncols_ = 0;  // structural + logical
  std::size_t stride_ = 0;

  std::vector<double> a_;        // scaled A, m x n dense
  std::vector<double> b_;        // scaled rhs
  std::vector<double> row_scale_;
  double obj_scale_ = 1.0;
  std::vector<double> c_;        // scaled structural costs

  std::vector<double> tab_;      // B^-1 [A | I]
  std::vector<double> value_;    // current value per column
  std::vector<double> lo_, hi_;  // working bounds per column
  std::vector<double> true_lo_, true_hi_;
  std::vector<double> cost_;     // working costs (phase dependent)
  std::vector<double> d_;        // reduced costs
  std::vector<int> basic_;       // column basic in row i
  std::vector<int> row_of_;      // row where column is basic, or -1
  std::vector<BoundState> state_;
  std::vector<char> artificial_;  // logical temporarily relaxed in phase one

  int iterations_ = 0;
  int budget_ = 0;
  int since_refactor_ = 0;
  int unbounded_col_ = -1;
  int unbounded_dir_ = 0;
};

/// Solves the LP relaxation (integrality ignored).
LpSolution solve_lp(const Model& model, const LpOptions& options = {});

}  // namespace ehub::opt
