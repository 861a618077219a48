#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehub::opt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind : std::uint8_t { Continuous, Binary, Integer };
enum class Sense : std::uint8_t { LessEqual, Equal, GreaterEqual };

using VarId = int;
using RowId = int;

struct Term {
  VarId var = 0;
  double coef = 0.0;
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarKind kind = VarKind::Continuous;
  std::string group;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string group;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear / mixed-integer model, minimization only.
///
/// Variables and rows carry a free-form group tag used for reporting
/// (complexity tallies, solution export). Duplicate terms within one row
/// are merged when the row is added.
class Model {
 public:
  VarId add_variable(std::string name, double lower, double upper,
                     VarKind kind = VarKind::Continuous, std::string group = {});
  RowId add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs,
                       std::string group = {});

  void set_objective(VarId var, double coef);
  void add_objective(VarId var, double coef);
  void add_objective(const std::vector<Term>& terms, double scale = 1.0);
  void set_objective_constant(double c) { objective_constant_ = c; }
  double objective_constant() const { return objective_constant_; }

  void set_bounds(VarId var, double lower, double upper);

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  const Variable& variable(VarId v) const { return vars_.at(static_cast<std::size_t>(v)); }
  const Constraint& constraint(RowId r) const { return rows_.at(static_cast<std::size_t>(r)); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const std::vector<double>& objective() const { return objective_; }

  bool has_integers() const;

  double objective_value(const std::vector<double>& x) const;
  double row_activity(RowId r, const std::vector<double>& x) const;
  /// Largest violation of any row or bound at x (absolute, unscaled).
  double max_violation(const std::vector<double>& x) const;

  /// Throws ModelError if any invariant is broken (non-finite data, bad
  /// binary bounds, out-of-range variable references).
  void validate() const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<double> objective_;
  double objective_constant_ = 0.0;
};

/// Human-readable LP-text dump. Grammar is documented in README.md.
void write_lp_text(const Model& model, std::ostream& out);

}  // namespace ehub::opt
