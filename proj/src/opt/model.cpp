#include "ehub/opt/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace ehub::opt {

VarId Model::add_variable(std::string name, double lower, double upper, VarKind kind,
                          std::string group) {
  if (kind == VarKind::Binary) {
    lower = std::max(lower, 0.0);
    upper = std::min(upper, 1.0);
  }
  vars_.push_back(Variable{std::move(name), lower, upper, kind, std::move(group)});
  objective_.push_back(0.0);
  return static_cast<VarId>(vars_.size() - 1);
}

RowId Model::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs,
                            std::string group) {
  std::map<VarId, double> merged;
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw ModelError("constraint '" + name + "' references undeclared variable");
    }
    merged[t.var] += t.coef;
  }
  std::vector<Term> clean;
  clean.reserve(merged.size());
  for (const auto& [v, c] : merged) {
    if (c != 0.0) clean.push_back(Term{v, c});
  }
  rows_.push_back(Constraint{std::move(name), std::move(clean), sense, rhs, std::move(group)});
  return static_cast<RowId>(rows_.size() - 1);
}

void Model::set_objective(VarId var, double coef) { objective_.at(static_cast<std::size_t>(var)) = coef; }

void Model::add_objective(VarId var, double coef) { objective_.at(static_cast<std::size_t>(var)) += coef; }

void Model::add_objective(const std::vector<Term>& terms, double scale) {
  for (const auto& t : terms) add_objective(t.var, scale * t.coef);
}

void Model::set_bounds(VarId var, double lower, double upper) {
  auto& v = vars_.at(static_cast<std::size_t>(var));
  v.lower = lower;
  v.upper = upper;
}

bool Model::has_integers() const {
  return std::any_of(vars_.begin(), vars_.end(),
                     [](const Variable& v) { return v.kind != VarKind::Continuous; });
}

double Model::objective_value(const std::vector<double>& x) const {
  double z = objective_constant_;
  for (std::size_t j = 0; j < vars_.size(); ++j) z += objective_[j] * x[j];
  return z;
}

double Model::row_activity(RowId r, const std::vector<double>& x) const {
  double a = 0.0;
  for (const auto& t : rows_[static_cast<std::size_t>(r)].terms) a += t.coef * x[static_cast<std::size_t>(t.var)];
  return a;
}

double Model::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    worst = std::max(worst, vars_[j].lower - x[j]);
    worst = std::max(worst, x[j] - vars_[j].upper);
  }
  for (int r = 0; r < num_constraints(); ++r) {
    const double a = row_activity(r, x);
    const auto& c = rows_[static_cast<std::size_t>(r)];
    switch (c.sense) {
      case Sense::LessEqual: worst = std::max(worst, a - c.rhs); break;
      case Sense::GreaterEqual: worst = std::max(worst, c.rhs - a); break;
      case Sense::Equal: worst = std::max(worst, std::abs(a - c.rhs)); break;
    }
  }
  return worst;
}

void Model::validate() const {
  for (const auto& v : vars_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      throw ModelError("variable '" + v.name + "' has invalid bounds");
    }
    if (v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0)) {
      throw ModelError("binary variable '" + v.name + "' not bounded in [0,1]");
    }
  }
  for (double c : objective_) {
    if (!std::isfinite(c)) throw ModelError("non-finite objective coefficient");
  }
  for (const auto& r : rows_) {
    if (!std::isfinite(r.rhs)) throw ModelError("row '" + r.name + "' has non-finite rhs");
    for (const auto& t : r.terms) {
      if (!std::isfinite(t.coef)) throw ModelError("row '" + r.name + "' has non-finite coefficient");
    }
  }
}

namespace {

void write_terms(std::ostream& out, const Model& model, const std::vector<Term>& terms) {
  if (terms.empty()) {
    out << " 0";
    return;
  }
  bool first = true;
  for (const auto& t : terms) {
    const double c = t.coef;
    if (first) {
      out << (c < 0 ? " - " : " ");
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    out << std::abs(c) << ' ' << model.variable(t.var).name;
    first = false;
  }
}

}  // namespace

void write_lp_text(const Model& model, std::ostream& out) {
  out << "minimize\n  obj:";
  std::vector<Term> obj;
  for (int j = 0; j < model.num_variables(); ++j) {
    const double c = model.objective()[static_cast<std::size_t>(j)];
    if (c != 0.0) obj.push_back(Term{j, c});
  }
  write_terms(out, model, obj);
  if (model.objective_constant() != 0.0) out << " + " << model.objective_constant();
  out << "\nsubject to\n";
  for (const auto& r : model.constraints()) {
    out << "  " << r.name << ':';
    write_terms(out, model, r.terms);
    switch (r.sense) {
      case Sense::LessEqual: out << " <= "; break;
      case Sense::GreaterEqual: out << " >= "; break;
      case Sense::Equal: out << " = "; break;
    }
    out << r.rhs << '\n';
  }
  out << "bounds\n";
  for (const auto& v : model.variables()) {
    if (v.kind == VarKind::Binary) continue;
    out << "  ";
    if (v.lower == -kInf && v.upper == kInf) {
      out << v.name << " free\n";
      continue;
    }
    if (v.lower == -kInf) {
      out << "-inf";
    } else {
      out << v.lower;
    }
    out << " <= " << v.name << " <= ";
    if (v.upper == kInf) {
      out << "+inf";
    } else {
      out << v.upper;
    }
    out << '\n';
  }
  out << "binary\n";
  for (const auto& v : model.variables()) {
    if (v.kind == VarKind::Binary) out << "  " << v.name << '\n';
  }
  out << "general\n";
  for (const auto& v : model.variables()) {
    if (v.kind == VarKind::Integer) out << "  " << v.name << '\n';
  }
  out << "end\n";
}

}  // namespace ehub::opt
