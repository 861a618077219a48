#include "ehub/opt/complexity.hpp"

#include <ostream>
#include <string_view>

namespace ehub::opt {

ComplexityCounts count_complexity(const ComplexityDims& d) {
  const long sty = d.S * d.T * d.Y;
  const long base = 2 * d.L + 6 * d.GS + 5 * d.M + d.Pout + d.GC;
  ComplexityCounts c;
  c.integer_vars = d.M + 2 * d.GS + d.GC;
  c.binary_vars = d.NA * d.M + d.GS * (d.NB + d.NC) + d.ND * d.GC;
  c.continuous_vars = sty * (base + 2 * d.M * d.NA + 2 * d.GS * (d.NB + d.NC) + d.GC * d.ND);
  c.constraints = sty * (base + 6 * d.M * d.NA + 6 * d.GS * (d.NB + d.NC) + 3 * d.GC * d.ND);
  return c;
}

namespace {

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

}  // namespace

ComplexityCounts tally_model(const Model& model) {
  ComplexityCounts c;
  for (const auto& v : model.variables()) {
    switch (v.kind) {
      case VarKind::Integer: ++c.integer_vars; break;
      case VarKind::Binary: ++c.binary_vars; break;
      case VarKind::Continuous: ++c.continuous_vars; break;
    }
    if (v.group == "primal.V" || v.group == "primal.Q" || v.group == "primal.r") ++c.constraints;
  }
  for (const auto& r : model.constraints()) {
    if (starts_with(r.group, "primal.") || starts_with(r.group, "dual.") || starts_with(r.group, "aux.")) {
      ++c.constraints;
    }
  }
  return c;
}

std::ostream& operator<<(std::ostream& out, const ComplexityCounts& c) {
  return out << "integer=" << c.integer_vars << " binary=" << c.binary_vars
             << " continuous=" << c.continuous_vars << " constraints=" << c.constraints;
}

}  // namespace ehub::opt
