#pragma once

#include <iosfwd>

#include "ehub/opt/model.hpp"

namespace ehub::opt {

/// Problem dimensions of a planning model built over S days, T periods and
/// Y years.
struct ComplexityDims {
  long S = 0, T = 0, Y = 0;
  long L = 0;     // branches (real and virtual)
  long M = 0;     // energy types
  long Pout = 0;  // output ports (rows of Z)
  long GC = 0;    // converters
  long GS = 0;    // storages
  long NA = 0, NB = 0, NC = 0, ND = 0;  // bits per expansion
};

struct ComplexityCounts {
  long integer_vars = 0;
  long binary_vars = 0;
  long continuous_vars = 0;
  long constraints = 0;
  bool operator==(const ComplexityCounts&) const = default;
};

/// Closed-form sizes of the single-level builder/operator model.
ComplexityCounts count_complexity(const ComplexityDims& d);

/// Tallies a constructed model by the same conventions: rows tagged
/// "primal.*", "dual.*" or "aux.*" count as constraints, as do the sign
/// bounds of variables tagged "primal.V", "primal.Q" and "primal.r".
/// Coupling rows (strong duality, caps, bit definitions) are not counted.
ComplexityCounts tally_model(const Model& model);

std::ostream& operator<<(std::ostream& out, const ComplexityCounts& c);

}  // namespace ehub::opt
