#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "krg/grid.hpp"
#include "krg/nd_array.hpp"

namespace krg {

enum class InterpMethod { multilinear, cubic };
enum class ExtrapMethod { linear, nearest, constant };

// Separable tensor-grid interpolation policy. The cubic interior uses the
// four-point interpolating cubic on uniform stencils (node-exact, exact on
// cubics along each axis). Linear extrapolation continues the interior
// scheme's boundary value and derivative, so value and first difference are
// continuous across the hull.
struct InterpPolicy {
  InterpMethod interior = InterpMethod::cubic;
  ExtrapMethod exterior = ExtrapMethod::linear;
  double constant_value = std::numeric_limits<double>::quiet_NaN();
};

InterpMethod interp_method_from_name(const std::string& name);
ExtrapMethod extrap_method_from_name(const std::string& name);
std::string interp_method_name(InterpMethod m);
std::string extrap_method_name(ExtrapMethod m);

// Evaluates one gridded field (shape grid.m) at P query points given in
// original units (row-major P x d).
std::vector<double> interpolate_field(const NdArray<double>& field, const GridSpec& grid,
                                      const double* queries, std::int64_t p,
                                      const InterpPolicy& policy);

// Replaces values at masked nodes (solved == 0) by iterative averaging of
// available axis neighbors, growing inward from the solved region. Leaves
// solved nodes untouched.
void fill_masked(NdArray<double>& field, const NdArray<std::uint8_t>& solved);

}  // namespace krg
