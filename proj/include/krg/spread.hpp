#pragma once

#include <cstdint>
#include <vector>

#include "krg/grid.hpp"
#include "krg/nd_array.hpp"

namespace krg {

// Gaussian spreading parameters. `digits` is the requested accuracy and also
// the stencil half-width in fine-grid nodes (so 12 points per side yields
// roughly 12 digits). `spread_var[j]` is the spreading Gaussian's variance
// parameter in squared angle units: with rho = fft_len/padded,
//
//   spread_var[j] = pi * half_width / (padded[j]^2 * rho * (rho - 0.5))
//
// which balances stencil truncation against aliasing over the retained band
// of padded[j] modes.
struct SpreadConfig {
  int digits = 6;
  int half_width = 6;
  bool deconvolve = true;
  std::vector<double> spread_var;

  static SpreadConfig for_grid(const GridSpec& grid, int digits, bool deconvolve = true);
};

// One gridded weight field on the oversampled fine grid (shape fft_len).
// Stencils are mass-normalized, so sum(values) equals total_mass up to the
// truncated Gaussian tails (relative 10^-digits).
struct SpreadField {
  NdArray<double> values;
  double total_mass = 0.0;
};

// Spreads N points onto the fine grid. `points_gc` holds grid coordinates
// (node units: (x - lo)/step, in [0, m-1] per dimension, row-major N x d).
// Returns one field per weight column, preceded by the unit-weight field at
// index 0. Stencils wrap modulo fft_len, which is the periodic geometry the
// transform assumes; wrapped tails land in the pad region.
std::vector<SpreadField> spread_points(const double* points_gc, std::int64_t n,
                                       const std::vector<const double*>& columns,
                                       const GridSpec& grid, const SpreadConfig& cfg);

// Convenience overload for tests and small inputs.
std::vector<SpreadField> spread_points(const std::vector<double>& points_gc,
                                       const std::vector<std::vector<double>>& columns,
                                       const GridSpec& grid, const SpreadConfig& cfg);

}  // namespace krg
