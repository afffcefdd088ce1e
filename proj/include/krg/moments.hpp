#pragma once

#include <vector>

#include "krg/basis.hpp"
#include "krg/grid.hpp"
#include "krg/kernels.hpp"
#include "krg/nd_array.hpp"
#include "krg/stats.hpp"

namespace krg {

// Kernel moment grids: for every multi-index gamma with |gamma| <= max
// degree, the field K_h(delta) * delta^gamma sampled at node offsets on the
// padded grid, in circularly shifted layout (offset o at index o >= 0 ? o :
// o + padded), with offsets measured on the unit-std coordinate scale.
struct MomentGrids {
  KernelSpec kernel;
  MultiIndexSet set;
  std::vector<NdArray<double>> fields;
  std::vector<NdArray<cplx>> hat;  // forward transforms, filled by prepare_spectra
  bool undersmoothed = false;      // some sqrt(h_j) below one normalized grid step
};

MomentGrids kernel_moment_grids(const GridSpec& grid, const KernelSpec& kernel, int max_degree,
                                RunStats* stats = nullptr);

void prepare_spectra(MomentGrids& grids);

// Circular convolution of the first `count` moment grids against a cached
// band spectrum (unnormalized nonuniform sums), cropped to the unpadded
// grid. Entry g approximates sum_i K_h(g - x_i) (g - x_i)^gamma w_i.
// count <= 0 means all fields.
std::vector<NdArray<double>> convolve_moments(const MomentGrids& grids, const NdArray<cplx>& spectrum,
                                              const GridSpec& grid, int count = -1,
                                              RunStats* stats = nullptr);

}  // namespace krg
