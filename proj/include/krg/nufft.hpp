#pragma once

#include <cstdint>
#include <vector>

#include "krg/grid.hpp"
#include "krg/nd_array.hpp"
#include "krg/sample_set.hpp"
#include "krg/spread.hpp"
#include "krg/stats.hpp"

namespace krg {

// Frequency-domain view of one gridded weight column. `coeffs` holds the
// retained central band, shape padded[] per axis, frequencies in FFT order
// (index p <-> k = p < L/2 ? p : p - L). The oversampled outer band is
// discarded: deconvolving it would amplify pure aliasing, and the retained
// band is the part the spreading accuracy statement covers.
struct SpectrumField {
  NdArray<cplx> coeffs;
  bool deconvolved = true;
};

// Maps sample locations to grid coordinates ((x - lo)/step per dimension)
// and rejects points outside [lo, hi].
std::vector<double> to_grid_coords(const SampleSet& samples, const GridSpec& grid);

// Band-limited nonuniform sums: entry c approximates
//   B_c(k) = sum_i w_i e^{-i k . theta_i},  theta_i = 2 pi gc_i / padded
// over the retained band, computed as deconvolve(FFT(spread)). Column 0 uses
// unit weights. This is the unnormalized workhorse shared by the transform,
// the gridded counts, and the fitting engine (which caches its output across
// bandwidth sweeps).
std::vector<NdArray<cplx>> band_spectra(const double* points_gc, std::int64_t n,
                                        const std::vector<const double*>& columns,
                                        const GridSpec& grid, const SpreadConfig& cfg,
                                        RunStats* stats = nullptr);

// Type-1 transform. F(k) = B(k) / prod(fft_len), so a unit weight at grid
// coordinate 0 gives F(k) = 1/prod(fft_len) for every retained k.
std::vector<SpectrumField> nufft_type1(const double* points_gc, std::int64_t n,
                                       const std::vector<const double*>& columns,
                                       const GridSpec& grid, const SpreadConfig& cfg);
std::vector<SpectrumField> nufft_type1(const std::vector<double>& points_gc,
                                       const std::vector<std::vector<double>>& columns,
                                       const GridSpec& grid, const SpreadConfig& cfg);

// Gridded count and response fields on the padded grid: u = back-transform
// of the unit-weight band divided by prod(padded), so points sitting on grid
// nodes reproduce the node histogram and sum(u) equals N regardless of the
// band truncation. v[c] is the same for response column c.
struct GridCounts {
  NdArray<double> u;
  std::vector<NdArray<double>> v;
};
GridCounts grid_counts(const SampleSet& samples, const GridSpec& grid, const SpreadConfig& cfg);

}  // namespace krg
