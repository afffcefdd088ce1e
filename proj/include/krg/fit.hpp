#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krg/basis.hpp"
#include "krg/grid.hpp"
#include "krg/interp.hpp"
#include "krg/kernels.hpp"
#include "krg/moments.hpp"
#include "krg/nd_array.hpp"
#include "krg/sample_set.hpp"
#include "krg/spread.hpp"
#include "krg/stats.hpp"

namespace krg {

struct FitConfig {
  int order = 0;               // local polynomial total degree (0..2 from the CLI)
  int digits = 6;              // gridding accuracy
  bool deconvolve = true;
  double density_floor = 1e-8;  // mask nodes with s0 < floor * N / grid_points
  double pivot_rtol = 1e-10;    // relative pivot threshold for the local solve
  int chunk = 64;               // response columns convolved/solved per batch
};

// Logical response layout: complex columns travel as two adjacent real
// columns through the pipeline and are recombined on output.
struct ColumnLayout {
  struct Entry {
    std::string name;
    bool is_complex = false;
    int re_col = 0;
    int im_col = -1;
  };
  std::vector<Entry> entries;
  int real_count = 0;

  static ColumnLayout from(const SampleSet& samples);
};

// Bandwidth-independent gridded representation of a sample set: grid
// coordinates plus cached band spectra for the unit weights and every real
// column. Built once, reused across a bandwidth sweep; this is the single
// gridding pass the structural counters track.
struct GriddedSamples {
  GridSpec grid;
  SpreadConfig spread;
  std::vector<double> gc;
  NdArray<cplx> density_hat;
  std::vector<NdArray<cplx>> column_hat;
  std::vector<std::string> column_names;
  std::int64_t n = 0;
};

GriddedSamples grid_samples(const SampleSet& samples, const GridSpec& grid, const FitConfig& cfg,
                            RunStats* stats = nullptr);

// Same, but with caller-provided extra real columns appended (the stochastic
// trace probes ride along so everything lands in one gridding pass).
GriddedSamples grid_samples_with_extras(const SampleSet& samples, const GridSpec& grid,
                                        const FitConfig& cfg,
                                        const std::vector<std::vector<double>>& extras,
                                        RunStats* stats = nullptr);

// Fitted surfaces on the regression grid, one real field per column.
struct FitSurface {
  GridSpec grid;
  KernelSpec kernel;
  int order = 0;
  std::vector<std::string> column_names;
  std::vector<NdArray<double>> values;   // shape grid.m per column
  NdArray<std::uint8_t> solved;          // 1 solved, 0 masked (filled by neighbor averaging)
  std::int64_t masked_count = 0;
  std::int64_t rank_fallback_count = 0;  // order >= 1 nodes that fell back to the ratio
  bool undersmoothed = false;

  int column(const std::string& name) const;
};

// Solves the local systems given precomputed moment fields. s_fields covers
// |gamma| <= 2*order in graded order; t_fields holds the first
// C(d+order, d) moments per column. Masked nodes are filled before return.
FitSurface local_solve(const std::vector<NdArray<double>>& s_fields,
                       const std::vector<std::vector<NdArray<double>>>& t_fields,
                       const GridSpec& grid, const KernelSpec& kernel, const FitConfig& cfg,
                       double n_samples, RunStats* stats = nullptr);

// Moment build + convolution + local solve against cached spectra.
FitSurface fit_gridded(const GriddedSamples& gs, const KernelSpec& kernel, const FitConfig& cfg,
                       RunStats* stats = nullptr);

// One-shot convenience: grid once, fit once.
FitSurface fit_single_bandwidth(const SampleSet& samples, const GridSpec& grid,
                                const KernelSpec& kernel, const FitConfig& cfg,
                                RunStats* stats = nullptr);

// Grid construction for the engine: applies the configured layout and then
// extends the pad so the moment convolution cannot wrap kernel mass across
// the data window for any candidate bandwidth. Capped at one data-window
// width, beyond which the circular convolution is already exactly linear.
GridSpec engine_grid(const SampleSet& samples, const GridOptions& base, KernelFamily family,
                     const std::vector<double>& h_max);

// Predictions at arbitrary locations for every column.
std::vector<std::vector<double>> predict(const FitSurface& surface, const double* queries,
                                         std::int64_t p, const InterpPolicy& policy);

}  // namespace krg
