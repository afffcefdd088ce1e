#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krg/fit.hpp"
#include "krg/grid.hpp"
#include "krg/interp.hpp"
#include "krg/kernels.hpp"
#include "krg/sample_set.hpp"
#include "krg/stats.hpp"

namespace krg {

struct HlistRule {
  bool log = true;  // log-spaced when true, linear otherwise
  double lo = 0.01;
  double hi = 1.0;
  int n = 10;
};

// Candidate bandwidth vectors. Per-axis lists of equal length sweep jointly
// (candidate i takes entry i of every axis); unequal lengths take the
// cartesian product, guarded at 10^4 candidates.
struct BandwidthGrid {
  std::vector<std::vector<double>> per_axis;
  bool cartesian = false;
  std::vector<std::vector<double>> candidates;

  std::vector<double> h_max() const;  // per-axis maximum over candidates
};

BandwidthGrid make_hlist(const std::vector<HlistRule>& rules);
BandwidthGrid hlist_from_values(std::vector<std::vector<double>> per_axis);

// Stochastic trace estimate for one candidate: per-probe Rayleigh ratios
// w'(w - Sw)/(w'w), their mean (an estimate of tr(I - S)/N), spread, and the
// implied degrees of freedom N(1 - ratio).
struct TraceEstimate {
  double ratio = 0.0;
  double ratio_std = 0.0;
  double dof = 0.0;
  std::vector<double> trials;
  bool valid = true;
};

// (SSE/N) / ratio^2 with ratio estimating tr(I - S)/N.
double gcv_score(double sse, double trace_ratio, double n);

struct CvOptions {
  int np = 10;
  std::uint64_t seed = 0;
  double dstd = 0.0;     // 0: plain minimizer; >0: largest h within dstd stds of the minimum
  bool calc_dof = true;  // false: skip the trace stage and keep every candidate surface
  bool keep_all = false;
  InterpPolicy interp{};
};

struct CvCandidate {
  std::vector<double> h;
  TraceEstimate trace;
  bool undersmoothed = false;
};

struct CvResponse {
  std::string name;
  bool is_complex = false;
  std::vector<double> mse;
  std::vector<double> gcv;
  std::vector<std::uint8_t> valid;
  int selected = -1;
  bool failed = false;
  std::string error;
};

struct CvReport {
  std::vector<CvCandidate> candidates;
  std::vector<CvResponse> responses;
  int np = 0;
  std::uint64_t seed = 0;
  double dstd = 0.0;
  std::int64_t n = 0;
};

// Index of the chosen candidate. dstd == 0 picks the minimum (ties toward
// the later, larger-bandwidth candidate); dstd > 0 picks the last candidate
// whose score is within dstd standard deviations of the minimum.
int select_bandwidth(const std::vector<double>& gcv, const std::vector<std::uint8_t>& valid,
                     double dstd);

struct CvResult {
  CvReport report;
  GridSpec grid;
  // Per logical response, the surface refitted at that response's selected
  // bandwidth (complex responses carry their two real columns).
  std::vector<FitSurface> selected;
  std::vector<FitSurface> all;  // per candidate, when keep_all or !calc_dof
  RunStats stats;
};

CvResult cv_fit(const SampleSet& samples, const GridOptions& gopt, KernelFamily family,
                const BandwidthGrid& hlist, const FitConfig& fcfg, const CvOptions& copt);

// Trace table alone (no responses needed beyond the sample locations).
std::vector<TraceEstimate> fmc_trace(const SampleSet& samples, const GridOptions& gopt,
                                     KernelFamily family, const BandwidthGrid& hlist,
                                     const FitConfig& fcfg, const CvOptions& copt,
                                     RunStats* stats = nullptr);

}  // namespace krg
