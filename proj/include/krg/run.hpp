#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "krg/bandwidth.hpp"
#include "krg/fit.hpp"
#include "krg/grid.hpp"
#include "krg/interp.hpp"
#include "krg/kernels.hpp"
#include "krg/sample_set.hpp"

namespace krg {

// Resolved run parameters. Field names and defaults follow the conventional
// smoother-option table; everything here lands in the manifest so a run can
// be reproduced from it.
struct RunConfig {
  std::string y_type = "mean";  // mean | variance
  std::string kernel_type = "gaussian";
  int order = 0;
  double ratio = 1.0;                    // grid nodes per ceil(N^(1/d))
  std::vector<std::int64_t> m_override;  // explicit per-dim node counts
  bool flag_power2 = true;               // pad to a power of two
  int accuracy = 6;                      // gridding digits
  bool nufft_deconv = true;
  double dstd = 0.0;
  bool calc_dof = true;
  int np = 10;
  std::string interp = "spline";
  std::string extrap = "linear";
  bool compact = true;  // drop non-prediction state from the surface file
  std::uint64_t seed = 0;
  std::string hlist = "log:0.01:1:10";
  int chunk = 64;
  int oversample = 2;

  KernelFamily family() const;
  FitConfig fit_config() const;
  GridOptions grid_options() const;
  CvOptions cv_options() const;
  InterpPolicy interp_policy() const;
  BandwidthGrid bandwidth_grid(int dims) const;
};

// "rule:lo:hi:n" per dimension, comma separated; rule is log or linear.
std::vector<HlistRule> parse_hlist(const std::string& spec);

nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

struct FitArtifacts {
  std::string surface_path;
  std::string report_path;
  std::string manifest_path;
};

// Full cross-validated run: surface file, per-candidate report, manifest.
// write_surface=false keeps the report/manifest only (the gcv-curve mode).
FitArtifacts run_fit(const RunConfig& cfg, const SampleSet& samples,
                     const std::string& out_prefix, bool write_surface = true);

struct BenchRow {
  std::int64_t n = 0;
  std::int64_t m = 0;
  double spread_s = 0.0;
  double fft_s = 0.0;
  double solve_s = 0.0;
  double interp_s = 0.0;
  double total_s = 0.0;
  double oracle_err = std::numeric_limits<double>::quiet_NaN();
};

// Fixed-bandwidth scaling harness: per size, median stage times over `reps`
// runs, plus a direct-sum oracle comparison for sizes up to oracle_cap.
std::vector<BenchRow> run_bench(const std::vector<std::int64_t>& sizes, const RunConfig& cfg,
                                double h, int reps, std::int64_t oracle_cap,
                                double mem_budget_bytes);

void write_bench_table(const std::string& path, const std::vector<BenchRow>& rows);

}  // namespace krg
