#pragma once

#include <cstdint>
#include <vector>

#include "krg/bandwidth.hpp"
#include "krg/fit.hpp"
#include "krg/grid.hpp"
#include "krg/nd_array.hpp"
#include "krg/sample_set.hpp"

namespace krg {

enum class VarianceRoute { log_residual, direct };

// Conditional-variance estimate on the regression grid. The log route fits
// nu = log(r + 1/N), rescales by kappa, and is positive by construction; the
// direct route smooths the squared residuals themselves and may go negative
// (each such node is counted, values kept).
struct VarianceFit {
  VarianceRoute route = VarianceRoute::log_residual;
  GridSpec grid;
  NdArray<double> nu_hat;  // log route only
  double kappa = 0.0;      // log route only
  NdArray<double> sigma2;
  std::vector<double> h;
  std::int64_t negative_count = 0;
  CvReport report;
};

struct IntervalBand {
  GridSpec grid;
  NdArray<double> lower;
  NdArray<double> upper;
  double alpha = 0.05;
  double z = 0.0;
};

struct VarianceConfig {
  GridOptions grid;
  KernelFamily family = KernelFamily::gaussian;
  FitConfig fit;  // order 1 (local linear) is the conventional choice here
  CvOptions cv;

  VarianceConfig() { fit.order = 1; }
};

// r_i = (y_i - mfit_i)^2; complex responses use the squared modulus, so
// fit_im must be given exactly when the column is complex.
std::vector<double> squared_residuals(const ResponseColumn& y, const std::vector<double>& fit_re,
                                      const std::vector<double>* fit_im = nullptr);

// kappa = [ (1/N) sum_i r_i exp(-nu_i) ]^-1
double kappa_hat(const std::vector<double>& r_hat, const std::vector<double>& nu_at_samples);

VarianceFit fit_variance_log(const SampleSet& samples, const std::vector<double>& r_hat,
                             const BandwidthGrid& hlist, const VarianceConfig& cfg,
                             RunStats* stats = nullptr);

VarianceFit fit_variance_direct(const SampleSet& samples, const std::vector<double>& r_hat,
                                const BandwidthGrid& hlist, const VarianceConfig& cfg,
                                RunStats* stats = nullptr);

// Inverse standard-normal CDF, absolute error well under 1e-8.
double z_quantile(double p);

// Pointwise bands m +- z_{1-alpha/2} * sqrt(sigma2) over the grid. Negative
// variance values are rejected unless clamp_negative truncates them at zero.
IntervalBand confidence_interval(const FitSurface& mean_fit, int column,
                                 const NdArray<double>& sigma2, double alpha,
                                 bool clamp_negative = false);
IntervalBand confidence_interval(const FitSurface& mean_fit, int column, double sigma2,
                                 double alpha);
IntervalBand confidence_interval(const FitSurface& mean_fit, int column, const VarianceFit& var,
                                 double alpha, bool clamp_negative = false);

}  // namespace krg
