#include "krg/variance.hpp"

#include <algorithm>
#include <cmath>

#include "krg/errors.hpp"
#include "krg/interp.hpp"

namespace krg {
namespace {

// Runs the cross-validated sweep on one derived response and returns the
// winning surface plus its report.
struct SweepOut {
  FitSurface surface;
  CvReport report;
  std::vector<double> h;
};

SweepOut variance_sweep(const SampleSet& samples, const std::vector<double>& values,
                        const std::string& name, const BandwidthGrid& hlist,
                        const VarianceConfig& cfg, RunStats* stats) {
  SampleSet derived;
  derived.dims = samples.dims;
  derived.x = samples.x;
  ResponseColumn col;
  col.name = name;
  col.re = values;
  derived.responses.push_back(std::move(col));

  CvOptions cv = cfg.cv;
  cv.calc_dof = true;
  auto res = cv_fit(derived, cfg.grid, cfg.family, hlist, cfg.fit, cv);
  if (stats) stats->merge(res.stats);
  const auto& resp = res.report.responses.front();
  if (resp.failed || resp.selected < 0)
    throw NumericError("variance bandwidth selection failed: " +
                       (resp.error.empty() ? std::string("no valid candidate") : resp.error));
  SweepOut out;
  out.surface = std::move(res.selected.front());
  out.h = res.report.candidates[static_cast<std::size_t>(resp.selected)].h;
  out.report = std::move(res.report);
  return out;
}

}  // namespace

std::vector<double> squared_residuals(const ResponseColumn& y, const std::vector<double>& fit_re,
                                      const std::vector<double>* fit_im) {
  if (y.re.size() != fit_re.size())
    throw InputError("residuals need fitted values for every sample");
  if (y.is_complex != (fit_im != nullptr))
    throw InputError("complex responses need both fitted components");
  if (fit_im && fit_im->size() != y.im.size())
    throw InputError("residuals need fitted values for every sample");

  std::vector<double> r(y.re.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double dr = y.re[i] - fit_re[i];
    r[i] = dr * dr;
    if (fit_im) {
      const double di = y.im[i] - (*fit_im)[i];
      r[i] += di * di;
    }
  }
  return r;
}

double kappa_hat(const std::vector<double>& r_hat, const std::vector<double>& nu_at_samples) {
  if (r_hat.size() != nu_at_samples.size() || r_hat.empty())
    throw InputError("kappa needs matching residual and log-fit vectors");
  bool any = false;
  double acc = 0.0;
  for (std::size_t i = 0; i < r_hat.size(); ++i) {
    if (r_hat[i] < 0.0) throw InputError("squared residuals cannot be negative");
    if (r_hat[i] > 0.0) any = true;
    acc += r_hat[i] * std::exp(-nu_at_samples[i]);
  }
  if (!any) throw NumericError("all residuals are zero; the variance scale is unidentifiable");
  acc /= static_cast<double>(r_hat.size());
  if (!(acc > 0.0) || !std::isfinite(acc))
    throw NumericError("variance rescaling factor is not finite");
  return 1.0 / acc;
}

VarianceFit fit_variance_log(const SampleSet& samples, const std::vector<double>& r_hat,
                             const BandwidthGrid& hlist, const VarianceConfig& cfg,
                             RunStats* stats) {
  if (static_cast<std::int64_t>(r_hat.size()) != samples.count())
    throw InputError("residual vector length does not match the sample count");
  const double offset = 1.0 / static_cast<double>(samples.count());
  std::vector<double> logr(r_hat.size());
  for (std::size_t i = 0; i < r_hat.size(); ++i) {
    if (r_hat[i] < 0.0) throw InputError("squared residuals cannot be negative");
    logr[i] = std::log(r_hat[i] + offset);
  }

  auto sweep = variance_sweep(samples, logr, "log_residual", hlist, cfg, stats);
  const auto& nu = sweep.surface.values.front();

  InterpPolicy policy = cfg.cv.interp;
  auto nu_at = interpolate_field(nu, sweep.surface.grid, samples.x.data(), samples.count(), policy);
  const double kappa = kappa_hat(r_hat, nu_at);

  VarianceFit out;
  out.route = VarianceRoute::log_residual;
  out.grid = sweep.surface.grid;
  out.nu_hat = nu;
  out.kappa = kappa;
  out.h = sweep.h;
  out.report = std::move(sweep.report);
  out.sigma2 = NdArray<double>(nu.shape);
  for (std::int64_t g = 0; g < nu.size(); ++g) out.sigma2[g] = std::exp(nu[g]) / kappa;
  return out;
}

VarianceFit fit_variance_direct(const SampleSet& samples, const std::vector<double>& r_hat,
                                const BandwidthGrid& hlist, const VarianceConfig& cfg,
                                RunStats* stats) {
  if (static_cast<std::int64_t>(r_hat.size()) != samples.count())
    throw InputError("residual vector length does not match the sample count");
  for (double r : r_hat)
    if (r < 0.0) throw InputError("squared residuals cannot be negative");

  auto sweep = variance_sweep(samples, r_hat, "squared_residual", hlist, cfg, stats);

  VarianceFit out;
  out.route = VarianceRoute::direct;
  out.grid = sweep.surface.grid;
  out.h = sweep.h;
  out.report = std::move(sweep.report);
  out.sigma2 = std::move(sweep.surface.values.front());
  for (std::int64_t g = 0; g < out.sigma2.size(); ++g)
    if (out.sigma2[g] < 0.0) ++out.negative_count;
  return out;
}

double z_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("quantile probability must lie in (0,1)");
  // Acklam's rational approximation, then one Halley step on the erfc-based
  // CDF to push the absolute error to machine level.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

IntervalBand confidence_interval(const FitSurface& mean_fit, int column,
                                 const NdArray<double>& sigma2, double alpha,
                                 bool clamp_negative) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0,1)");
  if (column < 0 || column >= static_cast<int>(mean_fit.values.size()))
    throw InputError("no such column in the fitted surface");
  const auto& m = mean_fit.values[static_cast<std::size_t>(column)];
  if (sigma2.shape != m.shape)
    throw InputError("variance field does not match the fitted grid");

  IntervalBand band;
  band.grid = mean_fit.grid;
  band.alpha = alpha;
  band.z = z_quantile(1.0 - alpha / 2.0);
  band.lower = NdArray<double>(m.shape);
  band.upper = NdArray<double>(m.shape);
  for (std::int64_t g = 0; g < m.size(); ++g) {
    double v = sigma2[g];
    if (v < 0.0) {
      if (!clamp_negative)
        throw InputError("variance field has negative values; pass the clamp flag to truncate");
      v = 0.0;
    }
    const double half = band.z * std::sqrt(v);
    band.lower[g] = m[g] - half;
    band.upper[g] = m[g] + half;
  }
  return band;
}

IntervalBand confidence_interval(const FitSurface& mean_fit, int column, double sigma2,
                                 double alpha) {
  if (sigma2 < 0.0) throw InputError("scalar variance must be nonnegative");
  if (column < 0 || column >= static_cast<int>(mean_fit.values.size()))
    throw InputError("no such column in the fitted surface");
  NdArray<double> field(mean_fit.values[static_cast<std::size_t>(column)].shape, sigma2);
  return confidence_interval(mean_fit, column, field, alpha, false);
}

IntervalBand confidence_interval(const FitSurface& mean_fit, int column, const VarianceFit& var,
                                 double alpha, bool clamp_negative) {
  if (var.grid.dims != mean_fit.grid.dims || var.grid.m != mean_fit.grid.m)
    throw InputError("variance fit lives on a different grid than the mean fit");
  return confidence_interval(mean_fit, column, var.sigma2, alpha, clamp_negative);
}

}  // namespace krg
