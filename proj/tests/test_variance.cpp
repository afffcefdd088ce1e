#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "krg/bandwidth.hpp"
#include "krg/errors.hpp"
#include "krg/fit.hpp"
#include "krg/interp.hpp"
#include "krg/rng.hpp"
#include "krg/sample_set.hpp"
#include "krg/synth.hpp"
#include "krg/variance.hpp"
#include "oracles.hpp"

namespace {

// Interpolates a grid field at the sample locations with the default policy.
std::vector<double> field_at_samples(const krg::NdArray<double>& field,
                                     const krg::GridSpec& grid, const krg::SampleSet& s) {
  krg::FitSurface surf;
  surf.grid = grid;
  surf.values = {field};
  surf.column_names = {"f"};
  auto preds = krg::predict(surf, s.x.data(), s.count(), krg::InterpPolicy{});
  return preds.front();
}

}  // namespace

TEST_SUITE("variance") {
  TEST_CASE("squared residuals measure the distance between data and fit") {
    krg::ResponseColumn y;
    y.name = "y";
    y.re = {1.0, 2.0, 3.0};
    auto r = krg::squared_residuals(y, {0.5, 2.0, 5.0});
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(r[1] == 0.0);
    CHECK(r[2] == doctest::Approx(4.0).epsilon(1e-15));

    krg::ResponseColumn z;
    z.name = "z";
    z.is_complex = true;
    z.re = {3.0};
    z.im = {4.0};
    std::vector<double> fit_im{0.0};
    auto rc = krg::squared_residuals(z, {0.0}, &fit_im);
    CHECK(rc[0] == doctest::Approx(25.0).epsilon(1e-15));  // squared modulus

    CHECK_THROWS_AS(krg::squared_residuals(y, {1.0}), krg::InputError);
    CHECK_THROWS_AS(krg::squared_residuals(z, {0.0}), krg::InputError);
    CHECK_THROWS_AS(krg::squared_residuals(y, {1.0, 2.0, 3.0}, &fit_im), krg::InputError);
  }

  TEST_CASE("the variance rescaling factor is exact on matched inputs") {
    // nu = log r makes the average of r*exp(-nu) exactly one.
    std::vector<double> r{0.5, 2.0, 7.25};
    std::vector<double> nu(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) nu[i] = std::log(r[i]);
    CHECK(krg::kappa_hat(r, nu) == doctest::Approx(1.0).epsilon(1e-14));

    // Rescaling the residuals by c^2 while shifting the log fit by log(c^2)
    // leaves the factor unchanged; scaling the residuals alone divides it.
    std::vector<double> rr{0.3, 1.7, 0.9, 4.2};
    std::vector<double> nn{-0.2, 0.5, 0.1, 1.3};
    const double base = krg::kappa_hat(rr, nn);
    const double c2 = 3.7 * 3.7;
    std::vector<double> rs(rr), ns(nn);
    for (auto& v : rs) v *= c2;
    for (auto& v : ns) v += std::log(c2);
    CHECK(krg::kappa_hat(rs, ns) == doctest::Approx(base).epsilon(1e-12));
    std::vector<double> rc(rr);
    for (auto& v : rc) v *= 5.0;
    CHECK(krg::kappa_hat(rc, nn) == doctest::Approx(base / 5.0).epsilon(1e-12));

    CHECK_THROWS_AS(krg::kappa_hat({-1.0, 2.0}, {0.0, 0.0}), krg::InputError);
    CHECK_THROWS_AS(krg::kappa_hat({1.0}, {0.0, 0.0}), krg::InputError);
    CHECK_THROWS_AS(krg::kappa_hat({0.0, 0.0}, {0.0, 0.0}), krg::NumericError);
    // exp(-nu) underflows to zero, leaving no finite scale.
    CHECK_THROWS_AS(krg::kappa_hat({1.0, 1.0}, {1e4, 1e4}), krg::NumericError);
  }

  TEST_CASE("the normal quantile matches a bisection oracle") {
    CHECK(krg::z_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(krg::z_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
    CHECK(krg::z_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-10));

    for (double p : {1e-6, 0.01, 0.025, 0.3, 0.7, 0.9, 0.999, 1.0 - 1e-6}) {
      const double z = krg::z_quantile(p);
      CHECK(std::fabs(z - oracle::zq_bisect(p)) < 1e-9);
      CHECK(z == doctest::Approx(-krg::z_quantile(1.0 - p)).epsilon(1e-11));
      CHECK(0.5 * std::erfc(-z / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-12));
    }

    CHECK_THROWS_AS(krg::z_quantile(0.0), krg::InputError);
    CHECK_THROWS_AS(krg::z_quantile(1.0), krg::InputError);
    CHECK_THROWS_AS(krg::z_quantile(-0.3), krg::InputError);
  }

  TEST_CASE("the log route recovers a known variance profile and stays positive") {
    // Residuals against the exact mean isolate the variance stage: each
    // squared residual is sigma^2(x) times a chi-square(1) draw.
    auto data = krg::synth_generate("cubic-hetero", 2000, 1);
    auto r = krg::squared_residuals(data.samples.responses[0], data.truth_re[0]);

    auto hlist = krg::make_hlist({{true, 0.01, 1.0, 10}});
    krg::VarianceConfig cfg;
    cfg.cv.np = 10;
    cfg.cv.seed = 0;

    auto var = krg::fit_variance_log(data.samples, r, hlist, cfg);
    CHECK(var.route == krg::VarianceRoute::log_residual);
    CHECK(var.negative_count == 0);
    REQUIRE(var.sigma2.size() > 0);
    for (std::int64_t g = 0; g < var.sigma2.size(); ++g) {
      CHECK(var.sigma2[g] > 0.0);
      CHECK(var.sigma2[g] == doctest::Approx(std::exp(var.nu_hat[g]) / var.kappa).epsilon(1e-12));
    }
    REQUIRE(var.report.responses.size() == 1);
    const int sel = var.report.responses[0].selected;
    REQUIRE(sel >= 0);
    CHECK(var.h == var.report.candidates[static_cast<std::size_t>(sel)].h);

    // Gaussian noise puts the rescaling factor near its theoretical limit.
    CHECK(var.kappa == doctest::Approx(oracle::kappa_gauss_limit()).epsilon(0.25));

    // Pointwise accuracy over the central ninety percent of the window.
    auto fitted = field_at_samples(var.sigma2, var.grid, data.samples);
    std::vector<double> rel;
    for (std::int64_t i = 0; i < data.samples.count(); ++i) {
      if (std::fabs(data.samples.loc(i, 0)) > 1.8) continue;
      const auto ui = static_cast<std::size_t>(i);
      rel.push_back(std::fabs(fitted[ui] - data.sigma2[ui]) / data.sigma2[ui]);
    }
    REQUIRE(rel.size() > 1500);
    std::nth_element(rel.begin(), rel.begin() + static_cast<std::ptrdiff_t>(rel.size() / 2),
                     rel.end());
    CHECK(rel[rel.size() / 2] < 0.25);
  }

  TEST_CASE("constant residuals come back as a constant variance either way") {
    const std::int64_t n = 400;
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < n; ++i)
      x[static_cast<std::size_t>(i)] =
          4.0 * krg::rng::uniform01(77, 0, static_cast<std::uint64_t>(i));
    krg::SampleSet s;
    s.dims = 1;
    s.x = x;
    krg::ResponseColumn col;
    col.name = "y";
    col.re = y;
    s.responses = {col};

    const double c = 0.37;
    std::vector<double> r(static_cast<std::size_t>(n), c);
    auto hlist = krg::make_hlist({{true, 0.05, 0.5, 4}});
    krg::VarianceConfig cfg;
    cfg.cv.np = 6;
    cfg.cv.seed = 3;

    auto direct = krg::fit_variance_direct(s, r, hlist, cfg);
    CHECK(direct.route == krg::VarianceRoute::direct);
    CHECK(direct.negative_count == 0);
    for (std::int64_t g = 0; g < direct.sigma2.size(); ++g)
      CHECK(direct.sigma2[g] == doctest::Approx(c).epsilon(1e-8));

    // The log-route offset cancels through the rescaling factor, so the
    // constant comes back exactly rather than shifted by 1/N.
    auto logged = krg::fit_variance_log(s, r, hlist, cfg);
    for (std::int64_t g = 0; g < logged.sigma2.size(); ++g)
      CHECK(logged.sigma2[g] == doctest::Approx(c).epsilon(1e-6));

    // All-zero residuals leave the variance scale unidentifiable.
    std::vector<double> zeros(static_cast<std::size_t>(n), 0.0);
    CHECK_THROWS_AS(krg::fit_variance_log(s, zeros, hlist, cfg), krg::NumericError);

    std::vector<double> negative(static_cast<std::size_t>(n), -1.0);
    CHECK_THROWS_AS(krg::fit_variance_direct(s, negative, hlist, cfg), krg::InputError);
    CHECK_THROWS_AS(krg::fit_variance_log(s, negative, hlist, cfg), krg::InputError);
    std::vector<double> short_r(10, 1.0);
    CHECK_THROWS_AS(krg::fit_variance_direct(s, short_r, hlist, cfg), krg::InputError);
  }

  TEST_CASE("the direct route reports negative excursions instead of hiding them") {
    // A local linear fit undershoots at the foot of a sharp plateau, so
    // smoothing a residual boxcar drives nearby nodes negative. The direct
    // route must keep and count those values.
    const std::int64_t n = 201;
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> r(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n - 1);
      x[static_cast<std::size_t>(i)] = t;
      if (t >= 0.45 && t <= 0.55) r[static_cast<std::size_t>(i)] = 1.0;
    }
    krg::SampleSet s;
    s.dims = 1;
    s.x = x;
    krg::ResponseColumn col;
    col.name = "y";
    col.re.assign(static_cast<std::size_t>(n), 0.0);
    s.responses = {col};

    auto hlist = krg::make_hlist({{true, 0.003, 0.003, 1}});
    krg::VarianceConfig cfg;
    cfg.cv.np = 6;
    cfg.cv.seed = 1;

    auto direct = krg::fit_variance_direct(s, r, hlist, cfg);
    CHECK(direct.negative_count > 0);
    std::int64_t recount = 0;
    for (std::int64_t g = 0; g < direct.sigma2.size(); ++g) {
      CHECK(std::isfinite(direct.sigma2[g]));
      if (direct.sigma2[g] < 0.0) ++recount;
    }
    CHECK(recount == direct.negative_count);

    // The log route on the same residuals cannot go negative.
    auto logged = krg::fit_variance_log(s, r, hlist, cfg);
    CHECK(logged.negative_count == 0);
    for (std::int64_t g = 0; g < logged.sigma2.size(); ++g) CHECK(logged.sigma2[g] > 0.0);
  }

  TEST_CASE("confidence bands widen with confidence and stay centered") {
    auto data = krg::synth_generate("sinc", 300, 6);
    krg::GridOptions gopt;
    gopt.m_override = {64};
    krg::KernelSpec kernel{krg::KernelFamily::gaussian, {0.02}};
    krg::FitConfig fcfg;
    fcfg.order = 1;
    auto grid = krg::engine_grid(data.samples, gopt, kernel.family, kernel.h);
    auto surf = krg::fit_single_bandwidth(data.samples, grid, kernel, fcfg);

    const double s2 = 0.25;
    auto narrow = krg::confidence_interval(surf, 0, s2, 0.10);
    auto mid = krg::confidence_interval(surf, 0, s2, 0.05);
    auto wide = krg::confidence_interval(surf, 0, s2, 0.01);
    CHECK(narrow.z == doctest::Approx(krg::z_quantile(0.95)).epsilon(1e-14));
    CHECK(mid.z == doctest::Approx(krg::z_quantile(0.975)).epsilon(1e-14));
    CHECK(wide.z == doctest::Approx(krg::z_quantile(0.995)).epsilon(1e-14));

    const auto& m = surf.values[0];
    for (std::int64_t g = 0; g < m.size(); ++g) {
      CHECK(wide.lower[g] <= narrow.lower[g]);
      CHECK(narrow.lower[g] <= narrow.upper[g]);
      CHECK(narrow.upper[g] <= wide.upper[g]);
      CHECK(0.5 * (mid.lower[g] + mid.upper[g]) == doctest::Approx(m[g]).epsilon(1e-12));
      CHECK(mid.upper[g] - m[g] == doctest::Approx(mid.z * 0.5).epsilon(1e-12));
    }

    // Zero variance collapses the band onto the mean exactly.
    auto tight = krg::confidence_interval(surf, 0, 0.0, 0.05);
    for (std::int64_t g = 0; g < m.size(); ++g) {
      CHECK(tight.lower[g] == m[g]);
      CHECK(tight.upper[g] == m[g]);
    }

    // Negative field values are rejected unless explicitly clamped.
    krg::NdArray<double> field(m.shape, s2);
    field[0] = -1.0;
    CHECK_THROWS_AS(krg::confidence_interval(surf, 0, field, 0.05), krg::InputError);
    auto clamped = krg::confidence_interval(surf, 0, field, 0.05, true);
    CHECK(clamped.lower[0] == m[0]);
    CHECK(clamped.upper[0] == m[0]);
    CHECK(clamped.upper[1] > m[1]);

    CHECK_THROWS_AS(krg::confidence_interval(surf, 0, s2, 0.0), krg::InputError);
    CHECK_THROWS_AS(krg::confidence_interval(surf, 0, s2, 1.0), krg::InputError);
    CHECK_THROWS_AS(krg::confidence_interval(surf, 5, s2, 0.05), krg::InputError);
    CHECK_THROWS_AS(krg::confidence_interval(surf, 0, -0.1, 0.05), krg::InputError);

    // A variance fit on a different grid is refused.
    krg::VarianceFit var;
    var.grid = surf.grid;
    var.grid.m[0] += 1;
    var.sigma2 = krg::NdArray<double>(m.shape, s2);
    CHECK_THROWS_AS(krg::confidence_interval(surf, 0, var, 0.05, false), krg::InputError);
  }
}
