#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "krg/grid.hpp"
#include "krg/interp.hpp"
#include "krg/nd_array.hpp"
#include "krg/rng.hpp"
#include "krg/sample_set.hpp"

namespace {

krg::GridSpec grid1d(double lo, double hi, std::int64_t m) {
  krg::SampleSet s;
  s.dims = 1;
  s.x = {lo, hi};
  krg::GridOptions opt;
  opt.m_override = {m};
  return krg::make_grid(s, opt);
}

krg::GridSpec grid2d(double lo0, double hi0, std::int64_t m0, double lo1, double hi1,
                     std::int64_t m1) {
  krg::SampleSet s;
  s.dims = 2;
  s.x = {lo0, lo1, hi0, hi1};
  krg::GridOptions opt;
  opt.m_override = {m0, m1};
  return krg::make_grid(s, opt);
}

krg::NdArray<double> fill1d(const krg::GridSpec& g, double (*f)(double)) {
  krg::NdArray<double> a(g.m);
  for (std::int64_t i = 0; i < g.m[0]; ++i) a[i] = f(g.node(0, i));
  return a;
}

double cubic_poly(double x) { return 0.5 * x * x * x - 2.0 * x * x + x - 3.0; }
double quadratic(double x) { return 1.5 * x * x - 0.5 * x + 2.0; }

}  // namespace

TEST_SUITE("interp") {
  TEST_CASE("queries at the nodes reproduce stored values exactly") {
    auto g = grid1d(-2.0, 7.0, 25);
    krg::NdArray<double> field(g.m);
    for (std::int64_t i = 0; i < g.m[0]; ++i)
      field[i] = krg::rng::normal(31, 0, static_cast<std::uint64_t>(i));
    std::vector<double> q(static_cast<std::size_t>(g.m[0]));
    for (std::int64_t i = 0; i < g.m[0]; ++i) q[static_cast<std::size_t>(i)] = g.node(0, i);
    for (auto method : {krg::InterpMethod::multilinear, krg::InterpMethod::cubic}) {
      krg::InterpPolicy pol;
      pol.interior = method;
      auto vals = krg::interpolate_field(field, g, q.data(), g.m[0], pol);
      for (std::int64_t i = 0; i < g.m[0]; ++i) CHECK(vals[static_cast<std::size_t>(i)] == field[i]);
    }
  }

  TEST_CASE("cubic interior is exact on cubic polynomials") {
    auto g = grid1d(0.0, 10.0, 21);
    auto field = fill1d(g, cubic_poly);
    krg::InterpPolicy pol;
    const std::int64_t nq = 500;
    std::vector<double> q(nq);
    for (std::int64_t i = 0; i < nq; ++i)
      q[static_cast<std::size_t>(i)] =
          10.0 * krg::rng::uniform01(32, 0, static_cast<std::uint64_t>(i));
    auto vals = krg::interpolate_field(field, g, q.data(), nq, pol);
    for (std::int64_t i = 0; i < nq; ++i)
      CHECK(vals[static_cast<std::size_t>(i)] ==
            doctest::Approx(cubic_poly(q[static_cast<std::size_t>(i)])).epsilon(1e-12));
  }

  TEST_CASE("multilinear interior is exact on affine fields") {
    auto g = grid2d(0.0, 4.0, 9, -1.0, 1.0, 11);
    krg::NdArray<double> field(g.m);
    for (std::int64_t i = 0; i < g.m[0]; ++i)
      for (std::int64_t j = 0; j < g.m[1]; ++j)
        field[i * g.m[1] + j] = 2.0 * g.node(0, i) - 0.5 * g.node(1, j) + 1.0;
    krg::InterpPolicy pol;
    pol.interior = krg::InterpMethod::multilinear;
    const std::int64_t nq = 200;
    std::vector<double> q(static_cast<std::size_t>(2 * nq));
    for (std::int64_t i = 0; i < nq; ++i) {
      q[static_cast<std::size_t>(2 * i)] = 4.0 * krg::rng::uniform01(33, 0, static_cast<std::uint64_t>(i));
      q[static_cast<std::size_t>(2 * i + 1)] =
          2.0 * krg::rng::uniform01(33, 1, static_cast<std::uint64_t>(i)) - 1.0;
    }
    auto vals = krg::interpolate_field(field, g, q.data(), nq, pol);
    for (std::int64_t i = 0; i < nq; ++i) {
      const double expect = 2.0 * q[static_cast<std::size_t>(2 * i)] -
                            0.5 * q[static_cast<std::size_t>(2 * i + 1)] + 1.0;
      CHECK(vals[static_cast<std::size_t>(i)] == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  TEST_CASE("separable 2-d cubic reproduces products of cubics") {
    auto g = grid2d(0.0, 3.0, 13, 0.0, 2.0, 9);
    krg::NdArray<double> field(g.m);
    for (std::int64_t i = 0; i < g.m[0]; ++i)
      for (std::int64_t j = 0; j < g.m[1]; ++j)
        field[i * g.m[1] + j] = cubic_poly(g.node(0, i)) * quadratic(g.node(1, j));
    krg::InterpPolicy pol;
    const std::int64_t nq = 300;
    std::vector<double> q(static_cast<std::size_t>(2 * nq));
    for (std::int64_t i = 0; i < nq; ++i) {
      q[static_cast<std::size_t>(2 * i)] = 3.0 * krg::rng::uniform01(34, 0, static_cast<std::uint64_t>(i));
      q[static_cast<std::size_t>(2 * i + 1)] = 2.0 * krg::rng::uniform01(34, 1, static_cast<std::uint64_t>(i));
    }
    auto vals = krg::interpolate_field(field, g, q.data(), nq, pol);
    for (std::int64_t i = 0; i < nq; ++i) {
      const double expect = cubic_poly(q[static_cast<std::size_t>(2 * i)]) *
                            quadratic(q[static_cast<std::size_t>(2 * i + 1)]);
      CHECK(vals[static_cast<std::size_t>(i)] == doctest::Approx(expect).epsilon(1e-11));
    }
  }

  TEST_CASE("linear extrapolation is collinear and continuous at the hull") {
    auto g = grid1d(0.0, 5.0, 11);
    auto field = fill1d(g, quadratic);
    krg::InterpPolicy pol;  // cubic interior, linear extrapolation
    std::vector<double> q = {5.0, 5.0 + 1e-7, 5.5, 6.0, 6.5, -1e-7, -0.5, -1.0};
    auto v = krg::interpolate_field(field, g, q.data(), static_cast<std::int64_t>(q.size()), pol);
    // continuity across the hull edge
    CHECK(v[1] == doctest::Approx(v[0]).epsilon(1e-5));
    CHECK(v[5] == doctest::Approx(field[0]).epsilon(1e-5));
    // three outside points on each side are collinear
    const double sr = (v[3] - v[2]) / 0.5;
    const double sr2 = (v[4] - v[3]) / 0.5;
    CHECK(sr == doctest::Approx(sr2).epsilon(1e-9));
    const double sl = (v[7] - v[6]) / -0.5;
    CHECK(sl == doctest::Approx((v[6] - field[0]) / -0.5).epsilon(1e-6));
    // the continued slope matches the boundary derivative of the quadratic
    CHECK(sr == doctest::Approx(1.5 * 2.0 * 5.0 - 0.5).epsilon(1e-9));
  }

  TEST_CASE("nearest and constant extrapolation") {
    auto g = grid1d(0.0, 4.0, 5);
    auto field = fill1d(g, quadratic);
    krg::InterpPolicy pol;
    pol.exterior = krg::ExtrapMethod::nearest;
    std::vector<double> q = {-3.0, 9.0};
    auto v = krg::interpolate_field(field, g, q.data(), 2, pol);
    CHECK(v[0] == field[0]);
    CHECK(v[1] == field[4]);

    pol.exterior = krg::ExtrapMethod::constant;
    pol.constant_value = -7.5;
    v = krg::interpolate_field(field, g, q.data(), 2, pol);
    CHECK(v[0] == -7.5);
    CHECK(v[1] == -7.5);
  }

  TEST_CASE("fill_masked averages inward from the solved region") {
    auto g = grid1d(0.0, 9.0, 10);
    krg::NdArray<double> field(g.m);
    krg::NdArray<std::uint8_t> solved(g.m);
    for (std::int64_t i = 0; i < 10; ++i) {
      field[i] = static_cast<double>(i);
      solved[i] = 1;
    }
    // one interior masked node takes the mean of its two neighbors
    field[4] = 999.0;
    solved[4] = 0;
    krg::fill_masked(field, solved);
    CHECK(field[4] == doctest::Approx(0.5 * (field[3] + field[5])));
    CHECK(field[3] == 3.0);

    // a masked run grows inward one ring at a time
    krg::NdArray<double> f2(g.m);
    krg::NdArray<std::uint8_t> s2(g.m);
    for (std::int64_t i = 0; i < 10; ++i) {
      f2[i] = 0.0;
      s2[i] = i >= 7 ? 1 : 0;
    }
    f2[7] = 2.0;
    f2[8] = 4.0;
    f2[9] = 6.0;
    krg::fill_masked(f2, s2);
    for (std::int64_t i = 0; i < 7; ++i) CHECK(f2[i] == doctest::Approx(2.0));
  }

  TEST_CASE("fill_masked in 2-d uses available axis neighbors") {
    auto g = grid2d(0.0, 2.0, 3, 0.0, 2.0, 3);
    krg::NdArray<double> field(g.m);
    krg::NdArray<std::uint8_t> solved(g.m);
    // center masked, everything else solved with value = row + col
    for (std::int64_t i = 0; i < 3; ++i)
      for (std::int64_t j = 0; j < 3; ++j) {
        field[i * 3 + j] = static_cast<double>(i + j);
        solved[i * 3 + j] = 1;
      }
    field[4] = -100.0;
    solved[4] = 0;
    krg::fill_masked(field, solved);
    // four axis neighbors: (0,1),(2,1),(1,0),(1,2) -> values 1,3,1,3
    CHECK(field[4] == doctest::Approx(2.0));
  }

  TEST_CASE("method names parse and print") {
    CHECK(krg::interp_method_from_name("spline") == krg::InterpMethod::cubic);
    CHECK(krg::interp_method_from_name("cubic") == krg::InterpMethod::cubic);
    CHECK(krg::interp_method_from_name("linear") == krg::InterpMethod::multilinear);
    CHECK(krg::extrap_method_from_name("nearest") == krg::ExtrapMethod::nearest);
    CHECK(krg::interp_method_name(krg::InterpMethod::cubic) == "cubic");
    CHECK(krg::extrap_method_name(krg::ExtrapMethod::linear) == "linear");
    CHECK_THROWS(krg::interp_method_from_name("bicubic"));
    CHECK_THROWS(krg::extrap_method_from_name("mirror"));
  }
}
