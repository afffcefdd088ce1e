#include "krg/synth.hpp"

#include <cmath>

#include "krg/errors.hpp"
#include "krg/rng.hpp"

namespace krg {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Streams within a dataset seed: 0 for locations, 1 + c for response c noise.
constexpr std::uint64_t kLocStream = 0;

double sample_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::vector<double> uniform_locations(std::int64_t n, std::uint64_t seed, std::uint64_t axis,
                                      double lo, double hi) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    x[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * rng::uniform01(seed, kLocStream, static_cast<std::uint64_t>(2 * i) + axis);
  return x;
}

void add_noise(std::vector<double>& y, double scale, std::uint64_t seed, std::uint64_t stream) {
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] += scale * rng::normal(seed, stream, static_cast<std::uint64_t>(i));
}

}  // namespace

double sinc_fn(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

double bessel1_fn(double x) { return std::cyl_bessel_j(1.0, x); }

double cubic_fn(double x) { return x * x * x; }

double cubic_sigma_shape(double x) { return 1.0 + 4.0 * std::exp(-x * x); }

double peaks_fn1(double x, double y) {
  return 3.0 * (1.0 - x) * (1.0 - x) * std::exp(-x * x - (y + 1.0) * (y + 1.0)) -
         10.0 * (x / 5.0 - x * x * x - std::pow(y, 5.0)) * std::exp(-x * x - y * y) -
         (1.0 / 3.0) * std::exp(-(x + 1.0) * (x + 1.0) - y * y);
}

double peaks_fn2(double x, double y) {
  return (30.0 + (5.0 * x + 5.0) * std::sin(5.0 * x + 5.0)) *
         (4.0 + std::exp(-(2.5 * y + 2.5) * (2.5 * y + 2.5)));
}

double peaks_fn3(double x, double y) {
  return (std::cos(x) + std::cos(y)) * std::exp(-std::abs(x)) + 1.0;
}

SynthData synth_generate(const std::string& name, std::int64_t n, std::uint64_t seed) {
  SynthData out;
  out.name = name;

  if (name == "sinc") {
    // Equispaced x over [-100, 100]; the conventional 0.2 step gives 1001.
    const std::int64_t count = n > 0 ? n : 1001;
    if (count < 2) throw InputError("sinc needs at least two points");
    out.samples.dims = 1;
    out.samples.x.resize(static_cast<std::size_t>(count));
    std::vector<double> y(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
      const double xi = -100.0 + 200.0 * static_cast<double>(i) / static_cast<double>(count - 1);
      out.samples.x[static_cast<std::size_t>(i)] = xi;
      y[static_cast<std::size_t>(i)] = sinc_fn(xi);
    }
    out.truth_re.push_back(y);
    add_noise(y, 0.1 * sample_std(y), seed, 1);
    ResponseColumn col;
    col.name = "y";
    col.re = std::move(y);
    out.samples.responses.push_back(std::move(col));
    return out;
  }

  if (name == "bessel1") {
    const std::int64_t count = n > 0 ? n : 200;
    out.samples.dims = 1;
    out.samples.x = uniform_locations(count, seed, 0, 0.0, 20.0);
    std::vector<double> y(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
      y[static_cast<std::size_t>(i)] = bessel1_fn(out.samples.x[static_cast<std::size_t>(i)]);
    out.truth_re.push_back(y);
    add_noise(y, 0.1 * sample_std(y), seed, 1);
    ResponseColumn col;
    col.name = "y";
    col.re = std::move(y);
    out.samples.responses.push_back(std::move(col));
    return out;
  }

  if (name == "cubic-hetero") {
    const std::int64_t count = n > 0 ? n : 10000;
    out.samples.dims = 1;
    out.samples.x = uniform_locations(count, seed, 0, -2.0, 2.0);
    std::vector<double> y(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
      y[static_cast<std::size_t>(i)] = cubic_fn(out.samples.x[static_cast<std::size_t>(i)]);
    out.truth_re.push_back(y);
    const double sd = sample_std(y);
    const double var_y = sd * sd;
    out.sigma2.resize(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
      const std::size_t k = static_cast<std::size_t>(i);
      out.sigma2[k] = cubic_sigma_shape(out.samples.x[k]) * 0.5 * var_y;
      y[k] += std::sqrt(out.sigma2[k]) * rng::normal(seed, 1, static_cast<std::uint64_t>(i));
    }
    ResponseColumn col;
    col.name = "y";
    col.re = std::move(y);
    out.samples.responses.push_back(std::move(col));
    return out;
  }

  if (name == "peaks3") {
    const std::int64_t count = n > 0 ? n : 8100;
    out.samples.dims = 2;
    out.samples.x.resize(static_cast<std::size_t>(2 * count));
    for (std::int64_t i = 0; i < count; ++i) {
      out.samples.x[static_cast<std::size_t>(2 * i)] =
          -3.0 + 6.0 * rng::uniform01(seed, kLocStream, static_cast<std::uint64_t>(2 * i));
      out.samples.x[static_cast<std::size_t>(2 * i + 1)] =
          -3.0 + 6.0 * rng::uniform01(seed, kLocStream, static_cast<std::uint64_t>(2 * i) + 1);
    }
    double (*funs[3])(double, double) = {peaks_fn1, peaks_fn2, peaks_fn3};
    const char* names[3] = {"y1", "y2", "y3"};
    for (int c = 0; c < 3; ++c) {
      std::vector<double> y(static_cast<std::size_t>(count));
      for (std::int64_t i = 0; i < count; ++i)
        y[static_cast<std::size_t>(i)] = funs[c](out.samples.x[static_cast<std::size_t>(2 * i)],
                                                 out.samples.x[static_cast<std::size_t>(2 * i + 1)]);
      out.truth_re.push_back(y);
      add_noise(y, 0.2 * sample_std(y), seed, static_cast<std::uint64_t>(1 + c));
      ResponseColumn col;
      col.name = names[c];
      col.re = std::move(y);
      out.samples.responses.push_back(std::move(col));
    }
    return out;
  }

  throw InputError("unknown synthetic dataset '" + name +
                   "' (expected sinc, bessel1, cubic-hetero, or peaks3)");
}

}  // namespace krg
