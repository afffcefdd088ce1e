#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krg/sample_set.hpp"

namespace krg {

// A generated dataset together with its noiseless ground truth (per response,
// evaluated at the sample locations) and, where the generator defines one,
// the true conditional variance per sample.
struct SynthData {
  std::string name;
  SampleSet samples;
  std::vector<std::vector<double>> truth_re;
  std::vector<std::vector<double>> truth_im;
  std::vector<double> sigma2;
};

// Recognized names: sinc, bessel1, cubic-hetero, peaks3. n <= 0 takes the
// generator's conventional size (1001, 200, 10000, 8100).
SynthData synth_generate(const std::string& name, std::int64_t n, std::uint64_t seed);

// The underlying test functions, exposed for oracles and error measurement.
double sinc_fn(double x);
double bessel1_fn(double x);
double cubic_fn(double x);
double cubic_sigma_shape(double x);  // 1 + 4 exp(-x^2)
double peaks_fn1(double x, double y);
double peaks_fn2(double x, double y);
double peaks_fn3(double x, double y);

}  // namespace krg
