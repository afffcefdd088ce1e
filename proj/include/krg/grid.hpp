#pragma once

#include <cstdint>
#include <vector>

#include "krg/sample_set.hpp"

namespace krg {

// Smallest power of two >= x.
std::int64_t nextpow2(std::int64_t x);

// Tensor grid the estimator lives on.
//
// Per dimension j:
//   m[j]        regression nodes, node i at lo[j] + i*step[j]
//   padded[j]   zero-padded length for circular convolution (>= m[j])
//   fft_len[j]  oversampled spreading length, rho * padded[j]
//   scale[j]    sample standard deviation; bandwidths are interpreted on
//               coordinates divided by this, so h is unit-std scaled
//
// The spreading stage maps [lo, lo + padded*step) onto one period of the
// circle, so samples occupy the first m nodes and the pad stays empty.
struct GridSpec {
  int dims = 0;
  std::vector<double> lo, hi, step, scale;
  std::vector<std::int64_t> m, padded, fft_len;
  int oversample = 2;  // rho: 1 or 2
  bool pad = true;

  double node(int j, std::int64_t i) const { return lo[j] + step[j] * static_cast<double>(i); }
  std::int64_t grid_points() const {
    std::int64_t n = 1;
    for (auto v : m) n *= v;
    return n;
  }
  std::vector<double> axis(int j) const {
    std::vector<double> a(static_cast<std::size_t>(m[j]));
    for (std::int64_t i = 0; i < m[j]; ++i) a[static_cast<std::size_t>(i)] = node(j, i);
    return a;
  }
};

struct GridOptions {
  double ratio = 1.0;                    // grid nodes per ceil(N^(1/d)) when m is defaulted
  std::vector<std::int64_t> m_override;  // per-dim node counts; empty = use ratio rule
  bool pad = true;                       // round padded length up to a power of two
  int oversample = 2;                    // spreading oversampling factor (1 or 2)
  // Extra pad nodes folded in before rounding: padded = nextpow2(m + min_pad).
  // The fitting engine sets this to the kernel reach so circular convolution
  // cannot wrap kernel mass across the data window; 0 reproduces the plain
  // nextpow2(m) layout.
  std::vector<std::int64_t> min_pad;

  static GridOptions defaults() { return GridOptions{}; }
};

// Builds the grid from sample extents: m_j = ratio * ceil(N^(1/d)) unless
// overridden, spacing (hi-lo)/(m-1). Rejects degenerate (zero-extent)
// dimensions.
GridSpec make_grid(const SampleSet& samples, const GridOptions& opt = GridOptions::defaults());

}  // namespace krg
