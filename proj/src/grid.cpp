#include "krg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "krg/errors.hpp"

namespace krg {

std::int64_t nextpow2(std::int64_t x) {
  if (x <= 0) throw InputError("nextpow2 requires a positive argument");
  std::int64_t p = 1;
  while (p < x) {
    if (p > (std::numeric_limits<std::int64_t>::max() >> 1))
      throw ResourceError("nextpow2 overflow");
    p <<= 1;
  }
  return p;
}

SampleSet complex_embed(const std::vector<double>& z_re, const std::vector<double>& z_im,
                        std::vector<ResponseColumn> responses) {
  if (z_re.size() != z_im.size())
    throw InputError("complex locations need matching re/im lengths");
  SampleSet s;
  s.dims = 2;
  s.complex_locations = true;
  s.x.resize(2 * z_re.size());
  for (std::size_t i = 0; i < z_re.size(); ++i) {
    s.x[2 * i] = z_re[i];
    s.x[2 * i + 1] = z_im[i];
  }
  s.responses = std::move(responses);
  s.validate();
  return s;
}

GridSpec make_grid(const SampleSet& samples, const GridOptions& opt) {
  samples.validate();
  const int d = samples.dims;
  const auto n = samples.count();
  if (opt.oversample != 1 && opt.oversample != 2)
    throw InputError("oversample factor must be 1 or 2");
  if (!opt.m_override.empty() && static_cast<int>(opt.m_override.size()) != d)
    throw InputError("grid override must give one node count per dimension");
  if (opt.ratio <= 0.0) throw InputError("grid ratio must be positive");

  GridSpec g;
  g.dims = d;
  g.oversample = opt.oversample;
  g.pad = opt.pad;
  g.lo.resize(d);
  g.hi.resize(d);
  g.step.resize(d);
  g.scale.resize(d);
  g.m.resize(d);
  g.padded.resize(d);
  g.fft_len.resize(d);

  const std::int64_t m_default =
      static_cast<std::int64_t>(std::llround(opt.ratio * std::ceil(std::pow(static_cast<double>(n), 1.0 / d))));

  for (int j = 0; j < d; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double mean = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double v = samples.loc(i, j);
      if (!std::isfinite(v)) throw InputError("non-finite location in dimension " + std::to_string(j));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v;
    }
    mean /= static_cast<double>(n);
    if (!(hi > lo))
      throw InputError("degenerate dimension " + std::to_string(j) + ": zero extent");
    double ss = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double c = samples.loc(i, j) - mean;
      ss += c * c;
    }
    g.lo[j] = lo;
    g.hi[j] = hi;
    g.scale[j] = std::sqrt(ss / static_cast<double>(n - 1));
    g.m[j] = opt.m_override.empty() ? m_default : opt.m_override[j];
    if (g.m[j] < 2) throw InputError("dimension " + std::to_string(j) + " needs at least 2 grid nodes");
    g.step[j] = (hi - lo) / static_cast<double>(g.m[j] - 1);

    std::int64_t want = g.m[j];
    if (!opt.min_pad.empty()) {
      if (static_cast<int>(opt.min_pad.size()) != d)
        throw InputError("min_pad must give one value per dimension");
      want += std::max<std::int64_t>(0, opt.min_pad[j]);
    }
    g.padded[j] = opt.pad ? nextpow2(want) : want;
    g.fft_len[j] = g.padded[j] * opt.oversample;
  }
  return g;
}

}  // namespace krg
