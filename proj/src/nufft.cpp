#include "krg/nufft.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "krg/errors.hpp"
#include "krg/fftwrap.hpp"

namespace krg {
namespace {

// Per-axis deconvolution factors over the retained band, FFT order. With
// mass-normalized stencils the spreading Gaussian's transform is exactly
// e^{-k^2 tau}, so its inverse is e^{+k^2 tau} (the sqrt(pi/tau) prefactor
// of the unnormalized convention is absorbed by the stencil normalization).
std::vector<std::vector<double>> deconv_factors(const GridSpec& grid, const SpreadConfig& cfg) {
  std::vector<std::vector<double>> fac(grid.dims);
  for (int j = 0; j < grid.dims; ++j) {
    const std::int64_t L = grid.padded[j];
    fac[j].resize(static_cast<std::size_t>(L));
    for (std::int64_t p = 0; p < L; ++p) {
      const double k = static_cast<double>(p < L / 2 ? p : p - L);
      const double e = k * k * cfg.spread_var[j];
      if (e > 700.0)
        throw NumericError("deconvolution overflow at frequency " + std::to_string(static_cast<long long>(k)) +
                           " in dimension " + std::to_string(j));
      fac[j][static_cast<std::size_t>(p)] = cfg.deconvolve ? std::exp(e) : 1.0;
    }
  }
  return fac;
}

// Extracts the central band from a full fine-grid spectrum, applying the
// per-axis factors. Both arrays are in FFT frequency order.
NdArray<cplx> extract_band(const NdArray<cplx>& full, const GridSpec& grid,
                           const std::vector<std::vector<double>>& fac) {
  std::vector<std::int64_t> shape(grid.padded.begin(), grid.padded.end());
  NdArray<cplx> band(shape);
  const auto src_strides = full.strides();
  std::vector<std::int64_t> idx(static_cast<std::size_t>(grid.dims), 0);
  std::int64_t flat = 0;
  do {
    std::int64_t src = 0;
    double f = 1.0;
    for (int j = 0; j < grid.dims; ++j) {
      const std::int64_t L = grid.padded[j];
      const std::int64_t k = idx[j] < L / 2 ? idx[j] : idx[j] - L;
      const std::int64_t s = k >= 0 ? k : k + grid.fft_len[j];
      src += s * src_strides[j];
      f *= fac[j][static_cast<std::size_t>(idx[j])];
    }
    band[flat++] = full[src] * f;
  } while (next_index(idx, shape));
  return band;
}

}  // namespace

std::vector<double> to_grid_coords(const SampleSet& samples, const GridSpec& grid) {
  if (samples.dims != grid.dims) throw InputError("sample/grid dimension mismatch");
  const auto n = samples.count();
  std::vector<double> gc(static_cast<std::size_t>(n) * grid.dims);
  for (std::int64_t i = 0; i < n; ++i) {
    for (int j = 0; j < grid.dims; ++j) {
      const double v = samples.loc(i, j);
      if (v < grid.lo[j] || v > grid.hi[j])
        throw InputError("sample " + std::to_string(i) + " outside the grid range in dimension " +
                         std::to_string(j));
      double c = (v - grid.lo[j]) / grid.step[j];
      c = std::clamp(c, 0.0, static_cast<double>(grid.m[j] - 1));
      gc[static_cast<std::size_t>(i) * grid.dims + j] = c;
    }
  }
  return gc;
}

std::vector<NdArray<cplx>> band_spectra(const double* points_gc, std::int64_t n,
                                        const std::vector<const double*>& columns,
                                        const GridSpec& grid, const SpreadConfig& cfg,
                                        RunStats* stats) {
  const auto t0 = std::chrono::steady_clock::now();
  auto fields = spread_points(points_gc, n, columns, grid, cfg);
  const auto t1 = std::chrono::steady_clock::now();
  const auto fac = deconv_factors(grid, cfg);
  std::vector<std::int64_t> fine_shape(grid.fft_len.begin(), grid.fft_len.end());
  std::vector<NdArray<cplx>> out;
  out.reserve(fields.size());
  NdArray<cplx> work(fine_shape);
  for (auto& f : fields) {
    for (std::int64_t i = 0; i < f.values.size(); ++i) work[i] = cplx(f.values[i], 0.0);
    fft_forward(work);
    out.push_back(extract_band(work, grid, fac));
  }
  if (stats) {
    const auto t2 = std::chrono::steady_clock::now();
    stats->add_time("spread", std::chrono::duration<double>(t1 - t0).count());
    stats->add_time("fft", std::chrono::duration<double>(t2 - t1).count());
  }
  return out;
}

std::vector<SpectrumField> nufft_type1(const double* points_gc, std::int64_t n,
                                       const std::vector<const double*>& columns,
                                       const GridSpec& grid, const SpreadConfig& cfg) {
  auto bands = band_spectra(points_gc, n, columns, grid, cfg);
  double inv = 1.0;
  for (int j = 0; j < grid.dims; ++j) inv /= static_cast<double>(grid.fft_len[j]);
  std::vector<SpectrumField> out(bands.size());
  for (std::size_t c = 0; c < bands.size(); ++c) {
    out[c].coeffs = std::move(bands[c]);
    out[c].deconvolved = cfg.deconvolve;
    for (std::int64_t i = 0; i < out[c].coeffs.size(); ++i) out[c].coeffs[i] *= inv;
  }
  return out;
}

std::vector<SpectrumField> nufft_type1(const std::vector<double>& points_gc,
                                       const std::vector<std::vector<double>>& columns,
                                       const GridSpec& grid, const SpreadConfig& cfg) {
  const std::int64_t n = grid.dims > 0 ? static_cast<std::int64_t>(points_gc.size()) / grid.dims : 0;
  std::vector<const double*> cols;
  for (const auto& c : columns) {
    if (static_cast<std::int64_t>(c.size()) != n)
      throw InputError("weight column length does not match point count");
    cols.push_back(c.data());
  }
  return nufft_type1(points_gc.data(), n, cols, grid, cfg);
}

GridCounts grid_counts(const SampleSet& samples, const GridSpec& grid, const SpreadConfig& cfg) {
  samples.validate();
  const auto gc = to_grid_coords(samples, grid);
  std::vector<std::vector<double>> real_cols;
  for (const auto& col : samples.responses) {
    real_cols.push_back(col.re);
    if (col.is_complex) real_cols.push_back(col.im);
  }
  std::vector<const double*> cols;
  for (const auto& c : real_cols) cols.push_back(c.data());
  auto bands = band_spectra(gc.data(), samples.count(), cols, grid, cfg);

  double inv = 1.0;
  for (int j = 0; j < grid.dims; ++j) inv /= static_cast<double>(grid.padded[j]);
  GridCounts out;
  for (std::size_t c = 0; c < bands.size(); ++c) {
    fft_inverse(bands[c]);
    NdArray<double> real(bands[c].shape);
    for (std::int64_t i = 0; i < real.size(); ++i) real[i] = bands[c][i].real() * inv;
    if (c == 0)
      out.u = std::move(real);
    else
      out.v.push_back(std::move(real));
  }
  return out;
}

}  // namespace krg
