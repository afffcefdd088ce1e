#include "krg/moments.hpp"

#include <cmath>

#include "krg/errors.hpp"
#include "krg/fftwrap.hpp"

namespace krg {

MomentGrids kernel_moment_grids(const GridSpec& grid, const KernelSpec& kernel, int max_degree,
                                RunStats* stats) {
  kernel.validate(grid.dims);
  MomentGrids out;
  out.kernel = kernel;
  out.set = monomial_basis(grid.dims, max_degree);

  // Separable sections: per axis, kernel value and offset powers at every
  // circular node offset on the unit-std scale.
  const int d = grid.dims;
  std::vector<std::vector<double>> kval(d);
  std::vector<std::vector<double>> off(d);
  for (int j = 0; j < d; ++j) {
    const double step_norm = grid.step[j] / grid.scale[j];
    const double s = kernel.scale(j);
    if (s < step_norm) out.undersmoothed = true;
    const std::int64_t L = grid.padded[j];
    kval[j].resize(static_cast<std::size_t>(L));
    off[j].resize(static_cast<std::size_t>(L));
    for (std::int64_t p = 0; p < L; ++p) {
      const std::int64_t o = p <= L / 2 ? p : p - L;
      const double delta = static_cast<double>(o) * step_norm;
      off[j][static_cast<std::size_t>(p)] = delta;
      kval[j][static_cast<std::size_t>(p)] = kernel1d(kernel.family, delta / s) / s;
    }
  }

  std::vector<std::int64_t> shape(grid.padded.begin(), grid.padded.end());
  for (const auto& alpha : out.set.alphas) {
    NdArray<double> f(shape);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
    std::int64_t flat = 0;
    do {
      double v = 1.0;
      for (int j = 0; j < d; ++j) {
        const auto p = static_cast<std::size_t>(idx[j]);
        v *= kval[j][p];
        for (int e = 0; e < alpha[static_cast<std::size_t>(j)]; ++e) v *= off[j][p];
      }
      f[flat++] = v;
    } while (next_index(idx, shape));
    out.fields.push_back(std::move(f));
  }
  if (stats) ++stats->moment_builds;
  return out;
}

void prepare_spectra(MomentGrids& grids) {
  if (!grids.hat.empty()) return;
  grids.hat.reserve(grids.fields.size());
  for (const auto& f : grids.fields) {
    NdArray<cplx> c(f.shape);
    for (std::int64_t i = 0; i < f.size(); ++i) c[i] = cplx(f[i], 0.0);
    fft_forward(c);
    grids.hat.push_back(std::move(c));
  }
}

std::vector<NdArray<double>> convolve_moments(const MomentGrids& grids, const NdArray<cplx>& spectrum,
                                              const GridSpec& grid, int count, RunStats* stats) {
  if (grids.hat.empty()) throw NumericError("moment spectra not prepared");
  if (spectrum.shape != grids.hat.front().shape)
    throw InputError("spectrum shape does not match the moment grids");
  const int n = count <= 0 ? static_cast<int>(grids.hat.size())
                           : std::min<int>(count, static_cast<int>(grids.hat.size()));

  double inv = 1.0;
  for (auto L : grid.padded) inv /= static_cast<double>(L);
  std::vector<std::int64_t> out_shape(grid.m.begin(), grid.m.end());
  const auto pad_shape = spectrum.shape;

  std::vector<NdArray<double>> out;
  out.reserve(static_cast<std::size_t>(n));
  NdArray<cplx> work;
  for (int g = 0; g < n; ++g) {
    work = grids.hat[static_cast<std::size_t>(g)];
    for (std::int64_t i = 0; i < work.size(); ++i) work[i] *= spectrum[i];
    fft_inverse(work);
    if (stats) ++stats->convolutions;

    NdArray<double> cropped(out_shape);
    const auto pad_strides = work.strides();
    std::vector<std::int64_t> idx(static_cast<std::size_t>(grid.dims), 0);
    std::int64_t flat = 0;
    do {
      std::int64_t src = 0;
      for (int j = 0; j < grid.dims; ++j) src += idx[j] * pad_strides[j];
      cropped[flat++] = work[src].real() * inv;
    } while (next_index(idx, out_shape));
    out.push_back(std::move(cropped));
  }
  return out;
}

}  // namespace krg
