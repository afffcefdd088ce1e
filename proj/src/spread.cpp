#include "krg/spread.hpp"

#include <cmath>
#include <string>

#include "krg/errors.hpp"

namespace krg {

SpreadConfig SpreadConfig::for_grid(const GridSpec& grid, int digits, bool deconvolve) {
  if (digits < 1 || digits > 12)
    throw InputError("spreading accuracy must be between 1 and 12 digits");
  SpreadConfig cfg;
  cfg.digits = digits;
  cfg.half_width = digits;
  cfg.deconvolve = deconvolve;
  cfg.spread_var.resize(grid.dims);
  for (int j = 0; j < grid.dims; ++j) {
    if (2 * cfg.half_width > grid.fft_len[j])
      throw InputError("stencil wider than the fine grid in dimension " + std::to_string(j));
    const double rho = static_cast<double>(grid.fft_len[j]) / static_cast<double>(grid.padded[j]);
    const double modes = static_cast<double>(grid.padded[j]);
    cfg.spread_var[j] = M_PI * cfg.half_width / (modes * modes * rho * (rho - 0.5));
  }
  return cfg;
}

std::vector<SpreadField> spread_points(const double* points_gc, std::int64_t n,
                                       const std::vector<const double*>& columns,
                                       const GridSpec& grid, const SpreadConfig& cfg) {
  const int d = grid.dims;
  const int hw = cfg.half_width;
  const int w = 2 * hw;  // stencil nodes per dimension
  if (static_cast<int>(cfg.spread_var.size()) != d)
    throw InputError("spread configuration does not match the grid dimension");

  std::vector<std::int64_t> shape(grid.fft_len.begin(), grid.fft_len.end());
  const std::size_t nfields = columns.size() + 1;
  std::vector<SpreadField> out(nfields);
  for (auto& f : out) f.values = NdArray<double>(shape);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    double mass = 0.0;
    for (std::int64_t i = 0; i < n; ++i) mass += columns[c][i];
    out[c + 1].total_mass = mass;
  }
  out[0].total_mass = static_cast<double>(n);

  // Per-dimension constants: fine spacing, mass normalization, and the
  // offset-only Gaussian table exp(-(l*delta)^2 / (4 tau)).
  std::vector<double> delta(d), inv4tau(d), normc(d), rho(d);
  std::vector<std::vector<double>> tab(d);
  for (int j = 0; j < d; ++j) {
    delta[j] = 2.0 * M_PI / static_cast<double>(grid.fft_len[j]);
    inv4tau[j] = 1.0 / (4.0 * cfg.spread_var[j]);
    normc[j] = delta[j] / std::sqrt(4.0 * M_PI * cfg.spread_var[j]);
    rho[j] = static_cast<double>(grid.fft_len[j]) / static_cast<double>(grid.padded[j]);
    tab[j].resize(w);
    for (int l = 0; l < w; ++l) {
      const double off = static_cast<double>(l - hw + 1) * delta[j];
      tab[j][l] = std::exp(-off * off * inv4tau[j]);
    }
  }

  const auto strides = out[0].values.strides();
  std::vector<double> w1d(static_cast<std::size_t>(d) * w);
  std::vector<std::int64_t> base(d);
  std::vector<std::int64_t> wrapped(static_cast<std::size_t>(d) * w);

  for (std::int64_t i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      const double gc = points_gc[i * d + j];
      if (!(gc >= 0.0 && gc <= static_cast<double>(grid.m[j] - 1)))
        throw InputError("point " + std::to_string(i) + " outside the grid range in dimension " +
                         std::to_string(j));
      // Fine-grid coordinate; nearest node at or below, fractional angle x0.
      const double s = gc * rho[j];
      const double m0 = std::floor(s);
      const double x0 = (s - m0) * delta[j];
      base[j] = static_cast<std::int64_t>(m0);

      // exp(-(x0 - l*delta)^2/(4tau)) = E1 * E2^l * tab[l]
      const double e1 = std::exp(-x0 * x0 * inv4tau[j]) * normc[j];
      const double e2 = std::exp(x0 * delta[j] * (2.0 * inv4tau[j]));
      double* wj = &w1d[static_cast<std::size_t>(j) * w];
      double p = 1.0;
      for (int l = hw - 1; l < w; ++l) {  // l - hw + 1 = 0, 1, ...
        wj[l] = e1 * p * tab[j][l];
        p *= e2;
      }
      p = 1.0;
      for (int l = hw - 2; l >= 0; --l) {
        p /= e2;
        wj[l] = e1 * p * tab[j][l];
      }
      std::int64_t* idx = &wrapped[static_cast<std::size_t>(j) * w];
      const std::int64_t len = grid.fft_len[j];
      for (int l = 0; l < w; ++l) {
        std::int64_t node = base[j] + (l - hw + 1);
        node %= len;
        if (node < 0) node += len;
        idx[l] = node * strides[j];
      }
    }

    if (d == 1) {
      const double* wj = w1d.data();
      for (int l = 0; l < w; ++l) {
        const std::int64_t at = wrapped[l];
        const double wt = wj[l];
        out[0].values[at] += wt;
        for (std::size_t c = 0; c < columns.size(); ++c)
          out[c + 1].values[at] += wt * columns[c][i];
      }
    } else if (d == 2) {
      for (int l0 = 0; l0 < w; ++l0) {
        const double w0 = w1d[l0];
        const std::int64_t o0 = wrapped[l0];
        for (int l1 = 0; l1 < w; ++l1) {
          const double wt = w0 * w1d[static_cast<std::size_t>(w) + l1];
          const std::int64_t at = o0 + wrapped[static_cast<std::size_t>(w) + l1];
          out[0].values[at] += wt;
          for (std::size_t c = 0; c < columns.size(); ++c)
            out[c + 1].values[at] += wt * columns[c][i];
        }
      }
    } else {
      std::vector<int> l(d, 0);
      while (true) {
        double wt = 1.0;
        std::int64_t at = 0;
        for (int j = 0; j < d; ++j) {
          wt *= w1d[static_cast<std::size_t>(j) * w + l[j]];
          at += wrapped[static_cast<std::size_t>(j) * w + l[j]];
        }
        out[0].values[at] += wt;
        for (std::size_t c = 0; c < columns.size(); ++c)
          out[c + 1].values[at] += wt * columns[c][i];
        int j = d - 1;
        while (j >= 0 && ++l[j] == w) l[j--] = 0;
        if (j < 0) break;
      }
    }
  }
  return out;
}

std::vector<SpreadField> spread_points(const std::vector<double>& points_gc,
                                       const std::vector<std::vector<double>>& columns,
                                       const GridSpec& grid, const SpreadConfig& cfg) {
  if (grid.dims <= 0) throw InputError("grid has no dimensions");
  const std::int64_t n = static_cast<std::int64_t>(points_gc.size()) / grid.dims;
  std::vector<const double*> cols;
  cols.reserve(columns.size());
  for (const auto& c : columns) {
    if (static_cast<std::int64_t>(c.size()) != n)
      throw InputError("weight column length does not match point count");
    cols.push_back(c.data());
  }
  return spread_points(points_gc.data(), n, cols, grid, cfg);
}

}  // namespace krg
