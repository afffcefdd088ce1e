#include "krg/fit.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>

#include "krg/errors.hpp"
#include "krg/nufft.hpp"

namespace krg {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

ColumnLayout ColumnLayout::from(const SampleSet& samples) {
  ColumnLayout layout;
  int c = 0;
  for (const auto& col : samples.responses) {
    Entry e;
    e.name = col.name;
    e.is_complex = col.is_complex;
    e.re_col = c++;
    if (col.is_complex) e.im_col = c++;
    layout.entries.push_back(std::move(e));
  }
  layout.real_count = c;
  return layout;
}

GriddedSamples grid_samples_with_extras(const SampleSet& samples, const GridSpec& grid,
                                        const FitConfig& cfg,
                                        const std::vector<std::vector<double>>& extras,
                                        RunStats* stats) {
  samples.validate();
  const auto t0 = Clock::now();
  GriddedSamples gs;
  gs.grid = grid;
  gs.spread = SpreadConfig::for_grid(grid, cfg.digits, cfg.deconvolve);
  gs.gc = to_grid_coords(samples, grid);
  gs.n = samples.count();

  std::vector<const double*> cols;
  for (const auto& col : samples.responses) {
    cols.push_back(col.re.data());
    gs.column_names.push_back(col.is_complex ? col.name + "_re" : col.name);
    if (col.is_complex) {
      cols.push_back(col.im.data());
      gs.column_names.push_back(col.name + "_im");
    }
  }
  for (std::size_t e = 0; e < extras.size(); ++e) {
    if (static_cast<std::int64_t>(extras[e].size()) != gs.n)
      throw InputError("extra column length does not match sample count");
    cols.push_back(extras[e].data());
    gs.column_names.push_back("probe" + std::to_string(e));
  }

  auto bands = band_spectra(gs.gc.data(), gs.n, cols, grid, gs.spread, stats);
  gs.density_hat = std::move(bands[0]);
  for (std::size_t c = 1; c < bands.size(); ++c) gs.column_hat.push_back(std::move(bands[c]));
  if (stats) {
    ++stats->gridding_passes;
    stats->add_time("gridding", seconds_since(t0));
  }
  return gs;
}

GriddedSamples grid_samples(const SampleSet& samples, const GridSpec& grid, const FitConfig& cfg,
                            RunStats* stats) {
  return grid_samples_with_extras(samples, grid, cfg, {}, stats);
}

int FitSurface::column(const std::string& name) const {
  for (std::size_t c = 0; c < column_names.size(); ++c)
    if (column_names[c] == name) return static_cast<int>(c);
  throw InputError("no column named '" + name + "' in the fitted surface");
}

FitSurface local_solve(const std::vector<NdArray<double>>& s_fields,
                       const std::vector<std::vector<NdArray<double>>>& t_fields,
                       const GridSpec& grid, const KernelSpec& kernel, const FitConfig& cfg,
                       double n_samples, RunStats* stats) {
  const auto t0 = Clock::now();
  const int d = grid.dims;
  const auto basis = monomial_basis(d, cfg.order);
  const auto full = monomial_basis(d, 2 * cfg.order);
  const int p = basis.size();
  if (static_cast<int>(s_fields.size()) < full.size())
    throw InputError("missing density moment fields for the requested order");

  // Gram lookup: position of alpha_a + alpha_b inside the full set.
  std::vector<int> gram(static_cast<std::size_t>(p) * p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      std::vector<int> sum(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j)
        sum[static_cast<std::size_t>(j)] =
            basis.alphas[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] +
            basis.alphas[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
      const int at = full.find(sum);
      if (at < 0) throw NumericError("moment set is not closed under the basis products");
      gram[static_cast<std::size_t>(a) * p + b] = at;
    }

  const std::int64_t nodes = grid.grid_points();
  const double floor = cfg.density_floor * n_samples / static_cast<double>(nodes);
  const std::size_t q = t_fields.size();

  FitSurface out;
  out.grid = grid;
  out.kernel = kernel;
  out.order = cfg.order;
  out.values.assign(q, NdArray<double>(std::vector<std::int64_t>(grid.m.begin(), grid.m.end())));
  out.solved = NdArray<std::uint8_t>(std::vector<std::int64_t>(grid.m.begin(), grid.m.end()), 1);

  Eigen::MatrixXd S(p, p);
  Eigen::VectorXd rhs(p);

  for (std::int64_t g = 0; g < nodes; ++g) {
    const double s0 = s_fields[0][g];
    if (s0 < floor) {
      out.solved[g] = 0;
      ++out.masked_count;
      continue;
    }
    if (cfg.order == 0) {
      for (std::size_t c = 0; c < q; ++c) out.values[c][g] = t_fields[c][0][g] / s0;
      continue;
    }

    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) {
        const double v = s_fields[static_cast<std::size_t>(gram[static_cast<std::size_t>(a) * p + b])][g];
        S(a, b) = v;
        S(b, a) = v;
      }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    const auto& diag = ldlt.vectorD();
    const double dmax = diag.cwiseAbs().maxCoeff();
    bool degenerate = ldlt.info() != Eigen::Success || dmax <= 0.0 ||
                      diag.cwiseAbs().minCoeff() < cfg.pivot_rtol * dmax;
    if (degenerate) {
      // Fall back to the order-0 ratio at this node and flag it.
      ++out.rank_fallback_count;
      for (std::size_t c = 0; c < q; ++c) out.values[c][g] = t_fields[c][0][g] / s0;
      continue;
    }
    if (stats) ++stats->local_solves;
    for (std::size_t c = 0; c < q; ++c) {
      for (int a = 0; a < p; ++a) rhs(a) = t_fields[c][static_cast<std::size_t>(a)][g];
      out.values[c][g] = ldlt.solve(rhs)(0);
    }
  }

  if (stats) {
    stats->masked_points += out.masked_count;
    stats->rank_fallbacks += out.rank_fallback_count;
    stats->add_time("solve", seconds_since(t0));
  }
  for (auto& field : out.values) fill_masked(field, out.solved);
  return out;
}

FitSurface fit_gridded(const GriddedSamples& gs, const KernelSpec& kernel, const FitConfig& cfg,
                       RunStats* stats) {
  const auto t0 = Clock::now();
  auto grids = kernel_moment_grids(gs.grid, kernel, 2 * cfg.order, stats);
  prepare_spectra(grids);
  const int t_count = monomial_basis(gs.grid.dims, cfg.order).size();

  auto s_fields = convolve_moments(grids, gs.density_hat, gs.grid, -1, stats);
  if (stats) stats->add_time("moments", seconds_since(t0));

  // Response columns go through in batches so a wide response matrix never
  // materializes all its moment fields at once.
  const auto q = static_cast<std::int64_t>(gs.column_hat.size());
  const std::int64_t chunk = cfg.chunk > 0 ? cfg.chunk : std::max<std::int64_t>(q, 1);
  FitSurface surface;
  for (std::int64_t c0 = 0; c0 <= q; c0 += chunk) {
    if (c0 == q && q > 0) break;
    const std::int64_t c1 = std::min(q, c0 + chunk);
    const auto tc = Clock::now();
    std::vector<std::vector<NdArray<double>>> t_fields;
    t_fields.reserve(static_cast<std::size_t>(c1 - c0));
    for (std::int64_t c = c0; c < c1; ++c)
      t_fields.push_back(
          convolve_moments(grids, gs.column_hat[static_cast<std::size_t>(c)], gs.grid, t_count, stats));
    if (stats) stats->add_time("moments", seconds_since(tc));
    auto part = local_solve(s_fields, t_fields, gs.grid, kernel, cfg, static_cast<double>(gs.n),
                            c0 == 0 ? stats : nullptr);
    if (c0 == 0) {
      surface = std::move(part);
    } else {
      for (auto& field : part.values) surface.values.push_back(std::move(field));
    }
    if (q == 0) break;
  }
  surface.column_names = gs.column_names;
  surface.undersmoothed = grids.undersmoothed;
  return surface;
}

FitSurface fit_single_bandwidth(const SampleSet& samples, const GridSpec& grid,
                                const KernelSpec& kernel, const FitConfig& cfg, RunStats* stats) {
  auto gs = grid_samples(samples, grid, cfg, stats);
  return fit_gridded(gs, kernel, cfg, stats);
}

GridSpec engine_grid(const SampleSet& samples, const GridOptions& base, KernelFamily family,
                     const std::vector<double>& h_max) {
  GridSpec probe = make_grid(samples, base);
  if (!base.pad) return probe;
  if (static_cast<int>(h_max.size()) != probe.dims)
    throw InputError("bandwidth bound must give one value per dimension");

  GridOptions opt = base;
  opt.min_pad.assign(static_cast<std::size_t>(probe.dims), 0);
  const double radius = kernel_radius(family);
  for (int j = 0; j < probe.dims; ++j) {
    const double reach_units = radius * std::sqrt(h_max[static_cast<std::size_t>(j)]) *
                               probe.scale[j];  // back to original units
    const auto reach_nodes = static_cast<std::int64_t>(std::ceil(reach_units / probe.step[j])) + 2;
    opt.min_pad[static_cast<std::size_t>(j)] = std::min(reach_nodes, probe.m[j]);
  }
  return make_grid(samples, opt);
}

std::vector<std::vector<double>> predict(const FitSurface& surface, const double* queries,
                                         std::int64_t p, const InterpPolicy& policy) {
  std::vector<std::vector<double>> out;
  out.reserve(surface.values.size());
  for (const auto& field : surface.values)
    out.push_back(interpolate_field(field, surface.grid, queries, p, policy));
  return out;
}

}  // namespace krg
