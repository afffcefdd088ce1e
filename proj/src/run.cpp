#include "krg/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "krg/errors.hpp"
#include "krg/rng.hpp"
#include "krg/table_io.hpp"
#include "krg/variance.hpp"

namespace krg {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

json grid_json(const GridSpec& grid) {
  return json{{"dims", grid.dims},       {"m", grid.m},
              {"lo", grid.lo},           {"hi", grid.hi},
              {"step", grid.step},       {"scale", grid.scale},
              {"padded", grid.padded},   {"fft_len", grid.fft_len},
              {"oversample", grid.oversample}, {"pad", grid.pad}};
}

json stats_json(const RunStats& stats) {
  return json{{"gridding_passes", stats.gridding_passes},
              {"fmc_passes", stats.fmc_passes},
              {"moment_builds", stats.moment_builds},
              {"convolutions", stats.convolutions},
              {"local_solves", stats.local_solves},
              {"rank_fallbacks", stats.rank_fallbacks},
              {"masked_points", stats.masked_points},
              {"stage_seconds", stats.stage_seconds}};
}

// The smooth scaling-benchmark target; any fixed shape works, this one has
// a few oscillations across the unit interval.
double bench_fn(double x) { return std::sin(6.0 * x) + 0.5 * std::cos(17.0 * x); }

SampleSet bench_data(std::int64_t n, std::uint64_t seed) {
  SampleSet set;
  set.dims = 1;
  set.x.resize(static_cast<std::size_t>(n));
  ResponseColumn col;
  col.name = "y";
  col.re.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = rng::uniform01(seed, 0, static_cast<std::uint64_t>(i));
    set.x[static_cast<std::size_t>(i)] = x;
    col.re[static_cast<std::size_t>(i)] =
        bench_fn(x) + 0.1 * rng::normal(seed, 1, static_cast<std::uint64_t>(i));
  }
  set.responses.push_back(std::move(col));
  return set;
}

// Direct Nadaraya-Watson sums at the grid nodes, the O(N*M) reference.
std::vector<double> direct_nw_grid(const SampleSet& samples, const GridSpec& grid,
                                   const KernelSpec& kernel) {
  const std::int64_t nodes = grid.grid_points();
  const std::int64_t n = samples.count();
  std::vector<double> num(static_cast<std::size_t>(nodes), 0.0);
  std::vector<double> den(static_cast<std::size_t>(nodes), 0.0);
  const auto& y = samples.responses.front().re;
  std::vector<std::int64_t> idx(static_cast<std::size_t>(grid.dims), 0);
  std::vector<std::int64_t> shape(grid.m.begin(), grid.m.end());
  std::int64_t g = 0;
  do {
    for (std::int64_t i = 0; i < n; ++i) {
      double w = 1.0;
      for (int j = 0; j < grid.dims; ++j) {
        const double s = kernel.scale(j) * grid.scale[static_cast<std::size_t>(j)];
        const double u = (grid.node(j, idx[static_cast<std::size_t>(j)]) - samples.loc(i, j)) / s;
        w *= kernel1d(kernel.family, u) / s;
        if (w == 0.0) break;
      }
      num[static_cast<std::size_t>(g)] += w * y[static_cast<std::size_t>(i)];
      den[static_cast<std::size_t>(g)] += w;
    }
    ++g;
  } while (next_index(idx, shape));
  for (std::int64_t k = 0; k < nodes; ++k)
    num[static_cast<std::size_t>(k)] =
        den[static_cast<std::size_t>(k)] > 0.0
            ? num[static_cast<std::size_t>(k)] / den[static_cast<std::size_t>(k)]
            : 0.0;
  return num;
}

}  // namespace

KernelFamily RunConfig::family() const { return kernel_family_from_name(kernel_type); }

FitConfig RunConfig::fit_config() const {
  FitConfig fc;
  fc.order = order;
  fc.digits = accuracy;
  fc.deconvolve = nufft_deconv;
  fc.chunk = chunk;
  return fc;
}

GridOptions RunConfig::grid_options() const {
  GridOptions go;
  go.ratio = ratio;
  go.m_override = m_override;
  go.pad = flag_power2;
  go.oversample = oversample;
  return go;
}

CvOptions RunConfig::cv_options() const {
  CvOptions co;
  co.np = np;
  co.seed = seed;
  co.dstd = dstd;
  co.calc_dof = calc_dof;
  co.interp = interp_policy();
  return co;
}

InterpPolicy RunConfig::interp_policy() const {
  InterpPolicy policy;
  policy.interior = interp_method_from_name(interp);
  policy.exterior = extrap_method_from_name(extrap);
  return policy;
}

BandwidthGrid RunConfig::bandwidth_grid(int dims) const {
  auto rules = parse_hlist(hlist);
  if (static_cast<int>(rules.size()) == 1 && dims > 1)
    rules.assign(static_cast<std::size_t>(dims), rules.front());
  if (static_cast<int>(rules.size()) != dims)
    throw InputError("hlist has " + std::to_string(rules.size()) + " rules for " +
                     std::to_string(dims) + " dimensions");
  return make_hlist(rules);
}

std::vector<HlistRule> parse_hlist(const std::string& spec) {
  std::vector<HlistRule> rules;
  std::istringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::istringstream ps(part);
    std::string rule, lo, hi, n;
    if (!std::getline(ps, rule, ':') || !std::getline(ps, lo, ':') ||
        !std::getline(ps, hi, ':') || !std::getline(ps, n))
      throw InputError("bad hlist entry '" + part + "' (expected rule:lo:hi:n)");
    HlistRule r;
    if (rule == "log")
      r.log = true;
    else if (rule == "linear")
      r.log = false;
    else
      throw InputError("unknown hlist rule '" + rule + "' (expected log or linear)");
    try {
      r.lo = std::stod(lo);
      r.hi = std::stod(hi);
      r.n = std::stoi(n);
    } catch (const std::exception&) {
      throw InputError("bad hlist numbers in '" + part + "'");
    }
    rules.push_back(r);
  }
  if (rules.empty()) throw InputError("empty hlist specification");
  return rules;
}

json config_to_json(const RunConfig& cfg) {
  return json{{"y_type", cfg.y_type},
              {"kernel_type", cfg.kernel_type},
              {"order", cfg.order},
              {"R", cfg.ratio},
              {"M", cfg.m_override},
              {"flag_power2", cfg.flag_power2},
              {"accuracy", cfg.accuracy},
              {"nufft_deconv", cfg.nufft_deconv},
              {"dstd", cfg.dstd},
              {"calc_dof", cfg.calc_dof},
              {"Np", cfg.np},
              {"interp", cfg.interp},
              {"extrap", cfg.extrap},
              {"compact", cfg.compact},
              {"seed", cfg.seed},
              {"hlist", cfg.hlist},
              {"chunk", cfg.chunk},
              {"oversample", cfg.oversample}};
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  cfg.y_type = j.value("y_type", cfg.y_type);
  cfg.kernel_type = j.value("kernel_type", cfg.kernel_type);
  cfg.order = j.value("order", cfg.order);
  cfg.ratio = j.value("R", cfg.ratio);
  cfg.m_override = j.value("M", cfg.m_override);
  cfg.flag_power2 = j.value("flag_power2", cfg.flag_power2);
  cfg.accuracy = j.value("accuracy", cfg.accuracy);
  cfg.nufft_deconv = j.value("nufft_deconv", cfg.nufft_deconv);
  cfg.dstd = j.value("dstd", cfg.dstd);
  cfg.calc_dof = j.value("calc_dof", cfg.calc_dof);
  cfg.np = j.value("Np", cfg.np);
  cfg.interp = j.value("interp", cfg.interp);
  cfg.extrap = j.value("extrap", cfg.extrap);
  cfg.compact = j.value("compact", cfg.compact);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.hlist = j.value("hlist", cfg.hlist);
  cfg.chunk = j.value("chunk", cfg.chunk);
  cfg.oversample = j.value("oversample", cfg.oversample);
  return cfg;
}

FitArtifacts run_fit(const RunConfig& cfg, const SampleSet& samples,
                     const std::string& out_prefix, bool write_surface) {
  samples.validate();
  if (samples.responses.empty()) throw InputError("fit needs at least one response column");

  FitArtifacts art;
  art.surface_path = out_prefix + ".surface";
  art.report_path = out_prefix + ".report.tsv";
  art.manifest_path = out_prefix + ".manifest.json";

  const auto hlist = cfg.bandwidth_grid(samples.dims);
  json manifest;
  manifest["config"] = config_to_json(cfg);
  manifest["data"] = json{{"n", samples.count()}, {"dims", samples.dims}};
  for (const auto& col : samples.responses) {
    manifest["data"]["responses"].push_back(col.name);
    manifest["data"]["complex"].push_back(col.is_complex);
  }

  if (cfg.y_type == "variance") {
    if (samples.responses.size() != 1 || samples.responses.front().is_complex)
      throw InputError("variance runs take exactly one real response (the squared residuals)");
    VarianceConfig vc;
    vc.grid = cfg.grid_options();
    vc.family = cfg.family();
    vc.fit = cfg.fit_config();
    vc.cv = cfg.cv_options();
    RunStats stats;
    auto var = fit_variance_log(samples, samples.responses.front().re, hlist, vc, &stats);

    if (write_surface) {
      SurfaceFile sf;
      sf.grid = var.grid;
      sf.meta["content"] = "variance";
      sf.meta["route"] = "log";
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", var.kappa);
      sf.meta["kappa"] = buf;
      sf.add("sigma2", var.sigma2);
      if (!cfg.compact) sf.add("nu", var.nu_hat);
      write_surface_file(art.surface_path, sf);
    }
    write_cv_report(art.report_path, var.report, var.grid);

    const int sel = var.report.responses.front().selected;
    json selection;
    selection["response"] = "sigma2";
    selection["index"] = sel;
    selection["h"] = var.h;
    json h_orig = json::array();
    for (int j = 0; j < var.grid.dims; ++j)
      h_orig.push_back(var.h[static_cast<std::size_t>(j)] *
                       var.grid.scale[static_cast<std::size_t>(j)]);
    selection["h_original"] = h_orig;
    selection["gcv"] = var.report.responses.front().gcv[static_cast<std::size_t>(sel)];
    selection["dof"] = var.report.candidates[static_cast<std::size_t>(sel)].trace.dof;
    manifest["selection"].push_back(selection);
    manifest["kappa"] = var.kappa;
    manifest["grid"] = grid_json(var.grid);
    manifest["stats"] = stats_json(stats);
  } else if (cfg.y_type == "mean") {
    auto res = cv_fit(samples, cfg.grid_options(), cfg.family(), hlist, cfg.fit_config(),
                      cfg.cv_options());
    write_cv_report(art.report_path, res.report, res.grid);

    if (write_surface) {
      SurfaceFile sf;
      sf.grid = res.grid;
      sf.meta["content"] = "mean";
      if (cfg.calc_dof) {
        // One field per fitted column at its response's winning bandwidth.
        for (std::size_t r = 0; r < res.selected.size(); ++r) {
          const auto& surface = res.selected[r];
          if (surface.values.empty()) continue;
          if (sf.meta.count("kernel") == 0) {
            auto meta = surface_to_file(surface).meta;
            for (auto& [k, v] : meta) sf.meta[k] = v;
          }
          for (std::size_t c = 0; c < surface.values.size(); ++c)
            sf.add(surface.column_names[c], surface.values[c]);
        }
        if (cfg.compact) {
          sf.meta.erase("masked_count");
          sf.meta.erase("rank_fallback_count");
        }
      } else {
        // No selection stage: keep every candidate surface, suffixed by its
        // index in the report.
        for (std::size_t c = 0; c < res.all.size(); ++c)
          for (std::size_t f = 0; f < res.all[c].values.size(); ++f)
            sf.add(res.all[c].column_names[f] + "__h" + std::to_string(c),
                   res.all[c].values[f]);
      }
      write_surface_file(art.surface_path, sf);
    }

    manifest["grid"] = grid_json(res.grid);
    manifest["stats"] = stats_json(res.stats);
    for (const auto& resp : res.report.responses) {
      json selection;
      selection["response"] = resp.name;
      selection["index"] = resp.selected;
      if (resp.failed) selection["error"] = resp.error;
      if (resp.selected >= 0) {
        const auto& cand = res.report.candidates[static_cast<std::size_t>(resp.selected)];
        selection["h"] = cand.h;
        json h_orig = json::array();
        for (int j = 0; j < res.grid.dims; ++j)
          h_orig.push_back(cand.h[static_cast<std::size_t>(j)] *
                           res.grid.scale[static_cast<std::size_t>(j)]);
        selection["h_original"] = h_orig;
        selection["gcv"] = resp.gcv[static_cast<std::size_t>(resp.selected)];
        selection["dof"] = cand.trace.dof;
        selection["undersmoothed"] = cand.undersmoothed;
      }
      manifest["selection"].push_back(selection);
    }
  } else {
    throw InputError("unknown y_type '" + cfg.y_type + "' (expected mean or variance)");
  }

  write_text_atomic(art.manifest_path, manifest.dump(2) + "\n");
  return art;
}

std::vector<BenchRow> run_bench(const std::vector<std::int64_t>& sizes, const RunConfig& cfg,
                                double h, int reps, std::int64_t oracle_cap,
                                double mem_budget_bytes) {
  if (sizes.empty()) throw InputError("bench needs at least one size");
  if (reps < 1) throw InputError("bench needs at least one repetition");
  if (!(h > 0.0)) throw InputError("bench bandwidth must be positive");

  GridOptions gopt = cfg.grid_options();
  if (gopt.m_override.empty()) gopt.m_override = {100};
  const FitConfig fcfg = cfg.fit_config();
  const InterpPolicy policy = cfg.interp_policy();

  std::vector<BenchRow> rows;
  for (std::int64_t n : sizes) {
    if (n < 2) throw InputError("bench sizes must be at least 2");
    // Rough high-water estimate: samples + grid coords + per-stencil work,
    // plus the complex fine-grid buffers. Refuse sizes that cannot fit.
    double bytes = static_cast<double>(n) * 8.0 * 4.0;
    double fine = 16.0;
    for (auto m : gopt.m_override) fine *= static_cast<double>(nextpow2(m)) * 2.0;
    bytes += fine * 8.0;
    if (bytes > mem_budget_bytes)
      throw ResourceError("bench size " + std::to_string(n) +
                          " exceeds the memory budget; raise --mem-budget");

    auto data = bench_data(n, cfg.seed);
    const KernelSpec kernel{cfg.family(), std::vector<double>(1, h)};
    const GridSpec grid = engine_grid(data, gopt, kernel.family, kernel.h);

    // Fixed query set for the interpolation stage.
    const std::int64_t n_query = 10000;
    std::vector<double> queries(static_cast<std::size_t>(n_query));
    for (std::int64_t i = 0; i < n_query; ++i)
      queries[static_cast<std::size_t>(i)] = rng::uniform01(cfg.seed, 2, static_cast<std::uint64_t>(i));

    std::vector<double> spread_t, fft_t, solve_t, interp_t, total_t;
    FitSurface surface;
    for (int rep = 0; rep < reps; ++rep) {
      RunStats stats;
      const auto t0 = Clock::now();
      surface = fit_single_bandwidth(data, grid, kernel, fcfg, &stats);
      const auto t1 = Clock::now();
      auto preds = predict(surface, queries.data(), n_query, policy);
      const auto t2 = Clock::now();
      spread_t.push_back(stats.stage_seconds["spread"]);
      fft_t.push_back(stats.stage_seconds["fft"] + stats.stage_seconds["moments"]);
      solve_t.push_back(stats.stage_seconds["solve"]);
      interp_t.push_back(std::chrono::duration<double>(t2 - t1).count());
      total_t.push_back(std::chrono::duration<double>(t2 - t0).count());
    }

    BenchRow row;
    row.n = n;
    row.m = grid.grid_points();
    row.spread_s = median(spread_t);
    row.fft_s = median(fft_t);
    row.solve_s = median(solve_t);
    row.interp_s = median(interp_t);
    row.total_s = median(total_t);

    if (n <= oracle_cap) {
      FitConfig precise = fcfg;
      precise.digits = 12;
      precise.deconvolve = true;
      auto ref_surface = fit_single_bandwidth(data, grid, kernel, precise);
      auto direct = direct_nw_grid(data, grid, kernel);
      double lo = data.responses.front().re.front(), hi = lo;
      for (double y : data.responses.front().re) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
      const double range = hi - lo;
      double err = 0.0;
      const auto& vals = ref_surface.values.front();
      for (std::int64_t g = 0; g < vals.size(); ++g)
        err = std::max(err, std::abs(vals[g] - direct[static_cast<std::size_t>(g)]));
      row.oracle_err = err / range;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_bench_table(const std::string& path, const std::vector<BenchRow>& rows) {
  std::vector<double> n, m, spread, fft, solve, interp, total, err;
  for (const auto& row : rows) {
    n.push_back(static_cast<double>(row.n));
    m.push_back(static_cast<double>(row.m));
    spread.push_back(row.spread_s);
    fft.push_back(row.fft_s);
    solve.push_back(row.solve_s);
    interp.push_back(row.interp_s);
    total.push_back(row.total_s);
    err.push_back(row.oracle_err);
  }
  write_columns(path, {"n", "grid_points", "spread_s", "fft_s", "solve_s", "interp_s", "total_s",
                       "oracle_err"},
                {&n, &m, &spread, &fft, &solve, &interp, &total, &err});
}

}  // namespace krg
