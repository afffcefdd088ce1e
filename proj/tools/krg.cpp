// Command-line front end: fit, predict, interval, gcv-curve, synth, bench.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "krg/errors.hpp"
#include "krg/run.hpp"
#include "krg/synth.hpp"
#include "krg/table_io.hpp"
#include "krg/variance.hpp"

namespace {

struct CliRun {
  krg::RunConfig cfg;
  std::string data_path;
  std::string out_prefix = "fit";
  std::string m_spec;
};

void add_config_flags(CLI::App* cmd, CliRun& run) {
  cmd->add_option("--data", run.data_path, "input table")->required();
  cmd->add_option("--out", run.out_prefix, "output path prefix");
  cmd->add_option("--y-type", run.cfg.y_type, "mean or variance");
  cmd->add_option("--kernel", run.cfg.kernel_type, "gaussian, epanechnikov, box, triangle");
  cmd->add_option("--order", run.cfg.order, "local polynomial order")->check(CLI::Range(0, 2));
  cmd->add_option("--ratio", run.cfg.ratio, "grid nodes per ceil(N^(1/d))");
  cmd->add_option("--m", run.m_spec, "per-dimension grid nodes, comma separated");
  cmd->add_flag("!--no-power2", run.cfg.flag_power2, "skip power-of-two padding");
  cmd->add_option("--accuracy", run.cfg.accuracy, "gridding digits")->check(CLI::Range(1, 12));
  cmd->add_flag("!--no-deconv", run.cfg.nufft_deconv, "skip gridding deconvolution");
  cmd->add_option("--dstd", run.cfg.dstd, "bandwidth relaxation in GCV standard deviations");
  cmd->add_flag("!--no-dof", run.cfg.calc_dof, "skip the trace stage, keep all surfaces");
  cmd->add_option("--np", run.cfg.np, "stochastic trace probes");
  cmd->add_option("--interp", run.cfg.interp, "interior interpolation (spline or linear)");
  cmd->add_option("--extrap", run.cfg.extrap, "extrapolation (linear, nearest, constant)");
  cmd->add_flag("!--no-compact", run.cfg.compact, "keep non-prediction state in the surface");
  cmd->add_option("--seed", run.cfg.seed, "random seed");
  cmd->add_option("--hlist", run.cfg.hlist, "rule:lo:hi:n per dimension, comma separated");
  cmd->add_option("--chunk", run.cfg.chunk, "response columns per processing batch");
  cmd->add_option("--oversample", run.cfg.oversample, "gridding oversampling factor")
      ->check(CLI::Range(1, 2));
}

std::vector<std::int64_t> parse_int_list(const std::string& spec) {
  std::vector<std::int64_t> out;
  std::string cur;
  std::istringstream ss(spec);
  while (std::getline(ss, cur, ',')) {
    // Accept scientific notation (1e6) but refuse partial parses like "12x"
    // and non-integral values; stoll alone would read "1e6" as 1.
    try {
      std::size_t pos = 0;
      const double v = std::stod(cur, &pos);
      if (pos != cur.size() || v != std::floor(v) || std::fabs(v) > 9e18)
        throw std::invalid_argument(cur);
      out.push_back(static_cast<std::int64_t>(v));
    } catch (const std::exception&) {
      throw krg::InputError("bad integer '" + cur + "' in list");
    }
  }
  return out;
}

int do_fit(CliRun& run, bool write_surface) {
  if (!run.m_spec.empty()) run.cfg.m_override = parse_int_list(run.m_spec);
  auto samples = krg::load_table(run.data_path);
  auto art = krg::run_fit(run.cfg, samples, run.out_prefix, write_surface);
  std::printf("report:   %s\n", art.report_path.c_str());
  if (write_surface) std::printf("surface:  %s\n", art.surface_path.c_str());
  std::printf("manifest: %s\n", art.manifest_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fast multivariate kernel regression"};
  app.require_subcommand(1);

  CliRun fit_run;
  auto* fit_cmd = app.add_subcommand("fit", "cross-validated fit, writes surface + report");
  add_config_flags(fit_cmd, fit_run);

  CliRun curve_run;
  auto* curve_cmd = app.add_subcommand("gcv-curve", "bandwidth sweep report only");
  add_config_flags(curve_cmd, curve_run);

  std::string pr_surface, pr_data, pr_out = "predictions.tsv", pr_interp = "spline",
              pr_extrap = "linear";
  double pr_fill = std::numeric_limits<double>::quiet_NaN();
  auto* pr_cmd = app.add_subcommand("predict", "evaluate a fitted surface at query locations");
  pr_cmd->add_option("--surface", pr_surface, "surface file from fit")->required();
  pr_cmd->add_option("--data", pr_data, "query table (x, x1..xd, or z_re/z_im)")->required();
  pr_cmd->add_option("--out", pr_out, "output table");
  pr_cmd->add_option("--interp", pr_interp, "interior interpolation");
  pr_cmd->add_option("--extrap", pr_extrap, "extrapolation method");
  pr_cmd->add_option("--fill", pr_fill, "constant extrapolation value");

  std::string iv_mean, iv_var, iv_out = "interval.surface";
  double iv_alpha = 0.05, iv_sigma2 = -1.0;
  bool iv_clamp = false;
  auto* iv_cmd = app.add_subcommand("interval", "pointwise confidence bands from mean + variance");
  iv_cmd->add_option("--mean", iv_mean, "mean surface file")->required();
  iv_cmd->add_option("--variance", iv_var, "variance surface file");
  iv_cmd->add_option("--sigma2", iv_sigma2, "homoscedastic variance scalar");
  iv_cmd->add_option("--alpha", iv_alpha, "band level (0,1)");
  iv_cmd->add_option("--out", iv_out, "output surface file");
  iv_cmd->add_flag("--clamp-negative", iv_clamp, "truncate negative variance values at zero");

  std::string sy_name, sy_out = "synth.tsv", sy_truth;
  std::int64_t sy_n = 0;
  std::uint64_t sy_seed = 0;
  auto* sy_cmd = app.add_subcommand("synth", "generate a reference dataset");
  sy_cmd->add_option("--name", sy_name, "sinc, bessel1, cubic-hetero, peaks3")->required();
  sy_cmd->add_option("--n", sy_n, "sample count (0 = generator default)");
  sy_cmd->add_option("--seed", sy_seed, "random seed");
  sy_cmd->add_option("--out", sy_out, "output table");
  sy_cmd->add_option("--truth-out", sy_truth, "also write noiseless truth table");

  CliRun bench_run;
  std::string bench_sizes = "1000,10000,100000,1000000,10000000";
  std::string bench_out = "bench.tsv";
  double bench_h = 0.05, bench_budget_gb = 8.0;
  int bench_reps = 10;
  std::int64_t bench_cap = 10000;
  auto* bench_cmd = app.add_subcommand("bench", "fixed-bandwidth scaling harness");
  bench_cmd->add_option("--sizes", bench_sizes, "sample sizes, comma separated");
  bench_cmd->add_option("--bandwidth", bench_h, "fixed normalized bandwidth");
  bench_cmd->add_option("--reps", bench_reps, "repetitions per size (median reported)");
  bench_cmd->add_option("--out", bench_out, "output table");
  bench_cmd->add_option("--oracle-cap", bench_cap, "largest size checked against the direct sum");
  bench_cmd->add_option("--mem-budget-gb", bench_budget_gb, "refuse sizes beyond this estimate");
  bench_cmd->add_option("--m", bench_run.m_spec, "grid nodes");
  bench_cmd->add_option("--accuracy", bench_run.cfg.accuracy, "gridding digits")
      ->check(CLI::Range(1, 12));
  bench_cmd->add_flag("!--no-deconv", bench_run.cfg.nufft_deconv, "skip deconvolution");
  bench_cmd->add_option("--order", bench_run.cfg.order, "local polynomial order");
  bench_cmd->add_option("--kernel", bench_run.cfg.kernel_type, "kernel family");
  bench_cmd->add_option("--seed", bench_run.cfg.seed, "random seed");

  try {
    app.parse(argc, argv);

    if (fit_cmd->parsed()) return do_fit(fit_run, true);
    if (curve_cmd->parsed()) return do_fit(curve_run, false);

    if (pr_cmd->parsed()) {
      auto surface = krg::surface_from_file(krg::load_surface_file(pr_surface));
      auto queries = krg::load_table(pr_data);
      if (queries.dims != surface.grid.dims)
        throw krg::InputError("query dimension does not match the surface");
      krg::InterpPolicy policy;
      policy.interior = krg::interp_method_from_name(pr_interp);
      policy.exterior = krg::extrap_method_from_name(pr_extrap);
      policy.constant_value = pr_fill;
      auto preds = krg::predict(surface, queries.x.data(), queries.count(), policy);

      std::vector<std::string> names;
      std::vector<const std::vector<double>*> cols;
      std::vector<std::vector<double>> loc_cols(static_cast<std::size_t>(queries.dims));
      for (int j = 0; j < queries.dims; ++j) {
        auto& col = loc_cols[static_cast<std::size_t>(j)];
        col.resize(static_cast<std::size_t>(queries.count()));
        for (std::int64_t i = 0; i < queries.count(); ++i)
          col[static_cast<std::size_t>(i)] = queries.loc(i, j);
        names.push_back(queries.dims == 1 ? "x" : "x" + std::to_string(j + 1));
        cols.push_back(&col);
      }
      for (std::size_t c = 0; c < preds.size(); ++c) {
        names.push_back(surface.column_names[c]);
        cols.push_back(&preds[c]);
      }
      krg::write_columns(pr_out, names, cols);
      std::printf("predictions: %s\n", pr_out.c_str());
      return 0;
    }

    if (iv_cmd->parsed()) {
      auto mean_sf = krg::load_surface_file(iv_mean);
      auto mean = krg::surface_from_file(mean_sf);
      if (mean.values.empty()) throw krg::InputError("mean surface has no value fields");

      krg::SurfaceFile out;
      out.grid = mean.grid;
      out.meta["content"] = "interval";
      out.meta["alpha"] = std::to_string(iv_alpha);

      krg::SurfaceFile var_sf;
      int var_field = -1;
      if (!iv_var.empty()) {
        var_sf = krg::load_surface_file(iv_var);
        var_field = var_sf.field("sigma2");
        if (var_field < 0) throw krg::InputError("variance surface has no sigma2 field");
        if (var_sf.grid.m != mean.grid.m)
          throw krg::InputError("variance surface lives on a different grid");
      }

      for (std::size_t c = 0; c < mean.values.size(); ++c) {
        krg::IntervalBand band;
        if (var_field >= 0) {
          band = krg::confidence_interval(mean, static_cast<int>(c),
                                          var_sf.fields[static_cast<std::size_t>(var_field)],
                                          iv_alpha, iv_clamp);
        } else if (iv_sigma2 >= 0.0) {
          band = krg::confidence_interval(mean, static_cast<int>(c), iv_sigma2, iv_alpha);
        } else {
          throw krg::InputError("interval needs --variance or --sigma2");
        }
        const auto& name = mean.column_names[c];
        out.add(name, mean.values[c]);
        out.add(name + "_lower", band.lower);
        out.add(name + "_upper", band.upper);
      }
      krg::write_surface_file(iv_out, out);
      std::printf("interval: %s\n", iv_out.c_str());
      return 0;
    }

    if (sy_cmd->parsed()) {
      auto data = krg::synth_generate(sy_name, sy_n, sy_seed);
      std::vector<std::string> names;
      std::vector<const std::vector<double>*> cols;
      std::vector<std::vector<double>> loc_cols(static_cast<std::size_t>(data.samples.dims));
      for (int j = 0; j < data.samples.dims; ++j) {
        auto& col = loc_cols[static_cast<std::size_t>(j)];
        col.resize(static_cast<std::size_t>(data.samples.count()));
        for (std::int64_t i = 0; i < data.samples.count(); ++i)
          col[static_cast<std::size_t>(i)] = data.samples.loc(i, j);
        names.push_back(data.samples.dims == 1 ? "x" : "x" + std::to_string(j + 1));
        cols.push_back(&col);
      }
      for (const auto& col : data.samples.responses) {
        names.push_back(col.name);
        cols.push_back(&col.re);
      }
      krg::write_columns(sy_out, names, cols);
      std::printf("data: %s (%lld rows)\n", sy_out.c_str(),
                  static_cast<long long>(data.samples.count()));

      if (!sy_truth.empty()) {
        std::vector<std::string> tnames = names;
        std::vector<const std::vector<double>*> tcols = cols;
        for (std::size_t c = 0; c < data.truth_re.size(); ++c)
          tcols[loc_cols.size() + c] = &data.truth_re[c];
        if (!data.sigma2.empty()) {
          tnames.push_back("sigma2");
          tcols.push_back(&data.sigma2);
        }
        krg::write_columns(sy_truth, tnames, tcols);
        std::printf("truth: %s\n", sy_truth.c_str());
      }
      return 0;
    }

    if (bench_cmd->parsed()) {
      if (!bench_run.m_spec.empty()) bench_run.cfg.m_override = parse_int_list(bench_run.m_spec);
      auto sizes = parse_int_list(bench_sizes);
      auto rows = krg::run_bench(sizes, bench_run.cfg, bench_h, bench_reps, bench_cap,
                                 bench_budget_gb * 1024.0 * 1024.0 * 1024.0);
      krg::write_bench_table(bench_out, rows);
      std::printf("bench: %s\n", bench_out.c_str());
      return 0;
    }

    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const krg::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const krg::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const krg::ResourceError& e) {
    std::fprintf(stderr, "resource error: %s\n", e.what());
    return 4;
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "resource error: out of memory\n");
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
