#include "krg/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "krg/errors.hpp"
#include "krg/rng.hpp"

namespace krg {
namespace {

constexpr std::int64_t kMaxCandidates = 10000;

std::vector<double> rule_values(const HlistRule& rule) {
  if (rule.n < 1) throw InputError("bandwidth list needs at least one entry");
  if (!(rule.lo > 0.0)) throw InputError("bandwidth range must be positive");
  if (rule.n > 1 && !(rule.hi > rule.lo))
    throw InputError("bandwidth range must satisfy hi > lo");
  std::vector<double> out(static_cast<std::size_t>(rule.n));
  if (rule.n == 1) {
    out[0] = rule.lo;
    return out;
  }
  const double a = rule.log ? std::log(rule.lo) : rule.lo;
  const double b = rule.log ? std::log(rule.hi) : rule.hi;
  for (int i = 0; i < rule.n; ++i) {
    const double t = a + (b - a) * static_cast<double>(i) / static_cast<double>(rule.n - 1);
    out[static_cast<std::size_t>(i)] = rule.log ? std::exp(t) : t;
  }
  out.front() = rule.lo;  // endpoints exact
  out.back() = rule.hi;
  return out;
}

TraceEstimate trace_from_predictions(const std::vector<std::vector<double>>& preds, int first_col,
                                     const std::vector<std::vector<double>>& probes) {
  TraceEstimate te;
  const int np = static_cast<int>(probes.size());
  te.trials.resize(static_cast<std::size_t>(np));
  for (int t = 0; t < np; ++t) {
    const auto& w = probes[static_cast<std::size_t>(t)];
    const auto& wh = preds[static_cast<std::size_t>(first_col + t)];
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      num += w[i] * (w[i] - wh[i]);
      den += w[i] * w[i];
    }
    te.trials[static_cast<std::size_t>(t)] = num / den;
  }
  double mean = 0.0;
  for (double r : te.trials) mean += r;
  mean /= static_cast<double>(np);
  double var = 0.0;
  for (double r : te.trials) var += (r - mean) * (r - mean);
  te.ratio = mean;
  te.ratio_std = np > 1 ? std::sqrt(var / static_cast<double>(np - 1)) : 0.0;
  te.dof = static_cast<double>(probes.front().size()) * (1.0 - mean);
  te.valid = std::isfinite(mean) && mean > 0.0;
  return te;
}

std::vector<std::vector<double>> draw_probes(int np, std::uint64_t seed, std::int64_t n) {
  if (np < 1) throw InputError("the trace estimator needs at least one probe");
  std::vector<std::vector<double>> probes(static_cast<std::size_t>(np),
                                          std::vector<double>(static_cast<std::size_t>(n)));
  for (int t = 0; t < np; ++t)
    for (std::int64_t i = 0; i < n; ++i)
      probes[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] =
          rng::normal(seed, static_cast<std::uint64_t>(t) + 1, static_cast<std::uint64_t>(i));
  return probes;
}

void validate_candidates(const BandwidthGrid& hlist, int dims) {
  if (hlist.candidates.empty()) throw InputError("empty bandwidth grid");
  for (const auto& h : hlist.candidates) {
    if (static_cast<int>(h.size()) != dims)
      throw InputError("bandwidth candidates must match the sample dimension");
    for (double v : h)
      if (!(v > 0.0)) throw InputError("bandwidths must be positive");
  }
}

// Drops the trailing probe columns so retained surfaces carry only the
// actual responses.
void trim_columns(FitSurface& surface, int keep) {
  surface.values.resize(static_cast<std::size_t>(keep));
  surface.column_names.resize(static_cast<std::size_t>(keep));
}

}  // namespace

std::vector<double> BandwidthGrid::h_max() const {
  if (candidates.empty()) throw InputError("empty bandwidth grid");
  std::vector<double> out(candidates.front().size(), 0.0);
  for (const auto& h : candidates)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::max(out[j], h[j]);
  return out;
}

BandwidthGrid hlist_from_values(std::vector<std::vector<double>> per_axis) {
  if (per_axis.empty()) throw InputError("bandwidth list needs at least one axis");
  for (const auto& axis : per_axis) {
    if (axis.empty()) throw InputError("bandwidth list needs at least one entry");
    for (std::size_t i = 0; i < axis.size(); ++i) {
      if (!(axis[i] > 0.0)) throw InputError("bandwidths must be positive");
      if (i > 0 && !(axis[i] > axis[i - 1]))
        throw InputError("bandwidth lists must be strictly increasing");
    }
  }

  BandwidthGrid grid;
  grid.per_axis = std::move(per_axis);
  const std::size_t d = grid.per_axis.size();
  bool joint = true;
  for (const auto& axis : grid.per_axis)
    joint = joint && axis.size() == grid.per_axis.front().size();

  if (joint) {
    grid.cartesian = false;
    const std::size_t n = grid.per_axis.front().size();
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> h(d);
      for (std::size_t j = 0; j < d; ++j) h[j] = grid.per_axis[j][i];
      grid.candidates.push_back(std::move(h));
    }
    return grid;
  }

  grid.cartesian = true;
  std::int64_t total = 1;
  for (const auto& axis : grid.per_axis) {
    total *= static_cast<std::int64_t>(axis.size());
    if (total > kMaxCandidates)
      throw InputError("cartesian bandwidth sweep exceeds 10000 candidates");
  }
  // Row-major sweep, last axis fastest, so "later" still means larger.
  std::vector<std::size_t> idx(d, 0);
  for (std::int64_t c = 0; c < total; ++c) {
    std::vector<double> h(d);
    for (std::size_t j = 0; j < d; ++j) h[j] = grid.per_axis[j][idx[j]];
    grid.candidates.push_back(std::move(h));
    for (std::size_t j = d; j-- > 0;) {
      if (++idx[j] < grid.per_axis[j].size()) break;
      idx[j] = 0;
    }
  }
  return grid;
}

BandwidthGrid make_hlist(const std::vector<HlistRule>& rules) {
  std::vector<std::vector<double>> per_axis;
  per_axis.reserve(rules.size());
  for (const auto& rule : rules) per_axis.push_back(rule_values(rule));
  return hlist_from_values(std::move(per_axis));
}

double gcv_score(double sse, double trace_ratio, double n) {
  if (!(trace_ratio > 0.0)) throw InputError("trace ratio must be positive");
  if (!(n >= 1.0)) throw InputError("sample count must be at least 1");
  return (sse / n) / (trace_ratio * trace_ratio);
}

int select_bandwidth(const std::vector<double>& gcv, const std::vector<std::uint8_t>& valid,
                     double dstd) {
  if (gcv.size() != valid.size()) throw InputError("mismatched selection inputs");
  if (dstd < 0.0) throw InputError("dstd must be nonnegative");
  double best = std::numeric_limits<double>::infinity();
  int count = 0;
  for (std::size_t i = 0; i < gcv.size(); ++i) {
    if (!valid[i] || !std::isfinite(gcv[i])) continue;
    best = std::min(best, gcv[i]);
    ++count;
  }
  if (count == 0) throw NumericError("no valid bandwidth candidate to select");

  double threshold = best;
  if (dstd > 0.0 && count > 1) {
    double mean = 0.0;
    for (std::size_t i = 0; i < gcv.size(); ++i)
      if (valid[i] && std::isfinite(gcv[i])) mean += gcv[i];
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (std::size_t i = 0; i < gcv.size(); ++i)
      if (valid[i] && std::isfinite(gcv[i])) var += (gcv[i] - mean) * (gcv[i] - mean);
    threshold = best + dstd * std::sqrt(var / static_cast<double>(count - 1));
  }

  int pick = -1;  // last qualifying index: ties and the relaxed rule go to the larger bandwidth
  for (std::size_t i = 0; i < gcv.size(); ++i)
    if (valid[i] && std::isfinite(gcv[i]) && gcv[i] <= threshold) pick = static_cast<int>(i);
  return pick;
}

CvResult cv_fit(const SampleSet& samples, const GridOptions& gopt, KernelFamily family,
                const BandwidthGrid& hlist, const FitConfig& fcfg, const CvOptions& copt) {
  samples.validate();
  validate_candidates(hlist, samples.dims);

  CvResult res;
  res.grid = engine_grid(samples, gopt, family, hlist.h_max());
  const std::int64_t n = samples.count();
  const bool trace_on = copt.calc_dof;

  std::vector<std::vector<double>> probes;
  if (trace_on) probes = draw_probes(copt.np, copt.seed, n);
  auto gs = grid_samples_with_extras(samples, res.grid, fcfg, probes, &res.stats);
  if (trace_on) ++res.stats.fmc_passes;

  const auto layout = ColumnLayout::from(samples);
  const int q_real = layout.real_count;
  const auto n_cand = static_cast<int>(hlist.candidates.size());
  const auto n_resp = layout.entries.size();
  const bool keep = copt.keep_all || !trace_on;

  CvReport& rep = res.report;
  rep.np = trace_on ? copt.np : 0;
  rep.seed = copt.seed;
  rep.dstd = copt.dstd;
  rep.n = n;
  rep.candidates.resize(static_cast<std::size_t>(n_cand));
  rep.responses.resize(n_resp);
  for (std::size_t r = 0; r < n_resp; ++r) {
    auto& resp = rep.responses[r];
    resp.name = layout.entries[r].name;
    resp.is_complex = layout.entries[r].is_complex;
    resp.mse.assign(static_cast<std::size_t>(n_cand), std::numeric_limits<double>::quiet_NaN());
    resp.gcv.assign(static_cast<std::size_t>(n_cand), std::numeric_limits<double>::quiet_NaN());
    resp.valid.assign(static_cast<std::size_t>(n_cand), 0);
  }

  for (int c = 0; c < n_cand; ++c) {
    const KernelSpec kernel{family, hlist.candidates[static_cast<std::size_t>(c)]};
    auto surface = fit_gridded(gs, kernel, fcfg, &res.stats);
    auto preds = predict(surface, samples.x.data(), n, copt.interp);

    auto& cand = rep.candidates[static_cast<std::size_t>(c)];
    cand.h = kernel.h;
    cand.undersmoothed = surface.undersmoothed;
    if (trace_on) cand.trace = trace_from_predictions(preds, q_real, probes);

    for (std::size_t r = 0; r < n_resp; ++r) {
      const auto& e = layout.entries[r];
      const auto& col = samples.responses[r];
      double sse = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        const double dr = col.re[static_cast<std::size_t>(i)] -
                          preds[static_cast<std::size_t>(e.re_col)][static_cast<std::size_t>(i)];
        sse += dr * dr;
      }
      if (e.is_complex)
        for (std::int64_t i = 0; i < n; ++i) {
          const double di = col.im[static_cast<std::size_t>(i)] -
                            preds[static_cast<std::size_t>(e.im_col)][static_cast<std::size_t>(i)];
          sse += di * di;
        }
      auto& resp = rep.responses[r];
      resp.mse[static_cast<std::size_t>(c)] = sse / static_cast<double>(n);
      if (trace_on && cand.trace.valid && std::isfinite(sse)) {
        resp.gcv[static_cast<std::size_t>(c)] =
            gcv_score(sse, cand.trace.ratio, static_cast<double>(n));
        resp.valid[static_cast<std::size_t>(c)] = 1;
      }
    }

    if (keep) {
      trim_columns(surface, q_real);
      res.all.push_back(std::move(surface));
    }
  }

  if (!trace_on) {
    for (auto& resp : rep.responses) resp.selected = -1;
    return res;
  }

  for (auto& resp : rep.responses) {
    try {
      resp.selected = select_bandwidth(resp.gcv, resp.valid, copt.dstd);
    } catch (const std::exception& ex) {
      resp.failed = true;
      resp.error = ex.what();
      resp.selected = -1;
    }
  }

  // Refit once per distinct winning bandwidth (responses only, no probes),
  // then hand each response its own column(s).
  std::map<int, FitSurface> winners;
  for (const auto& resp : rep.responses) {
    if (resp.selected < 0 || winners.count(resp.selected)) continue;
    if (keep) {
      winners[resp.selected] = res.all[static_cast<std::size_t>(resp.selected)];
    } else {
      GriddedSamples trimmed;
      trimmed.grid = gs.grid;
      trimmed.spread = gs.spread;
      trimmed.gc = gs.gc;
      trimmed.n = gs.n;
      trimmed.column_hat.assign(gs.column_hat.begin(), gs.column_hat.begin() + q_real);
      trimmed.column_names.assign(gs.column_names.begin(), gs.column_names.begin() + q_real);
      trimmed.density_hat = gs.density_hat;
      const KernelSpec kernel{family, hlist.candidates[static_cast<std::size_t>(resp.selected)]};
      winners[resp.selected] = fit_gridded(trimmed, kernel, fcfg, &res.stats);
    }
  }

  res.selected.resize(n_resp);
  for (std::size_t r = 0; r < n_resp; ++r) {
    const auto& resp = rep.responses[r];
    if (resp.selected < 0) continue;
    const auto& e = layout.entries[r];
    const FitSurface& src = winners.at(resp.selected);
    FitSurface& dst = res.selected[r];
    dst.grid = src.grid;
    dst.kernel = src.kernel;
    dst.order = src.order;
    dst.solved = src.solved;
    dst.masked_count = src.masked_count;
    dst.rank_fallback_count = src.rank_fallback_count;
    dst.undersmoothed = src.undersmoothed;
    dst.values.push_back(src.values[static_cast<std::size_t>(e.re_col)]);
    dst.column_names.push_back(src.column_names[static_cast<std::size_t>(e.re_col)]);
    if (e.is_complex) {
      dst.values.push_back(src.values[static_cast<std::size_t>(e.im_col)]);
      dst.column_names.push_back(src.column_names[static_cast<std::size_t>(e.im_col)]);
    }
  }
  return res;
}

std::vector<TraceEstimate> fmc_trace(const SampleSet& samples, const GridOptions& gopt,
                                     KernelFamily family, const BandwidthGrid& hlist,
                                     const FitConfig& fcfg, const CvOptions& copt,
                                     RunStats* stats) {
  SampleSet locations;
  locations.dims = samples.dims;
  locations.x = samples.x;
  locations.validate();
  validate_candidates(hlist, locations.dims);

  RunStats local;
  RunStats* st = stats ? stats : &local;
  const GridSpec grid = engine_grid(locations, gopt, family, hlist.h_max());
  const std::int64_t n = locations.count();
  auto probes = draw_probes(copt.np, copt.seed, n);
  auto gs = grid_samples_with_extras(locations, grid, fcfg, probes, st);
  ++st->fmc_passes;

  std::vector<TraceEstimate> out;
  out.reserve(hlist.candidates.size());
  for (const auto& h : hlist.candidates) {
    const KernelSpec kernel{family, h};
    auto surface = fit_gridded(gs, kernel, fcfg, st);
    auto preds = predict(surface, locations.x.data(), n, copt.interp);
    out.push_back(trace_from_predictions(preds, 0, probes));
  }
  return out;
}

}  // namespace krg
