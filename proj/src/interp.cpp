#include "krg/interp.hpp"

#include <cmath>
#include <string>

#include "krg/errors.hpp"

namespace krg {

InterpMethod interp_method_from_name(const std::string& name) {
  if (name == "multilinear" || name == "linear") return InterpMethod::multilinear;
  if (name == "cubic" || name == "spline") return InterpMethod::cubic;
  throw InputError("unknown interpolation method '" + name + "'");
}

ExtrapMethod extrap_method_from_name(const std::string& name) {
  if (name == "linear") return ExtrapMethod::linear;
  if (name == "nearest") return ExtrapMethod::nearest;
  if (name == "constant") return ExtrapMethod::constant;
  throw InputError("unknown extrapolation method '" + name + "'");
}

std::string interp_method_name(InterpMethod m) {
  return m == InterpMethod::multilinear ? "multilinear" : "cubic";
}
std::string extrap_method_name(ExtrapMethod m) {
  switch (m) {
    case ExtrapMethod::linear: return "linear";
    case ExtrapMethod::nearest: return "nearest";
    default: return "constant";
  }
}

namespace {

constexpr int kMaxTaps = 4;

struct AxisTaps {
  int count = 0;
  std::int64_t idx[kMaxTaps];
  double w[kMaxTaps];
};

// Lagrange weights for `count` uniform nodes starting at `base`, evaluated
// at local coordinate t (node units relative to base).
void lagrange_weights(double t, int count, double* w) {
  for (int a = 0; a < count; ++a) {
    double v = 1.0;
    for (int b = 0; b < count; ++b) {
      if (b == a) continue;
      v *= (t - b) / (a - b);
    }
    w[a] = v;
  }
}

void lagrange_deriv(double t, int count, double* w) {
  for (int a = 0; a < count; ++a) {
    double sum = 0.0;
    for (int c = 0; c < count; ++c) {
      if (c == a) continue;
      double v = 1.0;
      for (int b = 0; b < count; ++b) {
        if (b == a || b == c) continue;
        v *= (t - b) / (a - b);
      }
      sum += v / (a - c);
    }
    w[a] = sum;
  }
}

// Per-axis taps at fractional node coordinate s in [0, m-1] or outside.
// Returns false when the constant-extrapolation path applies.
bool axis_taps(double s, std::int64_t m, const InterpPolicy& policy, AxisTaps& out) {
  // Snap to the nearest node so node queries reproduce stored values
  // exactly even after a lossy original-units round trip.
  const double r = std::round(s);
  if (std::abs(s - r) <= 1e-9 * std::max(1.0, std::abs(s))) s = r;

  const double top = static_cast<double>(m - 1);
  const bool outside = s < 0.0 || s > top;
  if (outside && policy.exterior == ExtrapMethod::constant) return false;

  const int stencil = policy.interior == InterpMethod::cubic ? static_cast<int>(std::min<std::int64_t>(4, m))
                                                             : static_cast<int>(std::min<std::int64_t>(2, m));

  if (outside && policy.exterior == ExtrapMethod::nearest) s = std::clamp(s, 0.0, top);

  double base;
  if (s < 0.0)
    base = 0;
  else if (s > top)
    base = static_cast<double>(m - stencil);
  else {
    // Interior: center the stencil on the containing cell, one-sided at the
    // edges.
    std::int64_t cell = static_cast<std::int64_t>(std::floor(s));
    cell = std::min(cell, m - 2);
    std::int64_t b = policy.interior == InterpMethod::cubic ? cell - 1 : cell;
    b = std::clamp<std::int64_t>(b, 0, m - stencil);
    base = static_cast<double>(b);
  }

  const double t = s - base;
  out.count = stencil;
  for (int a = 0; a < stencil; ++a) out.idx[a] = static_cast<std::int64_t>(base) + a;

  if (s >= 0.0 && s <= top) {
    lagrange_weights(t, stencil, out.w);
    return true;
  }
  // Linear continuation of the edge stencil: value + derivative at the hull
  // times the overshoot.
  const double edge = s < 0.0 ? 0.0 : top - base;
  double wv[kMaxTaps], wd[kMaxTaps];
  lagrange_weights(edge, stencil, wv);
  lagrange_deriv(edge, stencil, wd);
  const double over = s < 0.0 ? s : s - top;
  for (int a = 0; a < stencil; ++a) out.w[a] = wv[a] + over * wd[a];
  return true;
}

}  // namespace

std::vector<double> interpolate_field(const NdArray<double>& field, const GridSpec& grid,
                                      const double* queries, std::int64_t p,
                                      const InterpPolicy& policy) {
  const int d = grid.dims;
  for (int j = 0; j < d; ++j)
    if (field.shape[static_cast<std::size_t>(j)] != grid.m[j])
      throw InputError("field shape does not match the grid");

  const auto strides = field.strides();
  std::vector<double> out(static_cast<std::size_t>(p));
  std::vector<AxisTaps> taps(static_cast<std::size_t>(d));

  for (std::int64_t i = 0; i < p; ++i) {
    bool constant = false;
    for (int j = 0; j < d; ++j) {
      const double s = (queries[i * d + j] - grid.lo[j]) / grid.step[j];
      if (!axis_taps(s, grid.m[j], policy, taps[static_cast<std::size_t>(j)])) {
        constant = true;
        break;
      }
    }
    if (constant) {
      out[static_cast<std::size_t>(i)] = policy.constant_value;
      continue;
    }
    // Tensor-product gather.
    double acc = 0.0;
    std::vector<int> l(static_cast<std::size_t>(d), 0);
    while (true) {
      double w = 1.0;
      std::int64_t at = 0;
      for (int j = 0; j < d; ++j) {
        const auto& t = taps[static_cast<std::size_t>(j)];
        w *= t.w[l[static_cast<std::size_t>(j)]];
        at += t.idx[l[static_cast<std::size_t>(j)]] * strides[j];
      }
      acc += w * field[at];
      int j = d - 1;
      while (j >= 0 && ++l[static_cast<std::size_t>(j)] == taps[static_cast<std::size_t>(j)].count)
        l[static_cast<std::size_t>(j--)] = 0;
      if (j < 0) break;
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

void fill_masked(NdArray<double>& field, const NdArray<std::uint8_t>& solved) {
  if (field.shape != solved.shape) throw InputError("mask shape does not match the field");
  const std::int64_t n = field.size();
  std::vector<std::uint8_t> have(solved.data.begin(), solved.data.end());
  std::int64_t remaining = 0;
  for (std::int64_t i = 0; i < n; ++i)
    if (!have[static_cast<std::size_t>(i)]) ++remaining;
  if (remaining == n) {
    for (std::int64_t i = 0; i < n; ++i) field[i] = 0.0;
    return;
  }

  const auto strides = field.strides();
  const int d = static_cast<int>(field.shape.size());
  std::vector<std::uint8_t> next_have = have;
  while (remaining > 0) {
    std::int64_t filled_now = 0;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
    std::int64_t flat = 0;
    do {
      if (!have[static_cast<std::size_t>(flat)]) {
        double sum = 0.0;
        int cnt = 0;
        for (int j = 0; j < d; ++j) {
          if (idx[j] > 0 && have[static_cast<std::size_t>(flat - strides[j])]) {
            sum += field[flat - strides[j]];
            ++cnt;
          }
          if (idx[j] + 1 < field.shape[static_cast<std::size_t>(j)] &&
              have[static_cast<std::size_t>(flat + strides[j])]) {
            sum += field[flat + strides[j]];
            ++cnt;
          }
        }
        if (cnt > 0) {
          field[flat] = sum / cnt;
          next_have[static_cast<std::size_t>(flat)] = 1;
          ++filled_now;
        }
      }
      ++flat;
    } while (next_index(idx, field.shape));
    have = next_have;
    remaining -= filled_now;
    if (filled_now == 0) break;  // disconnected mask cannot occur on a box, but stay safe
  }
}

}  // namespace krg
