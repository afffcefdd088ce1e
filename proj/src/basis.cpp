#include "krg/basis.hpp"

#include <algorithm>

#include "krg/errors.hpp"

namespace krg {
namespace {

void enumerate_degree(int dims, int degree, std::vector<int>& prefix,
                      std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == dims - 1) {
    prefix.push_back(degree);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int e = degree; e >= 0; --e) {
    prefix.push_back(e);
    enumerate_degree(dims, degree - e, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int MultiIndexSet::find(const std::vector<int>& alpha) const {
  for (int i = 0; i < size(); ++i)
    if (alphas[static_cast<std::size_t>(i)] == alpha) return i;
  return -1;
}

MultiIndexSet monomial_basis(int dims, int ell) {
  if (dims < 1) throw InputError("basis needs at least one dimension");
  if (ell < 0) throw InputError("polynomial order must be nonnegative");
  MultiIndexSet s;
  s.dims = dims;
  s.max_degree = ell;
  std::vector<int> prefix;
  for (int g = 0; g <= ell; ++g) enumerate_degree(dims, g, prefix, s.alphas);
  return s;
}

}  // namespace krg
