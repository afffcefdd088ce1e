#pragma once

#include <cstdint>
#include <vector>

namespace krg {

// Multi-index set {alpha : |alpha| <= max_degree} in graded order: total
// degree ascending, and within a degree lexicographically by exponent vector
// descending, so for d=2, degree 2 the block runs (2,0), (1,1), (0,2) — the
// half-vectorized layout of the quadratic term.
struct MultiIndexSet {
  int dims = 0;
  int max_degree = 0;
  std::vector<std::vector<int>> alphas;

  int size() const { return static_cast<int>(alphas.size()); }
  // Index of a given exponent vector; -1 when absent.
  int find(const std::vector<int>& alpha) const;
};

std::int64_t binomial(int n, int k);

// Basis for a local fit of total degree ell in d dimensions; the leading
// entry is the constant term and size() == C(d + ell, d).
MultiIndexSet monomial_basis(int dims, int ell);

}  // namespace krg
