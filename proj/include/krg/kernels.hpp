#pragma once

#include <string>
#include <vector>

namespace krg {

enum class KernelFamily { gaussian, epanechnikov, box, triangle };

KernelFamily kernel_family_from_name(const std::string& name);
std::string kernel_family_name(KernelFamily f);

// Normalized one-dimensional base kernel (integrates to 1).
double kernel1d(KernelFamily f, double u);

// Radius beyond which the base kernel is numerically zero, in base units.
// Exact support for the compact families; for the Gaussian the point where
// the tail drops below double precision.
double kernel_radius(KernelFamily f);

// Product kernel with a per-axis bandwidth acting as a variance:
//   K_h(u) = prod_j h_j^{-1/2} k(u_j / sqrt(h_j))
// so the per-axis length scale is sqrt(h_j). Bandwidths live on the
// unit-standard-deviation coordinate scale recorded in the grid.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  std::vector<double> h;

  void validate(int dims) const;
  double scale(int j) const;  // sqrt(h_j)
};

}  // namespace krg
