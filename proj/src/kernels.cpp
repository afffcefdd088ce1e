#include "krg/kernels.hpp"

#include <cmath>

#include "krg/errors.hpp"

namespace krg {

KernelFamily kernel_family_from_name(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "epanechnikov") return KernelFamily::epanechnikov;
  if (name == "box") return KernelFamily::box;
  if (name == "triangle") return KernelFamily::triangle;
  throw InputError("unknown kernel family '" + name + "'");
}

std::string kernel_family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::box: return "box";
    case KernelFamily::triangle: return "triangle";
  }
  return "gaussian";
}

double kernel1d(KernelFamily f, double u) {
  switch (f) {
    case KernelFamily::gaussian:
      return 0.39894228040143267794 * std::exp(-0.5 * u * u);
    case KernelFamily::epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelFamily::box:
      return std::abs(u) <= 1.0 ? 0.5 : 0.0;
    case KernelFamily::triangle:
      return std::abs(u) <= 1.0 ? 1.0 - std::abs(u) : 0.0;
  }
  return 0.0;
}

double kernel_radius(KernelFamily f) {
  // exp(-u^2/2) < 1e-17 beyond u = 8.86
  return f == KernelFamily::gaussian ? 9.0 : 1.0;
}

void KernelSpec::validate(int dims) const {
  if (static_cast<int>(h.size()) != dims)
    throw InputError("bandwidth must give one value per dimension");
  for (double v : h)
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("bandwidths must be positive and finite");
}

double KernelSpec::scale(int j) const { return std::sqrt(h[static_cast<std::size_t>(j)]); }

}  // namespace krg
