#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krg/errors.hpp"

namespace krg {

// One observed response column. Complex responses keep their imaginary part
// here and are split into two real columns inside the engine, so complex
// linearity holds exactly.
struct ResponseColumn {
  std::string name;
  bool is_complex = false;
  std::vector<double> re;
  std::vector<double> im;  // empty unless is_complex
};

// Scattered observations: N locations in d dimensions plus q response
// columns over the same locations.
struct SampleSet {
  int dims = 0;
  std::vector<double> x;  // N*dims, row-major
  std::vector<ResponseColumn> responses;
  bool complex_locations = false;  // true when locations came from complex_embed

  std::int64_t count() const {
    return dims == 0 ? 0 : static_cast<std::int64_t>(x.size()) / dims;
  }
  double loc(std::int64_t i, int j) const { return x[static_cast<std::size_t>(i) * dims + j]; }

  void validate() const {
    if (dims <= 0) throw InputError("sample set has no dimensions");
    if (x.size() % static_cast<std::size_t>(dims) != 0)
      throw InputError("location array length is not a multiple of the dimension count");
    const auto n = count();
    if (n < 2) throw InputError("need at least two samples");
    for (const auto& col : responses) {
      if (static_cast<std::int64_t>(col.re.size()) != n ||
          (col.is_complex && static_cast<std::int64_t>(col.im.size()) != n))
        throw InputError("response column '" + col.name + "' length does not match sample count");
    }
  }
};

// Embeds complex locations z as (Re z, Im z) rows; the result always has
// dims == 2. Purely real inputs are not rejected here: the degenerate
// (zero-extent) imaginary axis is caught by grid construction.
SampleSet complex_embed(const std::vector<double>& z_re, const std::vector<double>& z_im,
                        std::vector<ResponseColumn> responses);

}  // namespace krg
