#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

namespace krg {

using cplx = std::complex<double>;

// Dense row-major tensor (last axis fastest), the storage type for all
// gridded fields.
template <typename T>
struct NdArray {
  std::vector<std::int64_t> shape;
  std::vector<T> data;

  NdArray() = default;
  explicit NdArray(std::vector<std::int64_t> s, T fill = T{}) : shape(std::move(s)) {
    data.assign(static_cast<std::size_t>(size_of(shape)), fill);
  }

  static std::int64_t size_of(const std::vector<std::int64_t>& s) {
    std::int64_t n = 1;
    for (auto v : s) n *= v;
    return n;
  }

  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }

  std::vector<std::int64_t> strides() const {
    std::vector<std::int64_t> st(shape.size(), 1);
    for (int j = rank() - 2; j >= 0; --j) st[j] = st[j + 1] * shape[j + 1];
    return st;
  }

  T& operator[](std::int64_t i) { return data[static_cast<std::size_t>(i)]; }
  const T& operator[](std::int64_t i) const { return data[static_cast<std::size_t>(i)]; }

  T& at(const std::vector<std::int64_t>& idx) {
    return data[static_cast<std::size_t>(flat(idx))];
  }
  const T& at(const std::vector<std::int64_t>& idx) const {
    return data[static_cast<std::size_t>(flat(idx))];
  }

  std::int64_t flat(const std::vector<std::int64_t>& idx) const {
    std::int64_t off = 0, stride = 1;
    for (int j = rank() - 1; j >= 0; --j) {
      off += idx[j] * stride;
      stride *= shape[j];
    }
    return off;
  }
};

// Steps a multi-index through a shape in row-major order; returns false after
// the last index.
inline bool next_index(std::vector<std::int64_t>& idx, const std::vector<std::int64_t>& shape) {
  for (int j = static_cast<int>(shape.size()) - 1; j >= 0; --j) {
    if (++idx[j] < shape[j]) return true;
    idx[j] = 0;
  }
  return false;
}

}  // namespace krg
