#include "krg/fftwrap.hpp"

#include <fftw3.h>

#include <map>
#include <utility>

#include "krg/errors.hpp"

namespace krg {
namespace {

// Plans are cached per (shape, direction). They are created with
// FFTW_ESTIMATE (deterministic, no measurement noise in reruns) and
// FFTW_UNALIGNED so one plan can execute against any buffer of that shape.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache c;
    return c;
  }

  fftw_plan get(const std::vector<int>& shape, int sign) {
    auto key = std::make_pair(shape, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::int64_t total = 1;
    for (int v : shape) total *= v;
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(total));
    if (!buf) throw ResourceError("transform scratch allocation failed");
    fftw_plan p = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), buf, buf, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw NumericError("transform planning failed");
    plans_.emplace(std::move(key), p);
    return p;
  }

  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::map<std::pair<std::vector<int>, int>, fftw_plan> plans_;
};

void run(NdArray<cplx>& a, int sign) {
  if (a.size() == 0) return;
  std::vector<int> shape(a.shape.size());
  for (std::size_t j = 0; j < shape.size(); ++j) {
    if (a.shape[j] > (1 << 30)) throw ResourceError("transform axis too long");
    shape[j] = static_cast<int>(a.shape[j]);
  }
  fftw_plan p = PlanCache::instance().get(shape, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(a.data.data());
  fftw_execute_dft(p, buf, buf);
}

}  // namespace

void fft_forward(NdArray<cplx>& a) { run(a, FFTW_FORWARD); }
void fft_inverse(NdArray<cplx>& a) { run(a, FFTW_BACKWARD); }

void fft_forward_1d(std::vector<cplx>& a) {
  if (a.empty()) return;
  NdArray<cplx> t;
  t.shape = {static_cast<std::int64_t>(a.size())};
  t.data = std::move(a);
  fft_forward(t);
  a = std::move(t.data);
}

}  // namespace krg
