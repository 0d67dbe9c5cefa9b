#include "sims/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace sims::fft {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per (size, direction) under a lock and never destroyed.
class PlanCache {
 public:
  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* a = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* b = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(a);
    fftw_free(b);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(std::span<const cd> in, std::span<cd> out, int sign) {
  if (in.size() != out.size()) throw InvalidArgument("fft: input/output length mismatch");
  if (in.empty()) return;
  if (static_cast<const void*>(in.data()) == static_cast<const void*>(out.data())) {
    throw InvalidArgument("fft: in-place transforms are not supported");
  }
  fftw_plan p = cache().get(static_cast<int>(in.size()), sign);
  // fftw_complex is layout-compatible with std::complex<double>.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cd*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(p, src, dst);
}

}  // namespace

void forward(std::span<const cd> in, std::span<cd> out) { run(in, out, FFTW_FORWARD); }
void inverse(std::span<const cd> in, std::span<cd> out) { run(in, out, FFTW_BACKWARD); }

CVec forward(std::span<const cd> in) {
  CVec out(in.size());
  forward(in, out);
  return out;
}

CVec inverse(std::span<const cd> in) {
  CVec out(in.size());
  inverse(in, out);
  return out;
}

}  // namespace sims::fft
