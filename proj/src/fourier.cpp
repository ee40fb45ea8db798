#include "phaseslope/fourier.hpp"

#include "phaseslope/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

namespace phaseslope {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is, provided buffers share the plan's alignment (fftw_malloc guarantees it).
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    auto* in = static_cast<double*>(fftw_malloc(sizeof(double) * static_cast<std::size_t>(n)));
    auto* out = static_cast<fftw_complex*>(
        fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n / 2 + 1)));
    fftw_plan p = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(n, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [n, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mutex_;
  std::map<int, fftw_plan> plans_;
};

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

struct Scratch {
  int n = 0;
  std::unique_ptr<double, FftwFree> in;
  std::unique_ptr<fftw_complex, FftwFree> out;

  void reserve(int len) {
    if (len == n) return;
    in.reset(static_cast<double*>(fftw_malloc(sizeof(double) * static_cast<std::size_t>(len))));
    out.reset(static_cast<fftw_complex*>(
        fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(len / 2 + 1))));
    n = len;
  }
};

}  // namespace

void dft_into(std::span<const double> x, std::span<std::complex<double>> out) {
  const auto n = static_cast<int>(x.size());
  if (n < 1) throw InputError("dft of an empty sequence");
  if (out.size() != static_cast<std::size_t>(n / 2 + 1)) throw InputError("dft output size mismatch");
  thread_local Scratch scratch;
  scratch.reserve(n);
  fftw_plan plan = PlanCache::instance().get(n);
  std::copy(x.begin(), x.end(), scratch.in.get());
  fftw_execute_dft_r2c(plan, scratch.in.get(), scratch.out.get());
  for (int m = 0; m <= n / 2; ++m)
    out[static_cast<std::size_t>(m)] = {scratch.out.get()[m][0], scratch.out.get()[m][1]};
}

std::vector<std::complex<double>> dft(std::span<const double> x) {
  std::vector<std::complex<double>> out(x.size() / 2 + 1);
  dft_into(x, out);
  return out;
}

}  // namespace phaseslope
