#include "magscat/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace magscat {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

SpectralWorkspace::SpectralWorkspace(const Grid& grid)
    : dim_(grid.dim()), n_(grid.n_per_axis()), size_(grid.size()) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_complex* buf = fftw_alloc_complex(size_);
  if (!buf) throw std::bad_alloc();
  if (dim_ == 1) {
    plan_fwd_ = fftw_plan_dft_1d(n_, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft_1d(n_, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  } else {
    plan_fwd_ = fftw_plan_dft_2d(n_, n_, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft_2d(n_, n_, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  fftw_free(buf);
  if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("SpectralWorkspace: fftw_plan failed");
}

SpectralWorkspace::~SpectralWorkspace() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void SpectralWorkspace::forward(cplx* data) const {
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

void SpectralWorkspace::backward(cplx* data) const {
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
  const double inv = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i) data[i] *= inv;
}

SpectralWorkspace& workspace_for(const Grid& grid) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<SpectralWorkspace>> cache;
  const auto key = std::make_pair(grid.dim(), grid.n_per_axis());
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<SpectralWorkspace>(grid)).first;
  return *it->second;
}

}  // namespace magscat
