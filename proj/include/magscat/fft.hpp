#pragma once

#include <complex>
#include <cstddef>

#include "magscat/grid.hpp"

namespace magscat {

using cplx = std::complex<double>;

// In-place complex FFT plans for one grid shape. FFTW plan creation is
// serialized behind a global mutex; execution is safe as long as each
// thread uses its own workspace (see workspace_for()). Plans use
// FFTW_ESTIMATE so transform results are reproducible across runs.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const Grid& grid);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  // Unnormalized forward DFT, in place.
  void forward(cplx* data) const;
  // Inverse DFT scaled by 1/size, so backward(forward(x)) == x.
  void backward(cplx* data) const;

  int dim() const { return dim_; }
  int n_per_axis() const { return n_; }
  std::size_t size() const { return size_; }

 private:
  int dim_;
  int n_;
  std::size_t size_;
  void* plan_fwd_;  // fftw_plan
  void* plan_bwd_;
};

// Thread-local cached workspace for the grid's shape. Each thread builds
// its own plans on first use; safe for concurrent independent jobs.
SpectralWorkspace& workspace_for(const Grid& grid);

}  // namespace magscat
