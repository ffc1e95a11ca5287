#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace magscat {

// Periodic uniform grid on the box [-L, L)^n, n in {1, 2}, with its FFT
// wavenumber lattice k = (pi/L) * m, m in {0,...,N/2-1, -N/2,...,-1}
// (standard FFT ordering). Immutable after construction; share freely.
class Grid {
 public:
  Grid(int dim, int points_per_axis, double half_width);

  int dim() const { return dim_; }
  int n_per_axis() const { return n_; }
  double half_width() const { return half_width_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return size_; }  // N^dim
  double cell_volume() const { return cell_volume_; }  // h^dim

  // Per-axis coordinate x_j = -L + j*h and FFT-ordered wavenumber.
  double coord(int j) const { return coords_[static_cast<std::size_t>(j)]; }
  double wavenumber(int m) const { return waven_[static_cast<std::size_t>(m)]; }
  const std::vector<double>& coords() const { return coords_; }
  const std::vector<double>& wavenumbers() const { return waven_; }
  double kmax() const { return kmax_; }  // pi*N/(2L), per axis

  // Flattened index (row-major, axis 0 slowest). dim()==1 uses i0 only.
  std::size_t index(int i0, int i1 = 0) const {
    return dim_ == 1 ? static_cast<std::size_t>(i0)
                     : static_cast<std::size_t>(i0) * static_cast<std::size_t>(n_) +
                           static_cast<std::size_t>(i1);
  }
  // Spatial point / wavenumber vector for a flattened index.
  std::array<double, 2> point(std::size_t flat) const;
  std::array<double, 2> wavevector(std::size_t flat) const;
  double k_squared(std::size_t flat) const;

  bool same_as(const Grid& other) const {
    return dim_ == other.dim_ && n_ == other.n_ && half_width_ == other.half_width_;
  }

 private:
  int dim_;
  int n_;
  double half_width_;
  double spacing_;
  std::size_t size_;
  double cell_volume_;
  double kmax_;
  std::vector<double> coords_;
  std::vector<double> waven_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Validates n in {1,2}, N even and >= 8, L > 0; throws std::invalid_argument.
GridPtr make_grid(int dim, int points_per_axis, double half_width);

}  // namespace magscat
