#include "magscat/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace magscat {

Grid::Grid(int dim, int points_per_axis, double half_width)
    : dim_(dim), n_(points_per_axis), half_width_(half_width) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("Grid: dimension must be 1 or 2, got " + std::to_string(dim));
  if (points_per_axis < 8 || points_per_axis % 2 != 0)
    throw std::invalid_argument("Grid: points-per-axis must be even and >= 8, got " +
                                std::to_string(points_per_axis));
  if (!(half_width > 0.0))
    throw std::invalid_argument("Grid: half-width must be positive");

  spacing_ = 2.0 * half_width_ / n_;
  size_ = 1;
  for (int d = 0; d < dim_; ++d) size_ *= static_cast<std::size_t>(n_);
  cell_volume_ = std::pow(spacing_, dim_);
  kmax_ = M_PI * n_ / (2.0 * half_width_);

  coords_.resize(static_cast<std::size_t>(n_));
  waven_.resize(static_cast<std::size_t>(n_));
  const double dk = M_PI / half_width_;
  for (int j = 0; j < n_; ++j) {
    coords_[static_cast<std::size_t>(j)] = -half_width_ + j * spacing_;
    const int m = (j < n_ / 2) ? j : j - n_;
    waven_[static_cast<std::size_t>(j)] = dk * m;
  }
}

std::array<double, 2> Grid::point(std::size_t flat) const {
  if (dim_ == 1) return {coords_[flat], 0.0};
  const std::size_t nn = static_cast<std::size_t>(n_);
  return {coords_[flat / nn], coords_[flat % nn]};
}

std::array<double, 2> Grid::wavevector(std::size_t flat) const {
  if (dim_ == 1) return {waven_[flat], 0.0};
  const std::size_t nn = static_cast<std::size_t>(n_);
  return {waven_[flat / nn], waven_[flat % nn]};
}

double Grid::k_squared(std::size_t flat) const {
  const auto k = wavevector(flat);
  return k[0] * k[0] + k[1] * k[1];
}

GridPtr make_grid(int dim, int points_per_axis, double half_width) {
  return std::make_shared<const Grid>(dim, points_per_axis, half_width);
}

}  // namespace magscat
