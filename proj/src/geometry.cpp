#include "fluidbeam/geometry.hpp"

#include "fluidbeam/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace fluidbeam
{

namespace
{

std::vector<double> centered_axis(std::size_t count, double spacing)
{
  std::vector<double> axis(count);
  const double center = (static_cast<double>(count) - 1.0) / 2.0;
  for (std::size_t i = 0; i < count; ++i)
    axis[i] = (static_cast<double>(i) - center) * spacing;
  return axis;
}

// Samples of [-pi/2, pi/2] with both endpoints, symmetric about zero: the
// middle sample of an odd count is exactly 0 and angle[i] == -angle[n-1-i].
std::vector<double> half_circle_axis(std::size_t count)
{
  std::vector<double> axis(count);
  const double step = std::numbers::pi / static_cast<double>(count - 1);
  const double center = (static_cast<double>(count) - 1.0) / 2.0;
  for (std::size_t i = 0; i < count; ++i)
    axis[i] = (static_cast<double>(i) - center) * step;
  axis.front() = -std::numbers::pi / 2.0;
  axis.back() = std::numbers::pi / 2.0;
  return axis;
}

} // namespace

Point2 PortGrid::position(PortIndex l) const
{
  if (l >= positions_.size())
    throw ParameterError("port index " + std::to_string(l) + " out of range (L = " +
                         std::to_string(positions_.size()) + ")");
  return positions_[l];
}

PortIndex PortGrid::index(std::size_t m, std::size_t n) const
{
  if (m >= rows_ || n >= cols_)
    throw ParameterError("lattice coordinate out of range");
  return m + n * rows_;
}

LatticeCoord PortGrid::coord(PortIndex l) const
{
  if (l >= size())
    throw ParameterError("port index " + std::to_string(l) + " out of range (L = " + std::to_string(size()) +
                         ")");
  return {l % rows_, l / rows_};
}

double PortGrid::distance(PortIndex a, PortIndex b) const
{
  const auto ca = coord(a);
  const auto cb = coord(b);
  const double dm = static_cast<double>(ca.m) - static_cast<double>(cb.m);
  const double dn = static_cast<double>(ca.n) - static_cast<double>(cb.n);
  return spacing_ * std::sqrt(dm * dm + dn * dn);
}

double PortGrid::aperture_x() const noexcept
{
  return static_cast<double>(rows_ - 1) * spacing_;
}

double PortGrid::aperture_y() const noexcept
{
  return static_cast<double>(cols_ - 1) * spacing_;
}

PortGrid build_port_grid(std::size_t rows, std::size_t cols, double spacing, double wavelength)
{
  if (rows == 0 || cols == 0)
    throw ParameterError("port grid needs at least one row and one column");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw ParameterError("port spacing must be positive");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw ParameterError("wavelength must be positive");

  PortGrid grid;
  grid.rows_ = rows;
  grid.cols_ = cols;
  grid.spacing_ = spacing;
  grid.wavelength_ = wavelength;
  grid.xs_ = centered_axis(rows, spacing);
  grid.ys_ = centered_axis(cols, spacing);
  grid.positions_.reserve(rows * cols);
  for (std::size_t n = 0; n < cols; ++n)
    for (std::size_t m = 0; m < rows; ++m)
      grid.positions_.push_back({grid.xs_[m], grid.ys_[n]});
  return grid;
}

AngularGrid build_angular_grid(std::size_t azimuth_count, std::size_t elevation_count)
{
  if (azimuth_count < 2 || elevation_count < 2)
    throw ParameterError("angular grid needs at least 2 samples per axis");
  AngularGrid grid;
  grid.phi_ = half_circle_axis(azimuth_count);
  grid.theta_ = half_circle_axis(elevation_count);
  return grid;
}

double pairwise_min_distance(const PortGrid& grid, std::span<const PortIndex> indices)
{
  if (indices.empty())
    throw ParameterError("pairwise_min_distance needs at least one port");
  for (auto l : indices)
    if (l >= grid.size())
      throw ParameterError("port index " + std::to_string(l) + " out of range");

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < indices.size(); ++i)
    for (std::size_t j = i + 1; j < indices.size(); ++j)
      best = std::min(best, grid.distance(indices[i], indices[j]));
  return best;
}

} // namespace fluidbeam
