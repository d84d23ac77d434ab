#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fluidbeam
{

using PortIndex = std::size_t;

struct Point2
{
  double x = 0.0;
  double y = 0.0;
};

struct LatticeCoord
{
  std::size_t m = 0; // row, along x
  std::size_t n = 0; // column, along y
};

// Regular M x N lattice of selectable antenna positions, centered at the
// origin. Port (m, n) sits at ((m - (M-1)/2) d, (n - (N-1)/2) d).
//
// Ports are enumerated column-major, l = m + n*M, the same stacking order
// used for angular samples so that every flattened quantity in the library
// follows one convention.
class PortGrid
{
public:
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  double spacing() const noexcept { return spacing_; }
  double wavelength() const noexcept { return wavelength_; }

  double x(std::size_t m) const noexcept { return xs_[m]; }
  double y(std::size_t n) const noexcept { return ys_[n]; }
  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> ys() const noexcept { return ys_; }

  Point2 position(PortIndex l) const;
  const std::vector<Point2>& positions() const noexcept { return positions_; }

  PortIndex index(std::size_t m, std::size_t n) const;
  LatticeCoord coord(PortIndex l) const;

  // Euclidean distance, evaluated from integer lattice offsets so that
  // multiples of the spacing are exact.
  double distance(PortIndex a, PortIndex b) const;

  // Edge lengths of the occupied aperture, (M-1) d and (N-1) d.
  double aperture_x() const noexcept;
  double aperture_y() const noexcept;

private:
  friend PortGrid build_port_grid(std::size_t, std::size_t, double, double);
  PortGrid() = default;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double spacing_ = 0.0;
  double wavelength_ = 0.0;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<Point2> positions_;
};

/// Builds a centered port lattice. `spacing` and `wavelength` are in meters.
/// Throws ParameterError on a zero dimension or non-positive length.
PortGrid build_port_grid(std::size_t rows, std::size_t cols, double spacing, double wavelength);

// Uniform P x Q sampling of azimuth phi and elevation theta, both spanning
// [-pi/2, pi/2] inclusive of the endpoints. Sample z = p + q*P.
class AngularGrid
{
public:
  std::size_t azimuth_count() const noexcept { return phi_.size(); }
  std::size_t elevation_count() const noexcept { return theta_.size(); }
  std::size_t size() const noexcept { return phi_.size() * theta_.size(); }

  double phi(std::size_t p) const noexcept { return phi_[p]; }
  double theta(std::size_t q) const noexcept { return theta_[q]; }
  std::span<const double> azimuth() const noexcept { return phi_; }
  std::span<const double> elevation() const noexcept { return theta_; }

  std::size_t index(std::size_t p, std::size_t q) const noexcept { return p + q * phi_.size(); }

  bool operator==(const AngularGrid&) const = default;

private:
  friend AngularGrid build_angular_grid(std::size_t, std::size_t);
  AngularGrid() = default;

  std::vector<double> phi_;
  std::vector<double> theta_;
};

/// Throws ParameterError when either count is below 2.
AngularGrid build_angular_grid(std::size_t azimuth_count, std::size_t elevation_count);

/// Smallest pairwise distance among the given ports; +infinity for a single
/// port. Throws ParameterError on an empty set or an out-of-range index.
double pairwise_min_distance(const PortGrid& grid, std::span<const PortIndex> indices);

} // namespace fluidbeam
