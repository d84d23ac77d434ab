#pragma once

#include "fluidbeam/beam_spec.hpp"
#include "fluidbeam/geometry.hpp"
#include "fluidbeam/selection.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace fluidbeam
{

/// Spatial-frequency substitution used in the steering phase.
///   Coupled:   u = sin(theta) cos(phi), v = sin(theta) sin(phi)
///   Decoupled: u = sin(theta) cos(phi), v = sin(phi)
/// Decoupled keeps azimuth resolution near zero elevation, where the coupled
/// form collapses every azimuth onto the same response.
enum class VMode
{
  Coupled,
  Decoupled,
};

enum class Storage
{
  Dense,
  Factored,
};

/// Direction cosines (u, v) for one look direction, dimensionless.
struct SpatialFrequency
{
  double u = 0.0;
  double v = 0.0;
};

SpatialFrequency spatial_frequency(double phi, double theta, VMode mode) noexcept;

/// exp(-j 2pi/lambda (x u + y v)) for a port at `port` and look direction
/// (phi, theta).
cplx steering_entry(Point2 port, double phi, double theta, double wavelength, VMode mode) noexcept;

/// Default cap on the dense dictionary footprint (256 MiB).
inline constexpr std::size_t kDefaultDenseCapBytes = std::size_t{256} << 20;

// Z x L steering matrix for a port lattice over an angular grid.
//
// The steering exponent is separable in x_m and y_n, so the factored form
// keeps two thin matrices U (Z x M) and V (Z x N) with
//     D(z, m + n*M) = U(z, m) * V(z, n).
// Dense storage evaluates every entry directly and is kept as the reference
// path for small problems.
class SteeringDictionary
{
public:
  std::size_t rows() const noexcept { return angles_.size(); }
  std::size_t cols() const noexcept { return ports_.size(); }
  VMode vmode() const noexcept { return vmode_; }
  Storage storage() const noexcept { return storage_; }
  const PortGrid& ports() const noexcept { return ports_; }
  const AngularGrid& angles() const noexcept { return angles_; }

  /// Number of complex values held by the current storage.
  std::size_t stored_entries() const noexcept;

  /// Euclidean norm shared by every column, sqrt(Z).
  double column_norm() const noexcept;

  cplx entry(std::size_t z, PortIndex l) const;
  Eigen::VectorXcd column(PortIndex l) const;

  /// Materializes D. Intended for tests and small problems.
  Eigen::MatrixXcd dense() const;

  /// c_l = <D_l, e> = sum_z conj(D(z,l)) e_z for every port l.
  /// Factored storage contracts in two stages: scale conj(V) by e row-wise,
  /// then multiply by U^H, giving the M x N correlation map.
  Eigen::VectorXcd inner_products(const Eigen::VectorXcd& e) const;

  /// y = D_A w_A. Throws ParameterError on a size mismatch or an
  /// out-of-range port; an empty support yields the zero beam.
  Eigen::VectorXcd synthesize(std::span<const PortIndex> support, const Eigen::VectorXcd& weights) const;

  const Eigen::MatrixXcd& factor_u() const noexcept { return u_; }
  const Eigen::MatrixXcd& factor_v() const noexcept { return v_; }

private:
  friend SteeringDictionary build_dictionary(const PortGrid&, const AngularGrid&, VMode, Storage,
                                             std::size_t);
  SteeringDictionary(PortGrid ports, AngularGrid angles, VMode mode, Storage storage);

  void check_port(PortIndex l) const;

  PortGrid ports_;
  AngularGrid angles_;
  VMode vmode_;
  Storage storage_;
  Eigen::MatrixXcd dense_; // Z x L, dense storage only
  Eigen::MatrixXcd u_;     // Z x M, factored storage only
  Eigen::MatrixXcd v_;     // Z x N, factored storage only
};

/// Throws CapacityError if the requested dense matrix would exceed
/// `dense_cap_bytes`.
SteeringDictionary build_dictionary(const PortGrid& ports, const AngularGrid& angles, VMode mode,
                                    Storage storage = Storage::Factored,
                                    std::size_t dense_cap_bytes = kDefaultDenseCapBytes);

/// Bytes needed for a dense Z x L complex<double> dictionary.
std::size_t dense_dictionary_bytes(std::size_t angle_count, std::size_t port_count) noexcept;

/// Beam radiated by the selected ports with their weights.
BeamPattern synthesize_beam(const SteeringDictionary& dict, const Selection& selection);

} // namespace fluidbeam
