#include "fluidbeam/steering.hpp"

#include "fluidbeam/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fluidbeam
{

namespace
{

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Per-sample direction cosines in column-stacked order.
void direction_cosines(const AngularGrid& angles, VMode mode, Eigen::VectorXd& u, Eigen::VectorXd& v)
{
  const auto Z = static_cast<Eigen::Index>(angles.size());
  u.resize(Z);
  v.resize(Z);
  for (std::size_t q = 0; q < angles.elevation_count(); ++q)
    for (std::size_t p = 0; p < angles.azimuth_count(); ++p)
    {
      const auto f = spatial_frequency(angles.phi(p), angles.theta(q), mode);
      const auto z = static_cast<Eigen::Index>(angles.index(p, q));
      u(z) = f.u;
      v(z) = f.v;
    }
}

Eigen::MatrixXcd axis_phases(const Eigen::VectorXd& cosines, std::span<const double> coords, double wavelength)
{
  const double k = kTwoPi / wavelength;
  Eigen::MatrixXcd out(cosines.size(), static_cast<Eigen::Index>(coords.size()));
  for (Eigen::Index c = 0; c < out.cols(); ++c)
    for (Eigen::Index z = 0; z < out.rows(); ++z)
      out(z, c) = std::polar(1.0, -k * coords[static_cast<std::size_t>(c)] * cosines(z));
  return out;
}

} // namespace

SpatialFrequency spatial_frequency(double phi, double theta, VMode mode) noexcept
{
  const double st = std::sin(theta);
  const double sp = std::sin(phi);
  return {st * std::cos(phi), mode == VMode::Coupled ? st * sp : sp};
}

cplx steering_entry(Point2 port, double phi, double theta, double wavelength, VMode mode) noexcept
{
  const auto f = spatial_frequency(phi, theta, mode);
  return std::polar(1.0, -kTwoPi / wavelength * (port.x * f.u + port.y * f.v));
}

std::size_t dense_dictionary_bytes(std::size_t angle_count, std::size_t port_count) noexcept
{
  return angle_count * port_count * sizeof(cplx);
}

SteeringDictionary::SteeringDictionary(PortGrid ports, AngularGrid angles, VMode mode, Storage storage)
    : ports_(std::move(ports)), angles_(std::move(angles)), vmode_(mode), storage_(storage)
{
}

std::size_t SteeringDictionary::stored_entries() const noexcept
{
  if (storage_ == Storage::Dense)
    return static_cast<std::size_t>(dense_.size());
  return static_cast<std::size_t>(u_.size() + v_.size());
}

double SteeringDictionary::column_norm() const noexcept
{
  return std::sqrt(static_cast<double>(rows()));
}

void SteeringDictionary::check_port(PortIndex l) const
{
  if (l >= cols())
    throw ParameterError("port index " + std::to_string(l) + " out of range (L = " + std::to_string(cols()) + ")");
}

cplx SteeringDictionary::entry(std::size_t z, PortIndex l) const
{
  check_port(l);
  if (z >= rows())
    throw ParameterError("angle index out of range");
  const auto zi = static_cast<Eigen::Index>(z);
  if (storage_ == Storage::Dense)
    return dense_(zi, static_cast<Eigen::Index>(l));
  const auto c = ports_.coord(l);
  return u_(zi, static_cast<Eigen::Index>(c.m)) * v_(zi, static_cast<Eigen::Index>(c.n));
}

Eigen::VectorXcd SteeringDictionary::column(PortIndex l) const
{
  check_port(l);
  if (storage_ == Storage::Dense)
    return dense_.col(static_cast<Eigen::Index>(l));
  const auto c = ports_.coord(l);
  return u_.col(static_cast<Eigen::Index>(c.m)).cwiseProduct(v_.col(static_cast<Eigen::Index>(c.n)));
}

Eigen::MatrixXcd SteeringDictionary::dense() const
{
  if (storage_ == Storage::Dense)
    return dense_;
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
  for (PortIndex l = 0; l < cols(); ++l)
    out.col(static_cast<Eigen::Index>(l)) = column(l);
  return out;
}

Eigen::VectorXcd SteeringDictionary::inner_products(const Eigen::VectorXcd& e) const
{
  if (static_cast<std::size_t>(e.size()) != rows())
    throw ParameterError("residual length does not match the dictionary row count");
  if (storage_ == Storage::Dense)
    return dense_.adjoint() * e;

  // C(m, n) = sum_z conj(U(z,m)) * [e_z conj(V(z,n))]
  const Eigen::MatrixXcd scaled = e.asDiagonal() * v_.conjugate();
  Eigen::MatrixXcd corr(u_.cols(), v_.cols());
  corr.noalias() = u_.adjoint() * scaled;
  return corr.reshaped();
}

Eigen::VectorXcd SteeringDictionary::synthesize(std::span<const PortIndex> support,
                                                const Eigen::VectorXcd& weights) const
{
  if (static_cast<std::size_t>(weights.size()) != support.size())
    throw ParameterError("support and weight counts differ");
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rows()));
  for (std::size_t i = 0; i < support.size(); ++i)
  {
    const PortIndex l = support[i];
    check_port(l);
    const cplx w = weights(static_cast<Eigen::Index>(i));
    if (storage_ == Storage::Dense)
    {
      y += w * dense_.col(static_cast<Eigen::Index>(l));
    }
    else
    {
      const auto c = ports_.coord(l);
      y += w * u_.col(static_cast<Eigen::Index>(c.m)).cwiseProduct(v_.col(static_cast<Eigen::Index>(c.n)));
    }
  }
  return y;
}

SteeringDictionary build_dictionary(const PortGrid& ports, const AngularGrid& angles, VMode mode, Storage storage,
                                    std::size_t dense_cap_bytes)
{
  SteeringDictionary dict(ports, angles, mode, storage);
  const double lambda = ports.wavelength();

  if (storage == Storage::Dense)
  {
    const std::size_t bytes = dense_dictionary_bytes(angles.size(), ports.size());
    if (bytes > dense_cap_bytes)
      throw CapacityError("dense dictionary needs " + std::to_string(bytes) + " bytes, over the cap of " +
                          std::to_string(dense_cap_bytes) + "; use factored storage");

    const auto Z = static_cast<Eigen::Index>(angles.size());
    const auto L = static_cast<Eigen::Index>(ports.size());
    dict.dense_.resize(Z, L);
    for (Eigen::Index l = 0; l < L; ++l)
    {
      const Point2 pos = ports.position(static_cast<PortIndex>(l));
      for (std::size_t q = 0; q < angles.elevation_count(); ++q)
        for (std::size_t p = 0; p < angles.azimuth_count(); ++p)
          dict.dense_(static_cast<Eigen::Index>(angles.index(p, q)), l) =
              steering_entry(pos, angles.phi(p), angles.theta(q), lambda, mode);
    }
    return dict;
  }

  Eigen::VectorXd u;
  Eigen::VectorXd v;
  direction_cosines(angles, mode, u, v);
  dict.u_ = axis_phases(u, ports.xs(), lambda);
  dict.v_ = axis_phases(v, ports.ys(), lambda);
  return dict;
}

BeamPattern synthesize_beam(const SteeringDictionary& dict, const Selection& selection)
{
  return matricize(dict.angles(), dict.synthesize(selection.support, selection.weights));
}

} // namespace fluidbeam
