#include "fluidbeam/beam_spec.hpp"

#include "fluidbeam/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fluidbeam
{

namespace
{

constexpr double kAngleTolerance = 1e-12;
constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_region(const TargetRegion& r)
{
  if (!std::isfinite(r.phi_lo) || !std::isfinite(r.phi_hi) || !std::isfinite(r.theta_lo) ||
      !std::isfinite(r.theta_hi))
    throw ParameterError("target region bounds must be finite");
  if (!(r.phi_lo < r.phi_hi) || !(r.theta_lo < r.theta_hi))
    throw ParameterError("target region needs lo < hi on both axes");
  const double lim = kHalfPi + kAngleTolerance;
  if (r.phi_lo < -lim || r.phi_hi > lim || r.theta_lo < -lim || r.theta_hi > lim)
    throw ParameterError("target region leaves [-pi/2, pi/2] x [-pi/2, pi/2]");
}

} // namespace

bool TargetRegion::contains(double phi, double theta) const noexcept
{
  return phi >= phi_lo - kAngleTolerance && phi <= phi_hi + kAngleTolerance && theta >= theta_lo - kAngleTolerance &&
         theta <= theta_hi + kAngleTolerance;
}

BeamPattern::BeamPattern(AngularGrid grid, Eigen::MatrixXcd values) : grid_(std::move(grid)), values_(std::move(values))
{
  if (static_cast<std::size_t>(values_.rows()) != grid_.azimuth_count() ||
      static_cast<std::size_t>(values_.cols()) != grid_.elevation_count())
    throw ParameterError("beam pattern is " + std::to_string(values_.rows()) + "x" + std::to_string(values_.cols()) +
                         " but the grid is " + std::to_string(grid_.azimuth_count()) + "x" +
                         std::to_string(grid_.elevation_count()));
  if (!values_.allFinite())
    throw ParameterError("beam pattern has non-finite entries");
}

BeamPattern::BeamPattern(AngularGrid grid)
    : BeamPattern(grid, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(grid.azimuth_count()),
                                               static_cast<Eigen::Index>(grid.elevation_count())))
{
}

Eigen::MatrixXd BeamPattern::phase() const
{
  return values_.unaryExpr([](const cplx& c) { return std::arg(c); });
}

std::size_t region_support_count(const AngularGrid& grid, const TargetRegion& region)
{
  std::size_t count = 0;
  for (std::size_t q = 0; q < grid.elevation_count(); ++q)
    for (std::size_t p = 0; p < grid.azimuth_count(); ++p)
      if (region.contains(grid.phi(p), grid.theta(q)))
        ++count;
  return count;
}

BeamPattern make_desired_beam(const AngularGrid& grid, const TargetRegion& region, double k,
                              PhaseConvention convention)
{
  check_region(region);
  if (!std::isfinite(k))
    throw ParameterError("phase slope must be finite");

  const auto P = static_cast<Eigen::Index>(grid.azimuth_count());
  const auto Q = static_cast<Eigen::Index>(grid.elevation_count());
  Eigen::MatrixXcd values = Eigen::MatrixXcd::Zero(P, Q);
  std::size_t support = 0;
  for (Eigen::Index q = 0; q < Q; ++q)
  {
    for (Eigen::Index p = 0; p < P; ++p)
    {
      const double phi = grid.phi(static_cast<std::size_t>(p));
      const double theta = grid.theta(static_cast<std::size_t>(q));
      if (!region.contains(phi, theta))
        continue;
      const double ramp = convention == PhaseConvention::IndexLinear ? static_cast<double>(p + q) : phi + theta;
      values(p, q) = std::polar(1.0, k * ramp);
      ++support;
    }
  }
  if (support == 0)
    throw DegenerateRegionError("target region contains no angular grid sample");
  return BeamPattern(grid, std::move(values));
}

Eigen::VectorXcd vectorize(const BeamPattern& pattern)
{
  return pattern.values().reshaped();
}

BeamPattern matricize(const AngularGrid& grid, const Eigen::VectorXcd& g)
{
  if (static_cast<std::size_t>(g.size()) != grid.size())
    throw ParameterError("vector of length " + std::to_string(g.size()) + " does not match grid size " +
                         std::to_string(grid.size()));
  Eigen::MatrixXcd values = g.reshaped(static_cast<Eigen::Index>(grid.azimuth_count()),
                                       static_cast<Eigen::Index>(grid.elevation_count()));
  return BeamPattern(grid, std::move(values));
}

} // namespace fluidbeam
