#pragma once

#include "fluidbeam/errors.hpp"
#include "fluidbeam/geometry.hpp"
#include "fluidbeam/selection.hpp"
#include "fluidbeam/steering.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace fluidbeam
{

/// Residual used between greedy steps.
/// Modified: e = g - alpha * y / ||y||, with y synthesized from the support
///           using closed-form Fourier weights.
/// LeastSquares: e = g - D_A pinv(D_A) g, the textbook OMP deflation.
enum class ResidualRule
{
  Modified,
  LeastSquares,
};

struct SelectOptions
{
  std::size_t sparsity = 256;
  double alpha = -0.01;
  double min_spacing = 0.0; // meters
  bool normalize_columns = true;
  ResidualRule rule = ResidualRule::Modified;
};

/// Raised when the spacing rule leaves no candidate before `sparsity` ports
/// were chosen. Carries what was selected up to that point.
class InfeasibleSpacingError : public std::runtime_error
{
public:
  InfeasibleSpacingError(std::size_t requested, Selection partial, const std::string& context = {});

  std::size_t requested() const noexcept { return requested_; }
  std::size_t achieved() const noexcept { return partial_.support.size(); }
  const Selection& partial() const noexcept { return partial_; }

private:
  std::size_t requested_;
  Selection partial_;
};

/// Ports j with 0 < dist(index, j) < min_spacing, ascending. Ports exactly
/// min_spacing away stay selectable.
std::vector<PortIndex> excluded_neighbors(const PortGrid& grid, PortIndex index, double min_spacing);

/// Greedy spacing-constrained matching pursuit.
///
/// Each step picks the allowed port with the largest |<D_j, e>| (lowest
/// index on ties, where values within a relative 1e-12 of the maximum count
/// as tied), forbids it and its too-close neighbours, then updates the
/// residual per `options.rule`. The returned weights are the closed-form
/// Fourier weights of the support (Modified) or the least-squares fit
/// (LeastSquares).
///
/// Throws ParameterError for sparsity 0 or a size mismatch,
/// InfeasibleSpacingError when candidates run out, DegenerateBeamError when
/// the Modified rule meets a zero beam on a nonempty support.
Selection select_ports(const SteeringDictionary& dict, const Eigen::VectorXcd& desired,
                       const SelectOptions& options);

} // namespace fluidbeam
