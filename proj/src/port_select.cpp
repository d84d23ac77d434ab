#include "fluidbeam/port_select.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fluidbeam
{

namespace
{

// Correlations this close to the maximum count as tied; rounding in the
// contraction should not decide between mathematically equal candidates.
constexpr double kTieTolerance = 1e-12;

Eigen::MatrixXcd support_columns(const SteeringDictionary& dict, const std::vector<PortIndex>& support)
{
  Eigen::MatrixXcd cols(static_cast<Eigen::Index>(dict.rows()), static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i)
    cols.col(static_cast<Eigen::Index>(i)) = dict.column(support[i]);
  return cols;
}

} // namespace

InfeasibleSpacingError::InfeasibleSpacingError(std::size_t requested, Selection partial, const std::string& context)
    : std::runtime_error(context + "spacing constraint exhausted the candidate ports after " +
                         std::to_string(partial.support.size()) + " of " + std::to_string(requested) +
                         " selections"),
      requested_(requested), partial_(std::move(partial))
{
}

std::vector<PortIndex> excluded_neighbors(const PortGrid& grid, PortIndex index, double min_spacing)
{
  if (!(min_spacing >= 0.0) || !std::isfinite(min_spacing))
    throw ParameterError("minimum spacing must be finite and nonnegative");
  const auto center = grid.coord(index);

  const double reach = std::ceil(min_spacing / grid.spacing());
  const auto radius = static_cast<long>(std::min(reach, static_cast<double>(std::max(grid.rows(), grid.cols()))));
  const auto M = static_cast<long>(grid.rows());
  const auto N = static_cast<long>(grid.cols());

  std::vector<PortIndex> out;
  for (long dn = -radius; dn <= radius; ++dn)
  {
    const long n = static_cast<long>(center.n) + dn;
    if (n < 0 || n >= N)
      continue;
    for (long dm = -radius; dm <= radius; ++dm)
    {
      const long m = static_cast<long>(center.m) + dm;
      if (m < 0 || m >= M || (dm == 0 && dn == 0))
        continue;
      const PortIndex other = grid.index(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
      if (grid.distance(index, other) < min_spacing)
        out.push_back(other);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Selection select_ports(const SteeringDictionary& dict, const Eigen::VectorXcd& desired, const SelectOptions& options)
{
  if (options.sparsity == 0)
    throw ParameterError("sparsity must be at least 1");
  if (static_cast<std::size_t>(desired.size()) != dict.rows())
    throw ParameterError("desired beam length does not match the dictionary");
  if (!std::isfinite(options.alpha))
    throw ParameterError("alpha must be finite");
  if (!(options.min_spacing >= 0.0) || !std::isfinite(options.min_spacing))
    throw ParameterError("minimum spacing must be finite and nonnegative");

  const PortGrid& grid = dict.ports();
  const std::size_t L = dict.cols();
  const double scale = options.normalize_columns ? 1.0 / dict.column_norm() : 1.0;
  const bool modified = options.rule == ResidualRule::Modified;

  // Closed-form Fourier weight of every port, w_l = <D_l, g>. A port's weight
  // does not depend on the rest of the support, so restricting this vector
  // to the support is the same as re-evaluating the closed form each step.
  const Eigen::VectorXcd fourier_weights = dict.inner_products(desired);

  Selection sel;
  std::vector<bool> forbidden(L, false);
  Eigen::VectorXcd residual = desired;
  Eigen::VectorXcd beam = Eigen::VectorXcd::Zero(desired.size());
  Eigen::MatrixXcd basis; // orthonormal span of the support, least-squares rule only
  if (!modified)
    basis.resize(desired.size(), static_cast<Eigen::Index>(std::min(options.sparsity, L)));

  auto finalize = [&] {
    const auto k = static_cast<Eigen::Index>(sel.support.size());
    sel.weights.resize(k);
    if (k == 0)
      return;
    if (modified)
    {
      for (Eigen::Index i = 0; i < k; ++i)
        sel.weights(i) = fourier_weights(static_cast<Eigen::Index>(sel.support[static_cast<std::size_t>(i)]));
    }
    else
    {
      sel.weights = support_columns(dict, sel.support).colPivHouseholderQr().solve(desired);
    }
  };

  for (std::size_t step = 0; step < options.sparsity; ++step)
  {
    const Eigen::VectorXcd corr = step == 0 ? fourier_weights : dict.inner_products(residual);

    double peak = -1.0;
    for (PortIndex l = 0; l < L; ++l)
      if (!forbidden[l])
        peak = std::max(peak, std::abs(corr(static_cast<Eigen::Index>(l))) * scale);
    bool found = false;
    PortIndex best = 0;
    double best_value = -1.0;
    for (PortIndex l = 0; l < L && !found; ++l)
    {
      const double value = std::abs(corr(static_cast<Eigen::Index>(l))) * scale;
      if (!forbidden[l] && value >= peak * (1.0 - kTieTolerance))
      {
        best_value = value;
        best = l;
        found = true;
      }
    }
    if (!found)
    {
      finalize();
      throw InfeasibleSpacingError(options.sparsity, std::move(sel));
    }

    sel.support.push_back(best);
    forbidden[best] = true;
    for (auto j : excluded_neighbors(grid, best, options.min_spacing))
      forbidden[j] = true;

    const Eigen::VectorXcd atom = dict.column(best);
    if (modified)
    {
      beam += fourier_weights(static_cast<Eigen::Index>(best)) * atom;
      const double norm = beam.norm();
      if (norm == 0.0)
        throw DegenerateBeamError("synthesized beam vanished on a nonempty support");
      residual = desired - (options.alpha / norm) * beam;
    }
    else
    {
      // Two passes of modified Gram-Schmidt keep the basis orthonormal.
      Eigen::VectorXcd q = atom;
      const auto k = static_cast<Eigen::Index>(step);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index i = 0; i < k; ++i)
          q -= basis.col(i) * basis.col(i).dot(q);
      const double norm = q.norm();
      if (norm <= 1e-12 * atom.norm())
        throw DegenerateBeamError("selected atom is linearly dependent on the support");
      basis.col(k) = q / norm;
      residual -= basis.col(k) * basis.col(k).dot(residual);
    }

    sel.trace.push_back({best, best_value, residual.norm()});
  }

  finalize();
  return sel;
}

} // namespace fluidbeam
