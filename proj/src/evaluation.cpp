#include "fluidbeam/evaluation.hpp"

#include "fluidbeam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace fluidbeam
{

namespace
{

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void require_same_grid(const BeamPattern& a, const BeamPattern& b)
{
  if (!(a.grid() == b.grid()))
    throw ParameterError("beam patterns live on different angular grids");
}

std::size_t nearest_sample(std::span<const double> axis, double angle)
{
  constexpr double tol = 1e-12;
  if (!std::isfinite(angle) || angle < axis.front() - tol || angle > axis.back() + tol)
    throw ParameterError("cross-section angle outside the grid range");
  std::size_t best = 0;
  double best_gap = std::abs(axis[0] - angle);
  for (std::size_t i = 1; i < axis.size(); ++i)
  {
    const double gap = std::abs(axis[i] - angle);
    if (gap < best_gap)
    {
      best_gap = gap;
      best = i;
    }
  }
  return best;
}

BeamMetrics subtract(const BeamMetrics& to, const BeamMetrics& from)
{
  return {to.reconstruction_error - from.reconstruction_error, to.mainlobe_mean_gain - from.mainlobe_mean_gain,
          to.peak_sidelobe - from.peak_sidelobe, to.peak_gain_db - from.peak_gain_db};
}

void write_metrics_row(std::ostream& out, const char* kind, const std::string& label, const BeamMetrics& m)
{
  out << kind << ',' << label << ',' << format_number(m.reconstruction_error) << ','
      << format_number(m.mainlobe_mean_gain) << ',' << format_number(m.peak_sidelobe) << ','
      << format_number(m.peak_gain_db) << '\n';
}

} // namespace

std::string format_number(double value)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

double reconstruction_error(const BeamPattern& g, const BeamPattern& y)
{
  require_same_grid(g, y);
  return (g.values() - y.values()).squaredNorm();
}

Eigen::MatrixXd normalize_beam(const BeamPattern& y)
{
  Eigen::MatrixXd mag = y.magnitude();
  const double peak = mag.size() == 0 ? 0.0 : mag.maxCoeff();
  if (!(peak > 0.0))
    throw DegenerateBeamError("cannot normalize an all-zero beam");
  return mag / peak;
}

CrossSection cross_section(const BeamPattern& y, CrossSectionAxis axis, double angle)
{
  const AngularGrid& grid = y.grid();
  const Eigen::MatrixXd norm = normalize_beam(y);

  CrossSection out;
  out.axis = axis;
  out.requested_angle = angle;
  if (axis == CrossSectionAxis::FixedTheta)
  {
    out.line = nearest_sample(grid.elevation(), angle);
    out.grid_angle = grid.theta(out.line);
    out.angles.assign(grid.azimuth().begin(), grid.azimuth().end());
    for (std::size_t p = 0; p < grid.azimuth_count(); ++p)
      out.magnitude.push_back(norm(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(out.line)));
  }
  else
  {
    out.line = nearest_sample(grid.azimuth(), angle);
    out.grid_angle = grid.phi(out.line);
    out.angles.assign(grid.elevation().begin(), grid.elevation().end());
    for (std::size_t q = 0; q < grid.elevation_count(); ++q)
      out.magnitude.push_back(norm(static_cast<Eigen::Index>(out.line), static_cast<Eigen::Index>(q)));
  }
  return out;
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> guarded_region_mask(const AngularGrid& grid,
                                                                        const TargetRegion& region, std::size_t guard)
{
  const auto P = static_cast<Eigen::Index>(grid.azimuth_count());
  const auto Q = static_cast<Eigen::Index>(grid.elevation_count());
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(P, Q, false);
  const auto g = static_cast<Eigen::Index>(guard);
  for (Eigen::Index q = 0; q < Q; ++q)
    for (Eigen::Index p = 0; p < P; ++p)
    {
      if (!region.contains(grid.phi(static_cast<std::size_t>(p)), grid.theta(static_cast<std::size_t>(q))))
        continue;
      for (Eigen::Index qq = std::max<Eigen::Index>(0, q - g); qq <= std::min(Q - 1, q + g); ++qq)
        for (Eigen::Index pp = std::max<Eigen::Index>(0, p - g); pp <= std::min(P - 1, p + g); ++pp)
          mask(pp, qq) = true;
    }
  return mask;
}

BeamMetrics compute_metrics(const BeamPattern& desired, const BeamPattern& synthesized, const TargetRegion& region,
                            std::size_t guard)
{
  require_same_grid(desired, synthesized);
  const AngularGrid& grid = desired.grid();
  const auto inside = guarded_region_mask(grid, region, 0);
  if (!inside.any())
    throw DegenerateRegionError("target region contains no angular grid sample");

  BeamMetrics m;

  // Closed-form weights carry an arbitrary overall gain, so compare shapes
  // after the least-squares complex gain c = <y, g> / <y, y>.
  const Eigen::VectorXcd g = vectorize(desired);
  const Eigen::VectorXcd y = vectorize(synthesized);
  const double energy = y.squaredNorm();
  const cplx gain = energy > 0.0 ? y.dot(g) / energy : cplx{};
  m.reconstruction_error = (g - gain * y).squaredNorm();

  const Eigen::MatrixXd mag = synthesized.magnitude();
  const double peak = mag.maxCoeff();
  if (!(peak > 0.0))
  {
    m.peak_gain_db = kDbFloor;
    return m;
  }
  const Eigen::ArrayXXd norm = (mag / peak).array();
  m.mainlobe_mean_gain = inside.select(norm, 0.0).sum() / static_cast<double>(inside.count());

  const auto guarded = guarded_region_mask(grid, region, guard);
  m.peak_sidelobe = guarded.all() ? 0.0 : guarded.select(Eigen::ArrayXXd::Constant(norm.rows(), norm.cols(), -1.0), norm).maxCoeff();
  m.peak_gain_db = std::max(20.0 * std::log10(peak), kDbFloor);
  return m;
}

MetricsTable compare_configs(const std::vector<LabeledBeam>& results, const TargetRegion& region, std::size_t guard)
{
  MetricsTable table;
  for (const auto& r : results)
  {
    if (!results.empty() && !(r.desired.grid() == results.front().desired.grid()))
      throw ParameterError("compared configurations use different angular grids");
    table.labels.push_back(r.label);
    table.rows.push_back(compute_metrics(r.desired, r.synthesized, region, guard));
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    for (std::size_t j = i + 1; j < table.rows.size(); ++j)
      table.deltas.push_back({table.labels[i], table.labels[j], subtract(table.rows[j], table.rows[i])});
  return table;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& values)
{
  for (Eigen::Index r = 0; r < values.rows(); ++r)
  {
    for (Eigen::Index c = 0; c < values.cols(); ++c)
    {
      if (c > 0)
        out << ',';
      out << format_number(values(r, c));
    }
    out << '\n';
  }
}

void write_heatmap_csv(std::ostream& out, const Eigen::MatrixXd& normalized, bool decibels)
{
  if (!decibels)
  {
    write_matrix_csv(out, normalized);
    return;
  }
  const Eigen::MatrixXd db = normalized.unaryExpr([](double v) {
    return v > 0.0 ? std::max(20.0 * std::log10(v), kDbFloor) : kDbFloor;
  });
  write_matrix_csv(out, db);
}

void write_cross_section_csv(std::ostream& out, const CrossSection& section)
{
  out << "angle_deg,normalized_magnitude\n";
  for (std::size_t i = 0; i < section.angles.size(); ++i)
    out << format_number(section.angles[i] * kRadToDeg) << ',' << format_number(section.magnitude[i]) << '\n';
}

void write_metrics_csv(std::ostream& out, const MetricsTable& table)
{
  out << "kind,label,reconstruction_error,mainlobe_mean_gain,peak_sidelobe,peak_gain_db\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    write_metrics_row(out, "scheme", table.labels[i], table.rows[i]);
  for (const auto& d : table.deltas)
    write_metrics_row(out, "delta", d.to + " - " + d.from, d.delta);
}

void write_metrics_text(std::ostream& out, const MetricsTable& table)
{
  char line[160];
  std::snprintf(line, sizeof line, "%-32s %16s %12s %12s %12s\n", "scheme", "recon_error", "mainlobe", "sidelobe",
                "peak_dB");
  out << line;
  auto row = [&](const std::string& label, const BeamMetrics& m) {
    std::snprintf(line, sizeof line, "%-32s %16.6f %12.6f %12.6f %12.4f\n", label.c_str(), m.reconstruction_error,
                  m.mainlobe_mean_gain, m.peak_sidelobe, m.peak_gain_db);
    out << line;
  };
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    row(table.labels[i], table.rows[i]);
  if (!table.deltas.empty())
  {
    out << "\npairwise deltas (later - earlier)\n";
    for (const auto& d : table.deltas)
      row(d.to + " - " + d.from, d.delta);
  }
}

} // namespace fluidbeam
