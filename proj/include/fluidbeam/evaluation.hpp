#pragma once

#include "fluidbeam/beam_spec.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace fluidbeam
{

/// Floor applied to log-scale exports and to peak gains of empty beams.
inline constexpr double kDbFloor = -80.0;

struct BeamMetrics
{
  double reconstruction_error = 0.0; // ||g - c y||^2, c the least-squares complex gain
  double mainlobe_mean_gain = 0.0;   // mean of |y|/max|y| over the target region
  double peak_sidelobe = 0.0;        // max of |y|/max|y| outside the guarded region
  double peak_gain_db = 0.0;         // 20 log10 max|y|, unnormalized
};

/// sum_z |g_z - y_z|^2. Throws ParameterError when the grids differ.
double reconstruction_error(const BeamPattern& g, const BeamPattern& y);

/// |y| / max|y|. Throws DegenerateBeamError for an all-zero beam.
Eigen::MatrixXd normalize_beam(const BeamPattern& y);

enum class CrossSectionAxis
{
  FixedTheta, // profile over phi at one elevation
  FixedPhi,   // profile over theta at one azimuth
};

struct CrossSection
{
  CrossSectionAxis axis = CrossSectionAxis::FixedTheta;
  double requested_angle = 0.0;
  double grid_angle = 0.0;   // the sampled line actually used
  std::size_t line = 0;      // its grid index
  std::vector<double> angles; // radians along the profile
  std::vector<double> magnitude;
};

/// Nearest grid line to `angle` (ties to the lower index), normalized by
/// the global peak of y. Throws ParameterError if the angle is outside the
/// grid range.
CrossSection cross_section(const BeamPattern& y, CrossSectionAxis axis, double angle);

/// Mask of samples inside the region dilated by `guard` cells along both
/// grid axes.
Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> guarded_region_mask(const AngularGrid& grid,
                                                                        const TargetRegion& region,
                                                                        std::size_t guard);

/// Metrics of a synthesized beam against the beam it was meant to
/// reproduce. A zero beam reports zero gains and the dB floor.
BeamMetrics compute_metrics(const BeamPattern& desired, const BeamPattern& synthesized,
                            const TargetRegion& region, std::size_t guard = 3);

struct LabeledBeam
{
  std::string label;
  BeamPattern desired;
  BeamPattern synthesized;
};

struct MetricsDelta
{
  std::string from;
  std::string to;
  BeamMetrics delta; // to - from, field by field
};

struct MetricsTable
{
  std::vector<std::string> labels;
  std::vector<BeamMetrics> rows;
  std::vector<MetricsDelta> deltas; // every ordered pair i < j
};

/// Throws ParameterError when the entries do not share one angular grid.
MetricsTable compare_configs(const std::vector<LabeledBeam>& results, const TargetRegion& region,
                             std::size_t guard = 3);

// Plain-text exporters. Numbers are written with a fixed significant-digit
// format so identical inputs give byte-identical files.
void write_heatmap_csv(std::ostream& out, const Eigen::MatrixXd& normalized, bool decibels);
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& values);
void write_cross_section_csv(std::ostream& out, const CrossSection& section);
void write_metrics_csv(std::ostream& out, const MetricsTable& table);
void write_metrics_text(std::ostream& out, const MetricsTable& table);

/// Twelve significant digits, "%.12g".
std::string format_number(double value);

} // namespace fluidbeam
