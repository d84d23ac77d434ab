#pragma once

#include "fluidbeam/config.hpp"
#include "fluidbeam/evaluation.hpp"
#include "fluidbeam/geometry.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fluidbeam
{

struct SchemeResult
{
  Scheme scheme = Scheme::Fixed;
  BeamPattern initial;     // desired beam before any phase refinement
  BeamPattern desired;     // beam the scheme synthesized toward
  BeamPattern synthesized;
  PortGrid array;          // lattice the active ports come from
  std::vector<PortIndex> active;
  Eigen::VectorXcd weights;
  std::vector<SelectionStep> trace;     // fluid only
  std::vector<double> retrieval_residuals; // phase-optimized schemes only
  bool partial_selection = false;
  BeamMetrics metrics;
};

SchemeResult run_scheme(const RunConfig& cfg, Scheme scheme);

struct ComparisonResult
{
  std::vector<SchemeResult> schemes;
  MetricsTable table;
};

inline constexpr Scheme kAllSchemes[] = {Scheme::Fixed, Scheme::FixedPhaseOpt, Scheme::FluidPhaseOpt};

ComparisonResult compare(const RunConfig& cfg, std::span<const Scheme> schemes = kAllSchemes);

/// Only the phase-retrieval stage on the configured desired beam.
PhaseRetrievalResult retrieve_phase(const RunConfig& cfg, BeamPattern* initial = nullptr);

/// Runs `fill` against a staging directory next to `dir`, then moves it into
/// place. On any exception the staging directory is removed and `dir` is
/// left untouched.
void write_atomically(const std::filesystem::path& dir,
                      const std::function<void(const std::filesystem::path&)>& fill);

/// heatmap.csv, xsec_theta.csv, xsec_phi.csv, metrics.csv, metrics.txt,
/// ports.csv, phase_map.csv, meta.json, plus trace.jsonl for the fluid
/// scheme. Files only, into an existing directory.
void write_scheme_files(const SchemeResult& result, const RunConfig& cfg, const std::filesystem::path& dir);

/// One subdirectory per scheme, the joint metrics table and overlaid
/// cross-sections.
void write_comparison_files(const ComparisonResult& result, const RunConfig& cfg,
                            const std::filesystem::path& dir);

void write_retrieval_files(const PhaseRetrievalResult& result, const BeamPattern& initial,
                           const RunConfig& cfg, const std::filesystem::path& dir);

/// Dictionary statistics as JSON text (sizes, storage footprint, unit
/// modulus check).
std::string dictionary_stats_json(const RunConfig& cfg);

} // namespace fluidbeam
