#pragma once

#include "fluidbeam/beam_spec.hpp"
#include "fluidbeam/errors.hpp"
#include "fluidbeam/fourier.hpp"
#include "fluidbeam/port_select.hpp"
#include "fluidbeam/steering.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

namespace CLI
{
class App;
}

namespace fluidbeam
{

class ConfigError : public ParameterError
{
public:
  using ParameterError::ParameterError;
};

enum class Scheme
{
  Fixed,
  FixedPhaseOpt,
  FluidPhaseOpt,
};

std::string_view to_string(Scheme scheme) noexcept;
std::string_view to_string(VMode mode) noexcept;
std::string_view to_string(Storage storage) noexcept;
std::string_view to_string(BlockPlacement placement) noexcept;
std::string_view to_string(ResidualRule rule) noexcept;
std::string_view to_string(PhaseConvention convention) noexcept;

/// Throws ConfigError on an unknown name.
Scheme parse_scheme(std::string_view name);

// Every knob of a run. Defaults reproduce the reference system parameters:
// 180 x 180 angles, a 32 x 32 port grid at lambda/4 with lambda/2 minimum
// spacing, 256 active ports, alpha = -0.01, phase slope 0.1, and a 16 x 16
// lambda/2 fixed array as the baseline.
struct RunConfig
{
  // angular grid
  std::size_t azimuth_samples = 180;
  std::size_t elevation_samples = 180;

  // fluid port grid; lengths in wavelengths except `wavelength` (meters)
  std::size_t fluid_rows = 32;
  std::size_t fluid_cols = 32;
  double port_spacing = 0.25;
  double min_spacing = 0.5;
  double wavelength = 1.0;

  // fixed baseline array
  std::size_t fixed_size = 16;
  double fixed_spacing = 0.5;

  // desired beam, degrees
  double phi_min_deg = 30.0;
  double phi_max_deg = 60.0;
  double theta_min_deg = 0.0;
  double theta_max_deg = 30.0;
  double phase_slope = 0.1;
  PhaseConvention phase_convention = PhaseConvention::IndexLinear;

  // algorithms
  std::size_t active_ports = 256;
  double alpha = -0.01;
  std::size_t retrieval_iterations = 50;
  double early_stop = 0.0;
  VMode vmode = VMode::Decoupled;
  Storage storage = Storage::Factored;
  BlockPlacement placement = BlockPlacement::Centered;
  ResidualRule residual_rule = ResidualRule::Modified;
  bool normalize_columns = true;
  bool allow_partial_selection = false;
  std::size_t dense_cap_mib = 256;

  // evaluation and export
  std::size_t guard_cells = 3;
  double xsec_theta_deg = 20.0;
  double xsec_phi_deg = 55.0;
  bool heatmap_db = false;

  Scheme scheme = Scheme::FluidPhaseOpt;
  std::string output_dir;

  bool operator==(const RunConfig&) const = default;

  TargetRegion region() const;
  double port_spacing_m() const { return port_spacing * wavelength; }
  double min_spacing_m() const { return min_spacing * wavelength; }
  double fixed_spacing_m() const { return fixed_spacing * wavelength; }

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

// Registers every RunConfig field as a long option on `app` (and therefore
// as a config-file key of the same name). Call resolve() after parsing.
class ConfigBinder
{
public:
  ConfigBinder(CLI::App& app, const RunConfig& defaults = {});

  /// Converts parsed text fields and validates. Throws ConfigError.
  RunConfig resolve() const;

private:
  RunConfig cfg_;
  std::string phase_convention_;
  std::string vmode_;
  std::string storage_;
  std::string placement_;
  std::string residual_rule_;
  std::string scheme_;
};

/// Key/value text with one `key = value` line per field, keys matching the
/// long option names.
std::string serialize_config(const RunConfig& cfg);

RunConfig parse_config_text(std::string_view text);
RunConfig load_config_file(const std::filesystem::path& path);

} // namespace fluidbeam
