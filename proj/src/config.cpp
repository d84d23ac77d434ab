#include "fluidbeam/config.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <utility>

namespace fluidbeam
{

namespace
{

template <typename Enum, std::size_t N>
Enum lookup(const std::array<std::pair<std::string_view, Enum>, N>& table, std::string_view name, const char* what)
{
  for (const auto& [key, value] : table)
    if (key == name)
      return value;
  std::string msg = std::string("unknown ") + what + " '" + std::string(name) + "' (expected";
  for (const auto& [key, value] : table)
    msg += " " + std::string(key);
  throw ConfigError(msg + ")");
}

constexpr std::array<std::pair<std::string_view, Scheme>, 3> kSchemes{{
    {"fixed", Scheme::Fixed},
    {"fixed-phaseopt", Scheme::FixedPhaseOpt},
    {"fluid-phaseopt", Scheme::FluidPhaseOpt},
}};
constexpr std::array<std::pair<std::string_view, VMode>, 2> kVModes{{
    {"coupled", VMode::Coupled},
    {"decoupled", VMode::Decoupled},
}};
constexpr std::array<std::pair<std::string_view, Storage>, 2> kStorages{{
    {"dense", Storage::Dense},
    {"factored", Storage::Factored},
}};
constexpr std::array<std::pair<std::string_view, BlockPlacement>, 2> kPlacements{{
    {"centered", BlockPlacement::Centered},
    {"corner", BlockPlacement::Corner},
}};
constexpr std::array<std::pair<std::string_view, ResidualRule>, 2> kRules{{
    {"modified", ResidualRule::Modified},
    {"least-squares", ResidualRule::LeastSquares},
}};
constexpr std::array<std::pair<std::string_view, PhaseConvention>, 2> kConventions{{
    {"index", PhaseConvention::IndexLinear},
    {"angle", PhaseConvention::AngleLinear},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<std::string_view, Enum>, N>& table, Enum value) noexcept
{
  for (const auto& [key, v] : table)
    if (v == value)
      return key;
  return "?";
}

std::string exact(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr double kDegToRad = std::numbers::pi / 180.0;

} // namespace

std::string_view to_string(Scheme s) noexcept { return name_of(kSchemes, s); }
std::string_view to_string(VMode m) noexcept { return name_of(kVModes, m); }
std::string_view to_string(Storage s) noexcept { return name_of(kStorages, s); }
std::string_view to_string(BlockPlacement p) noexcept { return name_of(kPlacements, p); }
std::string_view to_string(ResidualRule r) noexcept { return name_of(kRules, r); }
std::string_view to_string(PhaseConvention c) noexcept { return name_of(kConventions, c); }

Scheme parse_scheme(std::string_view name)
{
  return lookup(kSchemes, name, "scheme");
}

TargetRegion RunConfig::region() const
{
  return {phi_min_deg * kDegToRad, phi_max_deg * kDegToRad, theta_min_deg * kDegToRad, theta_max_deg * kDegToRad};
}

void RunConfig::validate() const
{
  auto require = [](bool ok, const char* msg) {
    if (!ok)
      throw ConfigError(msg);
  };
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  auto in_half_circle = [](double deg) { return std::isfinite(deg) && deg >= -90.0 && deg <= 90.0; };

  require(azimuth_samples >= 2 && elevation_samples >= 2, "angular grid needs at least 2 samples per axis");
  require(fluid_rows >= 1 && fluid_cols >= 1, "fluid port grid needs at least one row and column");
  require(positive(port_spacing), "port-spacing must be positive");
  require(std::isfinite(min_spacing) && min_spacing >= 0.0, "min-spacing must be nonnegative");
  require(positive(wavelength), "wavelength must be positive");
  require(fixed_size >= 1, "fixed-size must be at least 1");
  require(positive(fixed_spacing), "fixed-spacing must be positive");
  require(in_half_circle(phi_min_deg) && in_half_circle(phi_max_deg) && in_half_circle(theta_min_deg) &&
              in_half_circle(theta_max_deg),
          "target region bounds must lie in [-90, 90] degrees");
  require(phi_min_deg < phi_max_deg && theta_min_deg < theta_max_deg, "target region needs min < max on both axes");
  require(std::isfinite(phase_slope), "phase-slope must be finite");
  require(active_ports >= 1, "active-ports must be at least 1");
  require(active_ports <= fluid_rows * fluid_cols, "active-ports exceeds the number of fluid ports");
  require(std::isfinite(alpha), "alpha must be finite");
  require(std::isfinite(early_stop) && early_stop >= 0.0, "early-stop must be nonnegative");
  require(in_half_circle(xsec_theta_deg) && in_half_circle(xsec_phi_deg),
          "cross-section angles must lie in [-90, 90] degrees");
}

ConfigBinder::ConfigBinder(CLI::App& app, const RunConfig& defaults)
    : cfg_(defaults), phase_convention_(to_string(defaults.phase_convention)), vmode_(to_string(defaults.vmode)),
      storage_(to_string(defaults.storage)), placement_(to_string(defaults.placement)),
      residual_rule_(to_string(defaults.residual_rule)), scheme_(to_string(defaults.scheme))
{
  app.option_defaults()->always_capture_default();
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--azimuth-samples", cfg_.azimuth_samples, "Azimuth samples P over [-90, 90] deg")->group("Grid");
  app.add_option("--elevation-samples", cfg_.elevation_samples, "Elevation samples Q over [-90, 90] deg")
      ->group("Grid");
  app.add_option("--fluid-rows", cfg_.fluid_rows, "Fluid port grid rows M")->group("Grid");
  app.add_option("--fluid-cols", cfg_.fluid_cols, "Fluid port grid columns N")->group("Grid");
  app.add_option("--port-spacing", cfg_.port_spacing, "Fluid port spacing, wavelengths")->group("Grid");
  app.add_option("--min-spacing", cfg_.min_spacing, "Minimum distance between active ports, wavelengths")
      ->group("Grid");
  app.add_option("--wavelength", cfg_.wavelength, "Carrier wavelength, meters")->group("Grid");
  app.add_option("--fixed-size", cfg_.fixed_size, "Fixed baseline array is fixed-size x fixed-size")->group("Grid");
  app.add_option("--fixed-spacing", cfg_.fixed_spacing, "Fixed array element spacing, wavelengths")->group("Grid");

  app.add_option("--phi-min", cfg_.phi_min_deg, "Target region azimuth lower bound, deg")->group("Beam");
  app.add_option("--phi-max", cfg_.phi_max_deg, "Target region azimuth upper bound, deg")->group("Beam");
  app.add_option("--theta-min", cfg_.theta_min_deg, "Target region elevation lower bound, deg")->group("Beam");
  app.add_option("--theta-max", cfg_.theta_max_deg, "Target region elevation upper bound, deg")->group("Beam");
  app.add_option("--phase-slope", cfg_.phase_slope, "Initial linear phase slope k")->group("Beam");
  app.add_option("--phase-convention", phase_convention_, "Phase ramp over grid indices or radians")
      ->check(CLI::IsMember({"index", "angle"}))
      ->group("Beam");

  app.add_option("--active-ports", cfg_.active_ports, "Active antennas S")->group("Algorithm");
  app.add_option("--alpha", cfg_.alpha, "Residual update coefficient")->group("Algorithm");
  app.add_option("--retrieval-iterations", cfg_.retrieval_iterations, "Phase retrieval iterations")
      ->group("Algorithm");
  app.add_option("--early-stop", cfg_.early_stop, "Relative improvement below which retrieval stops; 0 = off")
      ->group("Algorithm");
  app.add_option("--vmode", vmode_, "Spatial frequency substitution")
      ->check(CLI::IsMember({"coupled", "decoupled"}))
      ->group("Algorithm");
  app.add_option("--storage", storage_, "Steering dictionary storage")
      ->check(CLI::IsMember({"dense", "factored"}))
      ->group("Algorithm");
  app.add_option("--block-placement", placement_, "Aperture block kept during phase retrieval")
      ->check(CLI::IsMember({"centered", "corner"}))
      ->group("Algorithm");
  app.add_option("--residual-rule", residual_rule_, "Residual update between selection steps")
      ->check(CLI::IsMember({"modified", "least-squares"}))
      ->group("Algorithm");
  app.add_flag("--normalize-columns,!--no-normalize-columns", cfg_.normalize_columns,
               "Scale correlations by 1/sqrt(Z)")
      ->group("Algorithm");
  app.add_flag("--allow-partial-selection", cfg_.allow_partial_selection,
               "Keep the ports chosen so far when the spacing rule runs out of candidates")
      ->group("Algorithm");
  app.add_option("--dense-cap-mib", cfg_.dense_cap_mib, "Memory cap for dense dictionaries, MiB")
      ->group("Algorithm");

  app.add_option("--guard-cells", cfg_.guard_cells, "Guard band around the target region for side lobes")
      ->group("Evaluation");
  app.add_option("--xsec-theta", cfg_.xsec_theta_deg, "Elevation of the fixed-theta cross-section, deg")
      ->group("Evaluation");
  app.add_option("--xsec-phi", cfg_.xsec_phi_deg, "Azimuth of the fixed-phi cross-section, deg")
      ->group("Evaluation");
  app.add_flag("--heatmap-db", cfg_.heatmap_db, "Write heatmaps in dB")->group("Evaluation");

  app.add_option("--scheme", scheme_, "Scheme for `run`")
      ->check(CLI::IsMember({"fixed", "fixed-phaseopt", "fluid-phaseopt"}))
      ->group("Output");
  app.add_option("--output-dir,-o", cfg_.output_dir, "Result directory")->group("Output");
}

RunConfig ConfigBinder::resolve() const
{
  RunConfig cfg = cfg_;
  cfg.phase_convention = lookup(kConventions, phase_convention_, "phase convention");
  cfg.vmode = lookup(kVModes, vmode_, "vmode");
  cfg.storage = lookup(kStorages, storage_, "storage");
  cfg.placement = lookup(kPlacements, placement_, "block placement");
  cfg.residual_rule = lookup(kRules, residual_rule_, "residual rule");
  cfg.scheme = parse_scheme(scheme_);
  cfg.validate();
  return cfg;
}

std::string serialize_config(const RunConfig& c)
{
  std::ostringstream out;
  auto kv = [&](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
  auto str = [](std::string_view s) { return "\"" + std::string(s) + "\""; };
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };

  kv("azimuth-samples", std::to_string(c.azimuth_samples));
  kv("elevation-samples", std::to_string(c.elevation_samples));
  kv("fluid-rows", std::to_string(c.fluid_rows));
  kv("fluid-cols", std::to_string(c.fluid_cols));
  kv("port-spacing", exact(c.port_spacing));
  kv("min-spacing", exact(c.min_spacing));
  kv("wavelength", exact(c.wavelength));
  kv("fixed-size", std::to_string(c.fixed_size));
  kv("fixed-spacing", exact(c.fixed_spacing));
  kv("phi-min", exact(c.phi_min_deg));
  kv("phi-max", exact(c.phi_max_deg));
  kv("theta-min", exact(c.theta_min_deg));
  kv("theta-max", exact(c.theta_max_deg));
  kv("phase-slope", exact(c.phase_slope));
  kv("phase-convention", str(to_string(c.phase_convention)));
  kv("active-ports", std::to_string(c.active_ports));
  kv("alpha", exact(c.alpha));
  kv("retrieval-iterations", std::to_string(c.retrieval_iterations));
  kv("early-stop", exact(c.early_stop));
  kv("vmode", str(to_string(c.vmode)));
  kv("storage", str(to_string(c.storage)));
  kv("block-placement", str(to_string(c.placement)));
  kv("residual-rule", str(to_string(c.residual_rule)));
  kv("normalize-columns", flag(c.normalize_columns));
  kv("allow-partial-selection", flag(c.allow_partial_selection));
  kv("dense-cap-mib", std::to_string(c.dense_cap_mib));
  kv("guard-cells", std::to_string(c.guard_cells));
  kv("xsec-theta", exact(c.xsec_theta_deg));
  kv("xsec-phi", exact(c.xsec_phi_deg));
  kv("heatmap-db", flag(c.heatmap_db));
  kv("scheme", str(to_string(c.scheme)));
  if (!c.output_dir.empty())
    kv("output-dir", str(c.output_dir));
  return out.str();
}

RunConfig parse_config_text(std::string_view text)
{
  CLI::App app{"fluidbeam config"};
  ConfigBinder binder(app);
  std::istringstream in{std::string(text)};
  try
  {
    app.parse_from_stream(in);
  }
  catch (const CLI::ParseError& e)
  {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return binder.resolve();
}

RunConfig load_config_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

} // namespace fluidbeam
