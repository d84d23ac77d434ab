#include "fluidbeam/pipeline.hpp"

#include "fluidbeam/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fluidbeam
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::ofstream open_output(const fs::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  return out;
}

void check_written(std::ofstream& out, const fs::path& path)
{
  out.flush();
  if (!out)
    throw std::runtime_error("write failed for " + path.string());
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer)
{
  auto out = open_output(path);
  writer(out);
  check_written(out, path);
}

// Re-raise a module error with the scheme name prepended, keeping its type.
template <typename Fn>
auto with_context(std::string_view scheme, Fn&& fn)
{
  const std::string ctx = std::string(scheme) + ": ";
  try
  {
    return fn();
  }
  catch (const InfeasibleSpacingError& e)
  {
    throw InfeasibleSpacingError(e.requested(), e.partial(), ctx);
  }
  catch (const ConfigError& e)
  {
    throw ConfigError(ctx + e.what());
  }
  catch (const DegenerateRegionError& e)
  {
    throw DegenerateRegionError(ctx + e.what());
  }
  catch (const ParameterError& e)
  {
    throw ParameterError(ctx + e.what());
  }
  catch (const CapacityError& e)
  {
    throw CapacityError(ctx + e.what());
  }
  catch (const DegenerateBeamError& e)
  {
    throw DegenerateBeamError(ctx + e.what());
  }
}

json config_json(const RunConfig& c)
{
  return {
      {"azimuth_samples", c.azimuth_samples},
      {"elevation_samples", c.elevation_samples},
      {"fluid_rows", c.fluid_rows},
      {"fluid_cols", c.fluid_cols},
      {"port_spacing_wavelengths", c.port_spacing},
      {"min_spacing_wavelengths", c.min_spacing},
      {"wavelength_m", c.wavelength},
      {"fixed_size", c.fixed_size},
      {"fixed_spacing_wavelengths", c.fixed_spacing},
      {"region_deg", {{"phi", {c.phi_min_deg, c.phi_max_deg}}, {"theta", {c.theta_min_deg, c.theta_max_deg}}}},
      {"phase_slope", c.phase_slope},
      {"phase_convention", to_string(c.phase_convention)},
      {"active_ports", c.active_ports},
      {"alpha", c.alpha},
      {"retrieval_iterations", c.retrieval_iterations},
      {"early_stop", c.early_stop},
      {"vmode", to_string(c.vmode)},
      {"storage", to_string(c.storage)},
      {"block_placement", to_string(c.placement)},
      {"residual_rule", to_string(c.residual_rule)},
      {"normalize_columns", c.normalize_columns},
      {"allow_partial_selection", c.allow_partial_selection},
      {"guard_cells", c.guard_cells},
      {"xsec_theta_deg", c.xsec_theta_deg},
      {"xsec_phi_deg", c.xsec_phi_deg},
      {"heatmap_db", c.heatmap_db},
  };
}

json grid_json(const AngularGrid& g)
{
  return {
      {"P", g.azimuth_count()},
      {"Q", g.elevation_count()},
      {"phi_range_deg", {g.azimuth().front() * kRadToDeg, g.azimuth().back() * kRadToDeg}},
      {"theta_range_deg", {g.elevation().front() * kRadToDeg, g.elevation().back() * kRadToDeg}},
  };
}

json array_json(std::size_t rows, std::size_t cols, double spacing_wl, double wavelength)
{
  return {
      {"rows", rows},
      {"cols", cols},
      {"spacing_wavelengths", spacing_wl},
      {"aperture_x_wavelengths", static_cast<double>(rows - 1) * spacing_wl},
      {"aperture_y_wavelengths", static_cast<double>(cols - 1) * spacing_wl},
      {"aperture_x_m", static_cast<double>(rows - 1) * spacing_wl * wavelength},
      {"aperture_y_m", static_cast<double>(cols - 1) * spacing_wl * wavelength},
  };
}

json apertures_json(const RunConfig& c)
{
  return {
      {"fixed", array_json(c.fixed_size, c.fixed_size, c.fixed_spacing, c.wavelength)},
      {"fluid", array_json(c.fluid_rows, c.fluid_cols, c.port_spacing, c.wavelength)},
  };
}

json metrics_json(const BeamMetrics& m)
{
  return {
      {"reconstruction_error", m.reconstruction_error},
      {"mainlobe_mean_gain", m.mainlobe_mean_gain},
      {"peak_sidelobe", m.peak_sidelobe},
      {"peak_gain_db", m.peak_gain_db},
  };
}

MetricsTable single_row(const SchemeResult& r)
{
  MetricsTable t;
  t.labels.emplace_back(to_string(r.scheme));
  t.rows.push_back(r.metrics);
  return t;
}

void write_overlay(std::ostream& out, const std::vector<std::string>& labels, const std::vector<CrossSection>& xs)
{
  out << "angle_deg";
  for (const auto& l : labels)
    out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < xs.front().angles.size(); ++i)
  {
    out << format_number(xs.front().angles[i] * kRadToDeg);
    for (const auto& x : xs)
      out << ',' << format_number(x.magnitude[i]);
    out << '\n';
  }
}

} // namespace

SchemeResult run_scheme(const RunConfig& cfg, Scheme scheme)
{
  cfg.validate();
  return with_context(to_string(scheme), [&] {
    const AngularGrid angles = build_angular_grid(cfg.azimuth_samples, cfg.elevation_samples);
    const TargetRegion region = cfg.region();
    BeamPattern initial = make_desired_beam(angles, region, cfg.phase_slope, cfg.phase_convention);

    BeamPattern desired = initial;
    std::vector<double> residuals;
    if (scheme != Scheme::Fixed)
    {
      PhaseRetrievalOptions opts;
      opts.iterations = cfg.retrieval_iterations;
      opts.placement = cfg.placement;
      opts.early_stop_tolerance = cfg.early_stop;
      auto retrieved = phase_retrieve(initial, cfg.active_ports, opts);
      desired = std::move(retrieved.pattern);
      residuals = std::move(retrieved.residuals);
    }

    const std::size_t cap = cfg.dense_cap_mib << 20;
    const double lambda = cfg.wavelength;
    std::vector<PortIndex> active;
    std::vector<SelectionStep> trace;
    Eigen::VectorXcd weights;
    bool partial = false;

    const bool fixed = scheme != Scheme::FluidPhaseOpt;
    PortGrid array = fixed ? build_port_grid(cfg.fixed_size, cfg.fixed_size, cfg.fixed_spacing_m(), lambda)
                           : build_port_grid(cfg.fluid_rows, cfg.fluid_cols, cfg.port_spacing_m(), lambda);
    const SteeringDictionary dict = build_dictionary(array, angles, cfg.vmode, cfg.storage, cap);

    if (fixed)
    {
      active.resize(array.size());
      for (PortIndex l = 0; l < array.size(); ++l)
        active[l] = l;
      weights = weights_from_beam(desired, array.positions(), lambda, cfg.vmode);
    }
    else
    {
      SelectOptions opts;
      opts.sparsity = cfg.active_ports;
      opts.alpha = cfg.alpha;
      opts.min_spacing = cfg.min_spacing_m();
      opts.normalize_columns = cfg.normalize_columns;
      opts.rule = cfg.residual_rule;

      Selection sel;
      try
      {
        sel = select_ports(dict, vectorize(desired), opts);
      }
      catch (const InfeasibleSpacingError& e)
      {
        if (!cfg.allow_partial_selection || e.achieved() == 0)
          throw;
        sel = e.partial();
        partial = true;
      }
      active = sel.support;
      trace = sel.trace;
      if (cfg.residual_rule == ResidualRule::Modified)
      {
        std::vector<Point2> positions;
        positions.reserve(active.size());
        for (auto l : active)
          positions.push_back(array.position(l));
        weights = weights_from_beam(desired, positions, lambda, cfg.vmode);
      }
      else
      {
        weights = sel.weights;
      }
    }

    BeamPattern synthesized = matricize(angles, dict.synthesize(active, weights));
    const BeamMetrics metrics = compute_metrics(desired, synthesized, region, cfg.guard_cells);

    return SchemeResult{
        .scheme = scheme,
        .initial = std::move(initial),
        .desired = std::move(desired),
        .synthesized = std::move(synthesized),
        .array = std::move(array),
        .active = std::move(active),
        .weights = std::move(weights),
        .trace = std::move(trace),
        .retrieval_residuals = std::move(residuals),
        .partial_selection = partial,
        .metrics = metrics,
    };
  });
}

ComparisonResult compare(const RunConfig& cfg, std::span<const Scheme> schemes)
{
  ComparisonResult out;
  std::vector<LabeledBeam> labeled;
  for (auto s : schemes)
  {
    out.schemes.push_back(run_scheme(cfg, s));
    const auto& r = out.schemes.back();
    labeled.push_back({std::string(to_string(s)), r.desired, r.synthesized});
  }
  out.table = compare_configs(labeled, cfg.region(), cfg.guard_cells);
  return out;
}

PhaseRetrievalResult retrieve_phase(const RunConfig& cfg, BeamPattern* initial)
{
  cfg.validate();
  return with_context("phase-retrieve", [&] {
    const AngularGrid angles = build_angular_grid(cfg.azimuth_samples, cfg.elevation_samples);
    BeamPattern start = make_desired_beam(angles, cfg.region(), cfg.phase_slope, cfg.phase_convention);
    PhaseRetrievalOptions opts;
    opts.iterations = cfg.retrieval_iterations;
    opts.placement = cfg.placement;
    opts.early_stop_tolerance = cfg.early_stop;
    auto result = phase_retrieve(start, cfg.active_ports, opts);
    if (initial != nullptr)
      *initial = std::move(start);
    return result;
  });
}

void write_atomically(const fs::path& dir, const std::function<void(const fs::path&)>& fill)
{
  const fs::path target = fs::absolute(dir).lexically_normal();
  const fs::path parent = target.parent_path();
  const fs::path staging = parent / ("." + target.filename().string() + ".staging");

  fs::create_directories(parent);
  fs::remove_all(staging);
  fs::create_directories(staging);
  try
  {
    fill(staging);
  }
  catch (...)
  {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
  fs::remove_all(target);
  fs::rename(staging, target);
}

void write_scheme_files(const SchemeResult& r, const RunConfig& cfg, const fs::path& dir)
{
  const Eigen::MatrixXd normalized = normalize_beam(r.synthesized);
  const auto xs_theta = cross_section(r.synthesized, CrossSectionAxis::FixedTheta, cfg.xsec_theta_deg * kDegToRad);
  const auto xs_phi = cross_section(r.synthesized, CrossSectionAxis::FixedPhi, cfg.xsec_phi_deg * kDegToRad);
  const MetricsTable table = single_row(r);

  write_file(dir / "heatmap.csv", [&](std::ostream& out) { write_heatmap_csv(out, normalized, cfg.heatmap_db); });
  write_file(dir / "xsec_theta.csv", [&](std::ostream& out) { write_cross_section_csv(out, xs_theta); });
  write_file(dir / "xsec_phi.csv", [&](std::ostream& out) { write_cross_section_csv(out, xs_phi); });
  write_file(dir / "metrics.csv", [&](std::ostream& out) { write_metrics_csv(out, table); });
  write_file(dir / "metrics.txt", [&](std::ostream& out) { write_metrics_text(out, table); });
  write_file(dir / "phase_map.csv", [&](std::ostream& out) { write_matrix_csv(out, r.desired.phase()); });

  write_file(dir / "ports.csv", [&](std::ostream& out) {
    out << "order,port,m,n,x_m,y_m,weight_re,weight_im\n";
    for (std::size_t i = 0; i < r.active.size(); ++i)
    {
      const auto l = r.active[i];
      const auto c = r.array.coord(l);
      const auto pos = r.array.position(l);
      const auto w = r.weights(static_cast<Eigen::Index>(i));
      out << i << ',' << l << ',' << c.m << ',' << c.n << ',' << format_number(pos.x) << ',' << format_number(pos.y)
          << ',' << format_number(w.real()) << ',' << format_number(w.imag()) << '\n';
    }
  });

  if (!r.trace.empty())
  {
    write_file(dir / "trace.jsonl", [&](std::ostream& out) {
      for (std::size_t k = 0; k < r.trace.size(); ++k)
      {
        const auto& s = r.trace[k];
        out << json{{"step", k + 1},
                    {"port", s.port},
                    {"max_correlation", s.max_correlation},
                    {"residual_norm", s.residual_norm}}
                   .dump()
            << '\n';
      }
    });
  }

  const json meta = {
      {"scheme", to_string(r.scheme)},
      {"config", config_json(cfg)},
      {"angular_grid", grid_json(r.synthesized.grid())},
      {"apertures", apertures_json(cfg)},
      {"array",
       array_json(r.array.rows(), r.array.cols(), r.array.spacing() / r.array.wavelength(), r.array.wavelength())},
      {"active_ports", r.active.size()},
      {"requested_ports", r.scheme == Scheme::FluidPhaseOpt ? cfg.active_ports : r.array.size()},
      {"partial_selection", r.partial_selection},
      {"min_pairwise_distance_wavelengths",
       r.active.size() > 1 ? json(pairwise_min_distance(r.array, r.active) / r.array.wavelength()) : json(nullptr)},
      {"retrieval_residuals", r.retrieval_residuals},
      {"metrics", metrics_json(r.metrics)},
      {"xsec_theta_grid_deg", xs_theta.grid_angle * kRadToDeg},
      {"xsec_phi_grid_deg", xs_phi.grid_angle * kRadToDeg},
      {"heatmap_layout", "rows = azimuth samples, columns = elevation samples"},
  };
  write_file(dir / "meta.json", [&](std::ostream& out) { out << meta.dump(2) << '\n'; });
}

void write_comparison_files(const ComparisonResult& result, const RunConfig& cfg, const fs::path& dir)
{
  std::vector<std::string> labels;
  std::vector<CrossSection> theta_cuts;
  std::vector<CrossSection> phi_cuts;
  json schemes = json::array();
  for (const auto& r : result.schemes)
  {
    const std::string label(to_string(r.scheme));
    fs::create_directories(dir / label);
    write_scheme_files(r, cfg, dir / label);
    labels.push_back(label);
    theta_cuts.push_back(cross_section(r.synthesized, CrossSectionAxis::FixedTheta, cfg.xsec_theta_deg * kDegToRad));
    phi_cuts.push_back(cross_section(r.synthesized, CrossSectionAxis::FixedPhi, cfg.xsec_phi_deg * kDegToRad));
    schemes.push_back({{"scheme", label},
                       {"active_ports", r.active.size()},
                       {"partial_selection", r.partial_selection},
                       {"metrics", metrics_json(r.metrics)}});
  }

  write_file(dir / "metrics.csv", [&](std::ostream& out) { write_metrics_csv(out, result.table); });
  write_file(dir / "metrics.txt", [&](std::ostream& out) { write_metrics_text(out, result.table); });
  if (!labels.empty())
  {
    write_file(dir / "xsec_theta.csv", [&](std::ostream& out) { write_overlay(out, labels, theta_cuts); });
    write_file(dir / "xsec_phi.csv", [&](std::ostream& out) { write_overlay(out, labels, phi_cuts); });
  }

  const json meta = {
      {"config", config_json(cfg)},
      {"angular_grid", grid_json(build_angular_grid(cfg.azimuth_samples, cfg.elevation_samples))},
      {"apertures", apertures_json(cfg)},
      {"schemes", schemes},
  };
  write_file(dir / "meta.json", [&](std::ostream& out) { out << meta.dump(2) << '\n'; });
}

void write_retrieval_files(const PhaseRetrievalResult& result, const BeamPattern& initial, const RunConfig& cfg,
                           const fs::path& dir)
{
  write_file(dir / "phase_map_initial.csv", [&](std::ostream& out) { write_matrix_csv(out, initial.phase()); });
  write_file(dir / "phase_map.csv", [&](std::ostream& out) { write_matrix_csv(out, result.pattern.phase()); });
  write_file(dir / "residuals.csv", [&](std::ostream& out) {
    out << "iteration,aperture_residual\n";
    for (std::size_t k = 0; k < result.residuals.size(); ++k)
      out << k << ',' << format_number(result.residuals[k]) << '\n';
  });
  const json meta = {
      {"config", config_json(cfg)},
      {"angular_grid", grid_json(initial.grid())},
      {"aperture_block", exact_sqrt(cfg.active_ports)},
      {"iterations_run", result.iterations_run},
      {"residuals", result.residuals},
  };
  write_file(dir / "meta.json", [&](std::ostream& out) { out << meta.dump(2) << '\n'; });
}

std::string dictionary_stats_json(const RunConfig& cfg)
{
  cfg.validate();
  const AngularGrid angles = build_angular_grid(cfg.azimuth_samples, cfg.elevation_samples);

  auto stats = [&](const PortGrid& ports) {
    const SteeringDictionary dict = build_dictionary(ports, angles, cfg.vmode, Storage::Factored);
    double worst = 0.0;
    for (const auto* factor : {&dict.factor_u(), &dict.factor_v()})
      worst = std::max(worst, (factor->cwiseAbs().array() - 1.0).abs().maxCoeff());
    const std::size_t Z = angles.size();
    const std::size_t L = ports.size();
    const std::size_t factored = Z * (ports.rows() + ports.cols());
    return json{
        {"Z", Z},
        {"L", L},
        {"rows", ports.rows()},
        {"cols", ports.cols()},
        {"dense_entries", Z * L},
        {"factored_entries", factored},
        {"dense_bytes", dense_dictionary_bytes(Z, L)},
        {"factored_bytes", factored * sizeof(cplx)},
        {"dense_fits_cap", dense_dictionary_bytes(Z, L) <= (cfg.dense_cap_mib << 20)},
        {"column_norm", dict.column_norm()},
        {"max_unit_modulus_deviation", worst},
    };
  };

  const json out = {
      {"vmode", to_string(cfg.vmode)},
      {"angular_grid", grid_json(angles)},
      {"apertures", apertures_json(cfg)},
      {"fluid", stats(build_port_grid(cfg.fluid_rows, cfg.fluid_cols, cfg.port_spacing_m(), cfg.wavelength))},
      {"fixed", stats(build_port_grid(cfg.fixed_size, cfg.fixed_size, cfg.fixed_spacing_m(), cfg.wavelength))},
  };
  return out.dump(2);
}

} // namespace fluidbeam
