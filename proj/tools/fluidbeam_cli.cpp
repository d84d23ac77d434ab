// fluidbeam: synthesize desired beams on fixed and fluid antenna arrays.
//
//   fluidbeam run --scheme fluid-phaseopt -o out/fluid
//   fluidbeam compare --config table1.conf
//   fluidbeam phase-retrieve --retrieval-iterations 100
//   fluidbeam export-dict-stats
//
// Exit codes: 0 success, 2 config error, 3 infeasible spacing,
// 4 degenerate beam, 1 anything else (I/O).

#include "fluidbeam/config.hpp"
#include "fluidbeam/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace fluidbeam;

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitDegenerate = 4;

fs::path output_dir(const RunConfig& cfg, std::string_view fallback)
{
  if (!cfg.output_dir.empty())
    return cfg.output_dir;
  const char* root = std::getenv("FLUIDBEAM_OUTPUT_ROOT");
  return fs::path(root != nullptr && *root != '\0' ? root : "fluidbeam-out") / std::string(fallback);
}

int dispatch(const RunConfig& cfg, const CLI::App& app, const std::string& stats_path)
{
  if (app.got_subcommand("run"))
  {
    const auto result = run_scheme(cfg, cfg.scheme);
    const auto dir = output_dir(cfg, to_string(cfg.scheme));
    write_atomically(dir, [&](const fs::path& staging) { write_scheme_files(result, cfg, staging); });
    if (result.partial_selection)
      std::cerr << "warning: spacing rule stopped selection at " << result.active.size() << " of "
                << cfg.active_ports << " ports\n";
    MetricsTable table;
    table.labels.emplace_back(to_string(result.scheme));
    table.rows.push_back(result.metrics);
    write_metrics_text(std::cout, table);
    std::cout << "wrote " << dir.string() << '\n';
    return 0;
  }
  if (app.got_subcommand("compare"))
  {
    const auto result = compare(cfg);
    const auto dir = output_dir(cfg, "compare");
    write_atomically(dir, [&](const fs::path& staging) { write_comparison_files(result, cfg, staging); });
    write_metrics_text(std::cout, result.table);
    std::cout << "wrote " << dir.string() << '\n';
    return 0;
  }
  if (app.got_subcommand("phase-retrieve"))
  {
    BeamPattern initial(build_angular_grid(cfg.azimuth_samples, cfg.elevation_samples));
    const auto result = retrieve_phase(cfg, &initial);
    const auto dir = output_dir(cfg, "phase-retrieve");
    write_atomically(dir, [&](const fs::path& staging) { write_retrieval_files(result, initial, cfg, staging); });
    std::cout << "aperture residual " << format_number(result.residuals.front()) << " -> "
              << format_number(result.residuals.back()) << " after " << result.iterations_run << " iterations\n"
              << "wrote " << dir.string() << '\n';
    return 0;
  }
  if (app.got_subcommand("export-dict-stats"))
  {
    const std::string text = dictionary_stats_json(cfg);
    if (stats_path.empty())
    {
      std::cout << text << '\n';
    }
    else
    {
      std::ofstream out(stats_path);
      out << text << '\n';
      if (!out)
        throw std::runtime_error("cannot write " + stats_path);
    }
    return 0;
  }
  std::cerr << app.help();
  return kExitConfig;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Beam pattern synthesis on fixed and fluid antenna arrays"};
  app.set_config("--config", "", "Read options from a `key = value` file");
  ConfigBinder binder(app);
  bool dump_config = false;
  app.add_flag("--dump-config", dump_config, "Print the effective configuration and exit");

  app.add_subcommand("run", "Run one scheme and write its result bundle")->fallthrough();
  app.add_subcommand("compare", "Run fixed, fixed-phaseopt and fluid-phaseopt on one desired beam")->fallthrough();
  app.add_subcommand("phase-retrieve", "Only refine the phase of the desired beam")->fallthrough();
  std::string stats_path;
  auto* stats = app.add_subcommand("export-dict-stats", "Report steering dictionary sizes and checks");
  stats->fallthrough();
  stats->add_option("--json", stats_path, "Write to this file instead of stdout");
  app.require_subcommand(0, 1);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try
  {
    const RunConfig cfg = binder.resolve();
    if (dump_config)
    {
      std::cout << serialize_config(cfg);
      return 0;
    }
    return dispatch(cfg, app, stats_path);
  }
  catch (const InfeasibleSpacingError& e)
  {
    std::cerr << "error: " << e.what() << "\n(use --allow-partial-selection to keep the ports chosen so far)\n";
    return kExitInfeasible;
  }
  catch (const DegenerateBeamError& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  }
  catch (const ParameterError& e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  catch (const DegenerateRegionError& e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  catch (const CapacityError& e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
