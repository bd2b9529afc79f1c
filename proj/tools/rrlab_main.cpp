// Command-line front end: scenario runs and the preset gallery.
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rrlab/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for point-charge electrodynamics with "
               "radiation reaction"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir;
  double tolerance = 0.0;
  std::uint64_t seed = 0;

  CLI::App* run =
      app.add_subcommand("run", "integrate a scenario and write its artifacts");
  run->add_option("config", config_path, "scenario config file (JSON)");
  run->add_option("--preset", preset_name,
                  "run a gallery preset instead of a config file");
  run->add_option("--out", out_dir, "output directory override");
  CLI::Option* tol_opt = run->add_option(
      "--tolerance", tolerance,
      "override the integrator relative tolerance (absolute follows at 1/100)");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "override the scenario seed");

  CLI::App* list =
      app.add_subcommand("list-presets", "print the preset gallery");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      std::size_t width = 0;
      for (const rrlab::Preset& p : rrlab::preset_gallery())
        width = std::max(width, p.name.size());
      for (const rrlab::Preset& p : rrlab::preset_gallery())
        std::cout << std::left << std::setw(static_cast<int>(width)) << p.name
                  << "  " << p.rationale << "\n";
      return 0;
    }

    rrlab::Scenario sc;
    if (!preset_name.empty() && !config_path.empty()) {
      std::cerr << "error: give either a config file or --preset, not both\n";
      return 1;
    }
    if (!preset_name.empty()) {
      sc = rrlab::preset_scenario(preset_name);
    } else if (!config_path.empty()) {
      sc = rrlab::load_scenario(config_path);
    } else {
      std::cerr << "error: run needs a config file or --preset\n";
      return 1;
    }
    if (!out_dir.empty()) sc.out_dir = out_dir;
    if (*tol_opt) {
      sc.integrator.rel_tol = tolerance;
      sc.integrator.abs_tol = 0.01 * tolerance;
    }
    if (*seed_opt) sc.seed = seed;

    rrlab::validate_scenario(sc);
    return rrlab::run_scenario(sc, std::cout).exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
