// Command-line front end: terrain generation, single runs and A/B comparisons.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "climb/commands.hpp"
#include "climb/error.hpp"
#include "climb/gait.hpp"

namespace {

struct OverrideFlags {
  std::uint64_t seed = 0;
  std::string out;
  std::string strategy;
  double duration = 0.0;
};

void add_override_flags(CLI::App* cmd, OverrideFlags& flags) {
  cmd->add_option("--seed", flags.seed, "terrain seed override");
  cmd->add_option("--out", flags.out, "output directory override");
  cmd->add_option("--strategy", flags.strategy, "baseline or proposed");
  cmd->add_option("--duration", flags.duration, "simulated duration override (s)")->check(CLI::PositiveNumber);
}

climb::Overrides collect(const CLI::App* cmd, const OverrideFlags& flags) {
  climb::Overrides o;
  if (cmd->count("--seed")) o.seed = flags.seed;
  if (cmd->count("--out")) o.out = flags.out;
  if (cmd->count("--strategy")) o.strategy = climb::parse_strategy(flags.strategy);
  if (cmd->count("--duration")) o.duration = flags.duration;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motion planning and batch simulation for limbed climbing robots in microgravity"};
  app.require_subcommand(1);

  climb::TerrainParams terrain;
  std::string terrain_out = "terrain.csv";
  auto* terrain_cmd = app.add_subcommand("terrain", "generate a fractal terrain map");
  terrain_cmd->add_option("--seed", terrain.seed, "random seed");
  terrain_cmd->add_option("--sigma", terrain.sigma, "elevation standard deviation (m)")->check(CLI::NonNegativeNumber);
  terrain_cmd->add_option("--roughness", terrain.roughness, "Hurst exponent")->check(CLI::Range(0.0, 1.0));
  terrain_cmd->add_option("--resolution", terrain.resolution, "grid spacing (m)")->check(CLI::PositiveNumber);
  terrain_cmd->add_option("--x-min", terrain.x_min);
  terrain_cmd->add_option("--y-min", terrain.y_min);
  terrain_cmd->add_option("--x-max", terrain.x_max);
  terrain_cmd->add_option("--y-max", terrain.y_max);
  terrain_cmd->add_option("--out", terrain_out, "output CSV; an SVG preview is written next to it");

  std::string run_path;
  OverrideFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "plan and simulate one scenario");
  run_cmd->add_option("--scenario", run_path, "scenario file")->required();
  add_override_flags(run_cmd, run_flags);

  std::vector<std::string> compare_paths;
  OverrideFlags compare_flags;
  auto* compare_cmd = app.add_subcommand("compare", "run two scenarios on the same terrain");
  compare_cmd->add_option("--scenario", compare_paths, "scenario files A and B")->required()->expected(2);
  add_override_flags(compare_cmd, compare_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return climb::exit_error;
  }

  try {
    if (terrain_cmd->parsed()) return climb::cmd_terrain(terrain, terrain_out, std::cout, std::cerr);
    if (run_cmd->parsed()) return climb::cmd_run(run_path, collect(run_cmd, run_flags), std::cout, std::cerr);
    return climb::cmd_compare(compare_paths[0], compare_paths[1], collect(compare_cmd, compare_flags), std::cout,
                              std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return climb::exit_error;
  }
}
