#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "climb/gait.hpp"
#include "climb/scenario.hpp"
#include "climb/terrain.hpp"

namespace climb {

/// Command-line overrides applied on top of a loaded scenario.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<Strategy> strategy;
  std::optional<double> duration;

  void apply(Scenario& scenario) const;
};

/// Exit codes shared by all commands.
inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_failure_event = 2;

/// Plans and simulates one scenario and writes trace.csv, summary.txt,
/// manifest.ini, timeline.csv, gait_plan.csv, force.svg and gia.svg into the
/// output directory. Returns 2 when a detachment or missed grasp ended the run.
int cmd_run(const std::string& scenario_path, const Overrides& overrides, std::ostream& log, std::ostream& err);

/// Runs two scenarios on the same terrain and writes overlay charts plus a
/// delta table. Fails with Errc::seed_mismatch when the terrains differ.
int cmd_compare(const std::string& path_a, const std::string& path_b, const Overrides& overrides, std::ostream& log,
                std::ostream& err);

/// Writes the terrain CSV and an SVG preview next to it; prints the achieved
/// elevation standard deviation.
int cmd_terrain(const TerrainParams& params, const std::string& out_path, std::ostream& log, std::ostream& err);

/// Raises Errc::seed_mismatch unless both scenarios generate the same terrain.
void require_same_terrain(const Scenario& a, const Scenario& b);

}  // namespace climb
