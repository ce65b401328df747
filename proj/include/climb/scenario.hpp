#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "climb/gait.hpp"
#include "climb/motion.hpp"
#include "climb/robot_model.hpp"
#include "climb/sim.hpp"
#include "climb/terrain.hpp"

namespace climb {

enum class TerrainKind { fractal, flat, file };

/// Everything one run needs. Parsed from the sectioned key = value format
/// documented in the README; `notices` lists the defaults that were filled in.
struct Scenario {
  std::string name = "scenario";
  Strategy strategy = Strategy::proposed;
  int cycles = 1;

  std::string robot_preset = "reference_quadruped";
  RobotModel robot;

  TerrainKind terrain_kind = TerrainKind::fractal;
  TerrainParams terrain;
  std::string terrain_file;

  GaitConfig gait;
  Vec2 start = Vec2(0.4, 1.0);   // initial base position in the horizontal plane

  LrstConfig lrst;
  MdConfig md;
  ContactModel contact;          // parameters only; anchors are set per run
  SimConfig sim;

  std::string output_dir = "out";
  int trace_stride = 10;

  std::vector<std::string> notices;

  void validate() const;
};

/// Throws Errc::parse_error (with line and column) or Errc::validation_error
/// (with the offending key).
Scenario parse_scenario(std::string_view text, const std::string& origin = "<scenario>");
Scenario load_scenario(const std::string& path);

/// Every resolved value in the scenario format; loading it reproduces the run.
void write_manifest(std::ostream& out, const Scenario& scenario);

TerrainMap build_terrain(const Scenario& scenario);

/// Standing stance at `start`: home footholds dropped onto the surface and
/// the base placed clear of the ground, identical for both strategies.
RobotState initial_state(const Scenario& scenario, const TerrainMap& map);

struct ScenarioRun {
  RobotState initial;
  GaitPlan plan;
  MotionTimeline timeline;
  SimTrace trace;
  RunSummary summary;
};

/// Plans the gait and motion and simulates them. A positive sim duration
/// extends the plan to cover it and truncates the simulation there.
ScenarioRun run_scenario(const Scenario& scenario);

}  // namespace climb
