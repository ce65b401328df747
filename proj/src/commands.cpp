#include "climb/commands.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "climb/csv.hpp"
#include "climb/error.hpp"
#include "climb/report.hpp"

namespace climb {

namespace fs = std::filesystem;

void Overrides::apply(Scenario& scenario) const {
  if (seed) scenario.terrain.seed = *seed;
  if (out) scenario.output_dir = *out;
  if (strategy) scenario.strategy = *strategy;
  if (duration) scenario.sim.duration = *duration;
  scenario.validate();
}

void require_same_terrain(const Scenario& a, const Scenario& b) {
  const TerrainParams& p = a.terrain;
  const TerrainParams& q = b.terrain;
  bool same = a.terrain_kind == b.terrain_kind;
  if (a.terrain_kind == TerrainKind::file) {
    same = same && a.terrain_file == b.terrain_file;
  } else {
    same = same && p.x_min == q.x_min && p.y_min == q.y_min && p.x_max == q.x_max && p.y_max == q.y_max &&
           p.resolution == q.resolution;
    if (a.terrain_kind == TerrainKind::fractal)
      same = same && p.seed == q.seed && p.sigma == q.sigma && p.roughness == q.roughness;
  }
  if (!same)
    throw Error(Errc::seed_mismatch, "scenarios '" + a.name + "' and '" + b.name + "' use different terrains (seeds " +
                                         std::to_string(p.seed) + " and " + std::to_string(q.seed) + ")");
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
  return out;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create '" + dir.string() + "': " + ec.message());
}

Scenario prepare(const std::string& path, const Overrides& overrides, std::ostream& log) {
  Scenario s = load_scenario(path);
  overrides.apply(s);
  for (const std::string& notice : s.notices) log << "notice: " << notice << '\n';
  return s;
}

ChartOptions force_chart(std::string title) {
  ChartOptions o;
  o.title = std::move(title);
  o.y_label = "max pulling force (N)";
  return o;
}

ChartOptions gia_chart(std::string title) {
  ChartOptions o;
  o.title = std::move(title);
  o.y_label = "GIA margin (m)";
  o.threshold = 0.0;
  return o;
}

void write_run(const fs::path& dir, const Scenario& s, const ScenarioRun& run) {
  make_dir(dir);
  {
    auto out = open_out(dir / "manifest.ini");
    write_manifest(out, s);
  }
  {
    auto out = open_out(dir / "trace.csv");
    write_trace_csv(out, run.trace, s.trace_stride);
  }
  {
    auto out = open_out(dir / "summary.txt");
    out << "scenario: " << s.name << '\n' << "strategy: " << to_string(s.strategy) << '\n'
        << "terrain_seed: " << s.terrain.seed << '\n';
    write_summary(out, run.summary);
  }
  {
    auto out = open_out(dir / "gait_plan.csv");
    write_phase_table(out, run.plan);
  }
  {
    auto out = open_out(dir / "timeline.csv");
    write_timeline_csv(out, run.timeline, s.robot, s.trace_stride);
  }
  {
    auto out = open_out(dir / "force.svg");
    ChartOptions o = force_chart("Max. pulling force: " + s.name);
    o.threshold = s.contact.hold_force;
    o.threshold_label = "holding limit";
    write_line_chart(out, {force_series(run.trace, s.trace_stride, s.name, "#1f77b4")}, o);
  }
  {
    auto out = open_out(dir / "gia.svg");
    write_line_chart(out, {gia_series(run.trace, s.trace_stride, s.name, "#1f77b4")},
                     gia_chart("GIA margin: " + s.name));
  }
}

void report(std::ostream& log, const Scenario& s, const RunSummary& r) {
  log << s.name << " (" << to_string(s.strategy) << ", seed " << s.terrain.seed << "): "
      << (r.success ? "completed" : r.completed ? "completed with failures" : "stopped") << ", "
      << r.detachments.size() << " detachments, " << r.missed_grasps.size() << " missed grasps, max pull "
      << r.max_pull << " N, min GIA margin " << r.min_gia << " m\n";
  if (!r.detachments.empty())
    log << "first detachment: limb " << r.detachments.front().limb << " at t = " << r.detachments.front().t << " s\n";
  if (!r.missed_grasps.empty())
    log << "first missed grasp: limb " << r.missed_grasps.front().limb << " at t = " << r.missed_grasps.front().t
        << " s\n";
}

}  // namespace

int cmd_run(const std::string& scenario_path, const Overrides& overrides, std::ostream& log, std::ostream& err) {
  try {
    const Scenario s = prepare(scenario_path, overrides, log);
    const ScenarioRun run = run_scenario(s);
    write_run(s.output_dir, s, run);
    report(log, s, run.summary);
    const bool failure = !run.summary.detachments.empty() || !run.summary.missed_grasps.empty();
    return failure ? exit_failure_event : exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
}

int cmd_compare(const std::string& path_a, const std::string& path_b, const Overrides& overrides, std::ostream& log,
                std::ostream& err) {
  try {
    Overrides per_run = overrides;
    per_run.out.reset();
    Scenario a = prepare(path_a, per_run, log);
    Scenario b = prepare(path_b, per_run, log);
    require_same_terrain(a, b);
    const fs::path dir = overrides.out ? *overrides.out : a.output_dir;
    a.output_dir = (dir / "a").string();
    b.output_dir = (dir / "b").string();

    auto job_b = std::async(std::launch::async, [&b] { return run_scenario(b); });
    const ScenarioRun ra = run_scenario(a);
    const ScenarioRun rb = job_b.get();
    write_run(a.output_dir, a, ra);
    write_run(b.output_dir, b, rb);
    report(log, a, ra.summary);
    report(log, b, rb.summary);

    const int stride = a.trace_stride;
    {
      auto out = open_out(dir / "force_compare.svg");
      ChartOptions o = force_chart("Max. pulling force");
      o.threshold = a.contact.hold_force;
      o.threshold_label = "holding limit";
      write_line_chart(out,
                       {force_series(ra.trace, stride, a.name, "#1f77b4"), force_series(rb.trace, stride, b.name, "#ff7f0e")},
                       o);
    }
    {
      auto out = open_out(dir / "gia_compare.svg");
      write_line_chart(out,
                       {gia_series(ra.trace, stride, a.name, "#1f77b4"), gia_series(rb.trace, stride, b.name, "#ff7f0e")},
                       gia_chart("GIA margin"));
    }
    {
      auto out = open_out(dir / "delta.txt");
      out << "metric,a,b,b_minus_a\n";
      auto row = [&](const char* name, double va, double vb) {
        out << name << ',';
        put_number(out, va);
        out << ',';
        put_number(out, vb);
        out << ',';
        put_number(out, vb - va);
        out << '\n';
      };
      const RunSummary& sa = ra.summary;
      const RunSummary& sb = rb.summary;
      row("detachments", double(sa.detachments.size()), double(sb.detachments.size()));
      row("missed_grasps", double(sa.missed_grasps.size()), double(sb.missed_grasps.size()));
      row("duration_s", sa.duration, sb.duration);
      row("max_contact_force_n", sa.max_force, sb.max_force);
      row("max_pull_force_n", sa.max_pull, sb.max_pull);
      row("min_gia_margin_m", sa.min_gia, sb.min_gia);
      row("mean_forward_velocity_m_s", sa.mean_forward_velocity, sb.mean_forward_velocity);
      row("peak_base_linear_accel_m_s2", sa.peak_base_linear_accel, sb.peak_base_linear_accel);
      row("peak_base_angular_accel_rad_s2", sa.peak_base_angular_accel, sb.peak_base_angular_accel);
      row("mean_swing_peak_momentum_rate", sa.mean_peak_rate, sb.mean_peak_rate);
    }
    log << "comparison written to " << dir.string() << '\n';
    return exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
}

int cmd_terrain(const TerrainParams& params, const std::string& out_path, std::ostream& log, std::ostream& err) {
  try {
    const TerrainMap map = generate_fractal(params);
    const fs::path path(out_path);
    if (path.has_parent_path()) make_dir(path.parent_path());
    {
      auto out = open_out(path);
      write_terrain_csv(out, map);
    }
    fs::path preview = path;
    preview.replace_extension(".svg");
    {
      auto out = open_out(preview);
      write_heightmap_svg(out, map);
    }
    log << "elevation_std: " << map.elevation_std() << '\n';
    log << "wrote " << path.string() << " and " << preview.string() << '\n';
    return exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
}

}  // namespace climb
