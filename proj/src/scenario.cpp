#include "climb/scenario.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "climb/csv.hpp"
#include "climb/error.hpp"

namespace climb {

namespace {

struct Value {
  std::string text;
  int line = 0;
  int column = 0;
  std::string key;   // section.key, for messages
};

[[noreturn]] void parse_fail(const Value& v, const std::string& what) {
  throw Error(Errc::parse_error, "line " + std::to_string(v.line) + ", column " + std::to_string(v.column) + ": " +
                                     v.key + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double as_double(const Value& v, std::string_view text) {
  text = trim(text);
  double out = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), out);
  if (text.empty() || r.ec != std::errc() || r.ptr != text.data() + text.size())
    parse_fail(v, "expected a number, got '" + std::string(text) + "'");
  return out;
}

double as_double(const Value& v) { return as_double(v, v.text); }

long as_int(const Value& v, std::string_view text) {
  text = trim(text);
  long out = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), out);
  if (text.empty() || r.ec != std::errc() || r.ptr != text.data() + text.size())
    parse_fail(v, "expected an integer, got '" + std::string(text) + "'");
  return out;
}

long as_int(const Value& v) { return as_int(v, v.text); }

bool as_bool(const Value& v) {
  if (v.text == "true") return true;
  if (v.text == "false") return false;
  parse_fail(v, "expected true or false, got '" + v.text + "'");
}

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = text.find(',', pos);
    parts.push_back(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return parts;
}

std::vector<double> as_list(const Value& v) {
  std::vector<double> out;
  for (std::string_view part : split(v.text)) out.push_back(as_double(v, part));
  return out;
}

std::vector<double> as_list(const Value& v, std::size_t n) {
  std::vector<double> out = as_list(v);
  if (out.size() != n) parse_fail(v, "expected " + std::to_string(n) + " comma-separated numbers");
  return out;
}

std::string number(double v) {
  std::ostringstream s;
  put_number(s, v);
  return s.str();
}

template <typename Seq>
std::string number_list(const Seq& values) {
  std::string out;
  for (const auto& x : values) {
    if (!out.empty()) out += ", ";
    out += number(static_cast<double>(x));
  }
  return out;
}

struct Entry {
  std::string section;
  std::string key;
  std::function<void(Scenario&, const Value&)> set;
  std::function<std::optional<std::string>(const Scenario&)> get;
  bool notify = false;   // log a notice when the default is used
};

#define CLIMB_DOUBLE(sec, name, field, note)                                        \
  Entry {                                                                           \
    sec, name, [](Scenario& s, const Value& v) { s.field = as_double(v); },        \
        [](const Scenario& s) -> std::optional<std::string> { return number(s.field); }, note \
  }
#define CLIMB_INT(sec, name, field, note)                                                       \
  Entry {                                                                                       \
    sec, name, [](Scenario& s, const Value& v) { s.field = static_cast<decltype(s.field)>(as_int(v)); }, \
        [](const Scenario& s) -> std::optional<std::string> { return std::to_string(s.field); }, note  \
  }

const std::vector<Entry>& schema() {
  static const std::vector<Entry> entries = {
      {"scenario", "name", [](Scenario& s, const Value& v) { s.name = v.text; },
       [](const Scenario& s) -> std::optional<std::string> { return s.name; }},
      {"scenario", "strategy",
       [](Scenario& s, const Value& v) {
         try {
           s.strategy = parse_strategy(v.text);
         } catch (const Error&) {
           parse_fail(v, "expected baseline or proposed");
         }
       },
       [](const Scenario& s) -> std::optional<std::string> { return std::string(to_string(s.strategy)); }},
      CLIMB_INT("scenario", "cycles", cycles, false),

      {"robot", "preset", [](Scenario& s, const Value& v) { s.robot_preset = v.text; },
       [](const Scenario& s) -> std::optional<std::string> { return s.robot_preset; }},
      {"robot", "base_mass",
       [](Scenario& s, const Value& v) {
         const double m = as_double(v);
         if (!(m > 0.0)) parse_fail(v, "expected a positive mass");
         if (m == s.robot.base.mass) return;
         s.robot.base.inertia *= m / s.robot.base.mass;
         s.robot.base.mass = m;
       },
       [](const Scenario& s) -> std::optional<std::string> { return number(s.robot.base.mass); }},

      {"terrain", "type",
       [](Scenario& s, const Value& v) {
         if (v.text == "fractal")
           s.terrain_kind = TerrainKind::fractal;
         else if (v.text == "flat")
           s.terrain_kind = TerrainKind::flat;
         else if (v.text == "file")
           s.terrain_kind = TerrainKind::file;
         else
           parse_fail(v, "expected fractal, flat or file");
       },
       [](const Scenario& s) -> std::optional<std::string> {
         return s.terrain_kind == TerrainKind::fractal ? "fractal" : s.terrain_kind == TerrainKind::flat ? "flat" : "file";
       }},
      {"terrain", "file", [](Scenario& s, const Value& v) { s.terrain_file = v.text; },
       [](const Scenario& s) -> std::optional<std::string> {
         if (s.terrain_file.empty()) return std::nullopt;
         return s.terrain_file;
       }},
      {"terrain", "seed",
       [](Scenario& s, const Value& v) {
         const long seed = as_int(v);
         if (seed < 0) parse_fail(v, "expected a non-negative integer");
         s.terrain.seed = static_cast<std::uint64_t>(seed);
       },
       [](const Scenario& s) -> std::optional<std::string> { return std::to_string(s.terrain.seed); }},
      CLIMB_DOUBLE("terrain", "sigma", terrain.sigma, false),
      CLIMB_DOUBLE("terrain", "roughness", terrain.roughness, false),
      CLIMB_DOUBLE("terrain", "x_min", terrain.x_min, false),
      CLIMB_DOUBLE("terrain", "y_min", terrain.y_min, false),
      CLIMB_DOUBLE("terrain", "x_max", terrain.x_max, false),
      CLIMB_DOUBLE("terrain", "y_max", terrain.y_max, false),
      CLIMB_DOUBLE("terrain", "resolution", terrain.resolution, false),

      CLIMB_DOUBLE("gait", "swing_period", gait.swing_period, false),
      {"gait", "order",
       [](Scenario& s, const Value& v) {
         s.gait.order.clear();
         for (std::string_view part : split(v.text)) s.gait.order.push_back(static_cast<int>(as_int(v, part)));
       },
       [](const Scenario& s) -> std::optional<std::string> { return number_list(s.gait.order); }},
      CLIMB_DOUBLE("gait", "stride", gait.stride, false),
      {"gait", "heading",
       [](Scenario& s, const Value& v) {
         const auto h = as_list(v, 2);
         s.gait.heading = Vec2(h[0], h[1]);
       },
       [](const Scenario& s) -> std::optional<std::string> {
         return number_list(std::vector<double>{s.gait.heading.x(), s.gait.heading.y()});
       }},
      CLIMB_DOUBLE("gait", "step_height", gait.step_height, false),
      CLIMB_DOUBLE("gait", "nominal_height", gait.nominal_height, false),
      CLIMB_DOUBLE("gait", "clearance", gait.clearance, false),
      CLIMB_DOUBLE("gait", "dwell", gait.dwell, false),
      CLIMB_INT("gait", "path_samples", gait.path_samples, false),
      {"gait", "start",
       [](Scenario& s, const Value& v) {
         const auto p = as_list(v, 2);
         s.start = Vec2(p[0], p[1]);
       },
       [](const Scenario& s) -> std::optional<std::string> {
         return number_list(std::vector<double>{s.start.x(), s.start.y()});
       }},

      CLIMB_DOUBLE("lrst", "c_lin", lrst.c_lin, false),
      CLIMB_DOUBLE("lrst", "c_ang", lrst.c_ang, false),
      CLIMB_DOUBLE("lrst", "c_height", lrst.c_height, false),
      CLIMB_INT("lrst", "samples", lrst.samples, false),
      CLIMB_INT("lrst", "restarts", lrst.restarts, false),
      CLIMB_INT("lrst", "max_iterations", lrst.max_iterations, false),
      CLIMB_DOUBLE("lrst", "tolerance", lrst.tolerance, false),
      CLIMB_DOUBLE("lrst", "initial_step", lrst.initial_step, false),
      CLIMB_INT("lrst", "seed", lrst.seed, false),

      CLIMB_DOUBLE("md", "w_min", md.w_min, false),
      CLIMB_DOUBLE("md", "w_max", md.w_max, false),
      {"md", "alpha", [](Scenario& s, const Value& v) { s.md.fixed_alpha = as_double(v); },
       [](const Scenario& s) -> std::optional<std::string> {
         if (!s.md.fixed_alpha) return std::nullopt;
         return number(*s.md.fixed_alpha);
       }},

      CLIMB_DOUBLE("contact", "stiffness", contact.stiffness, true),
      CLIMB_DOUBLE("contact", "damping", contact.damping, true),
      CLIMB_DOUBLE("contact", "hold_force", contact.hold_force, true),

      CLIMB_DOUBLE("sim", "gravity", sim.gravity_g, true),
      CLIMB_DOUBLE("sim", "step", sim.step, true),
      CLIMB_DOUBLE("sim", "duration", sim.duration, false),
      CLIMB_DOUBLE("sim", "servo_frequency", sim.servo_frequency, true),
      CLIMB_DOUBLE("sim", "servo_damping", sim.servo_damping, true),
      CLIMB_DOUBLE("sim", "accel_bound", sim.accel_bound, false),
      CLIMB_DOUBLE("sim", "divergence_bound", sim.divergence_bound, false),
      CLIMB_DOUBLE("sim", "grasp_tolerance", sim.grasp_tolerance, false),
      {"sim", "stop_on_failure", [](Scenario& s, const Value& v) { s.sim.stop_on_failure = as_bool(v); },
       [](const Scenario& s) -> std::optional<std::string> { return s.sim.stop_on_failure ? "true" : "false"; }},

      {"output", "dir", [](Scenario& s, const Value& v) { s.output_dir = v.text; },
       [](const Scenario& s) -> std::optional<std::string> { return s.output_dir; }},
      CLIMB_INT("output", "trace_stride", trace_stride, false),
  };
  return entries;
}

#undef CLIMB_DOUBLE
#undef CLIMB_INT

RobotModel make_preset(const std::string& name) {
  if (name == "reference_quadruped") return make_reference_quadruped();
  if (name == "planar_two_arm") return make_planar_two_arm();
  throw Error(Errc::validation_error, "robot.preset: unknown preset '" + name + "'");
}

// Limb overrides: link_masses and link_lengths, one value per joint.
void apply_limb_override(LimbModel& limb, const Value& v, const std::string& key) {
  const auto values = as_list(v, limb.joints.size());
  for (std::size_t j = 0; j < limb.joints.size(); ++j) {
    JointModel& jt = limb.joints[j];
    if (!(values[j] > 0.0)) parse_fail(v, "expected positive values");
    // unchanged values leave the preset bits alone so manifests reload exactly
    if (key == "link_masses") {
      if (values[j] == jt.mass) continue;
      jt.mass = values[j];
    } else {
      if (values[j] == jt.link.norm() || jt.link.norm() == 0.0) continue;
      jt.link = values[j] * jt.link.normalized();
    }
    jt.inertia = rod_inertia(jt.mass, jt.link.norm());
  }
}

}  // namespace

void Scenario::validate() const {
  robot.validate();
  if (cycles < 0) throw Error(Errc::validation_error, "scenario.cycles: must be non-negative");
  gait.validate();
  if (gait.n_limbs() != robot.n_limbs())
    throw Error(Errc::validation_error, "gait.order: must list each of the " + std::to_string(robot.n_limbs()) + " limbs");
  std::set<int> seen(gait.order.begin(), gait.order.end());
  if (static_cast<int>(seen.size()) != robot.n_limbs() || *seen.begin() < 0 || *seen.rbegin() >= robot.n_limbs())
    throw Error(Errc::validation_error, "gait.order: must be a permutation of the limb indices");
  lrst.validate();
  md.validate();
  ContactModel params = contact;
  params.anchors.clear();
  params.normals.clear();
  params.attached.clear();
  params.validate();
  sim.validate();
  if (trace_stride < 1) throw Error(Errc::validation_error, "output.trace_stride: must be at least 1");
  if (terrain_kind == TerrainKind::file && terrain_file.empty())
    throw Error(Errc::validation_error, "terrain.file: required when terrain.type = file");
  if (!(terrain.resolution > 0.0) || !(terrain.x_max > terrain.x_min) || !(terrain.y_max > terrain.y_min))
    throw Error(Errc::validation_error, "terrain: extents and resolution must be positive");
}

Scenario parse_scenario(std::string_view text, const std::string& origin) {
  std::map<std::string, Value> values;          // "section.key" -> value
  std::map<int, std::map<std::string, Value>> limb_values;

  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    // strip comments: '#' or ';' at line start or after whitespace
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if ((raw[i] == '#' || raw[i] == ';') && (i == 0 || raw[i - 1] == ' ' || raw[i - 1] == '\t')) {
        raw = raw.substr(0, i);
        break;
      }
    }
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(Errc::parse_error, origin + ": line " + std::to_string(line_no) + ", column " +
                                           std::to_string(indent) + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        throw Error(Errc::parse_error, origin + ": line " + std::to_string(line_no) + ", column " +
                                           std::to_string(indent) + ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::parse_error, origin + ": line " + std::to_string(line_no) + ", column " +
                                         std::to_string(indent) + ": expected 'key = value'");
    if (section.empty())
      throw Error(Errc::parse_error, origin + ": line " + std::to_string(line_no) + ", column " +
                                         std::to_string(indent) + ": key outside of a section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    Value v;
    v.text = std::string(value);
    v.line = line_no;
    v.column = indent + static_cast<int>(line.size() - value.size());
    if (value.empty()) v.column = indent + static_cast<int>(eq) + 1;
    v.key = section + "." + key;
    if (key.empty())
      throw Error(Errc::parse_error, origin + ": line " + std::to_string(line_no) + ", column " +
                                         std::to_string(indent) + ": empty key");

    if (section.rfind("limb.", 0) == 0) {
      const std::string idx = section.substr(5);
      int limb = -1;
      const auto r = std::from_chars(idx.data(), idx.data() + idx.size(), limb);
      if (r.ec != std::errc() || r.ptr != idx.data() + idx.size() || limb < 0)
        throw Error(Errc::validation_error, section + ": limb sections are named [limb.N]");
      if (key != "link_masses" && key != "link_lengths")
        throw Error(Errc::validation_error, v.key + ": unknown key");
      limb_values[limb][key] = v;
      continue;
    }
    if (values.count(v.key)) throw Error(Errc::validation_error, v.key + ": set twice");
    values[v.key] = v;
  }

  Scenario s;
  // The preset decides the robot and the defaults keyed to it.
  if (auto it = values.find("robot.preset"); it != values.end()) s.robot_preset = it->second.text;
  s.robot = make_preset(s.robot_preset);
  s.gait.planar = s.robot.planar;
  if (s.robot.planar) {
    s.gait.order = {0, 1};
    s.terrain_kind = TerrainKind::flat;
  } else {
    s.gait.order = {2, 3, 0, 1};
  }

  std::set<std::string> known;
  for (const Entry& e : schema()) {
    const std::string full = e.section + "." + e.key;
    known.insert(full);
    if (auto it = values.find(full); it != values.end()) {
      if (it->second.text.empty()) parse_fail(it->second, "missing value");
      e.set(s, it->second);
    } else if (e.notify) {
      s.notices.push_back(full + " not set; using default " + e.get(s).value_or(""));
    }
  }
  for (const auto& [full, v] : values)
    if (!known.count(full)) throw Error(Errc::validation_error, full + ": unknown key");

  for (const auto& [limb, entries] : limb_values) {
    if (limb >= s.robot.n_limbs())
      throw Error(Errc::validation_error, "limb." + std::to_string(limb) + ": robot has only " +
                                              std::to_string(s.robot.n_limbs()) + " limbs");
    // masses first so a length override recomputes inertia with the new mass
    for (const char* key : {"link_masses", "link_lengths"})
      if (auto it = entries.find(key); it != entries.end())
        apply_limb_override(s.robot.limbs[limb], it->second, key);
  }
  s.lrst.step_height = s.gait.step_height;

  try {
    s.validate();
  } catch (const Error& e) {
    if (e.code() == Errc::bad_config) throw Error(Errc::validation_error, std::string("robot: ") + e.what());
    throw;
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

void write_manifest(std::ostream& out, const Scenario& s) {
  out << "# resolved scenario; loading this file reproduces the run\n";
  std::string section;
  for (const Entry& e : schema()) {
    const std::optional<std::string> v = e.get(s);
    if (!v) continue;
    if (e.section != section) {
      out << (section.empty() ? "" : "\n") << '[' << e.section << "]\n";
      section = e.section;
    }
    out << e.key << " = " << *v << '\n';
  }
  for (int i = 0; i < s.robot.n_limbs(); ++i) {
    std::vector<double> masses, lengths;
    for (const JointModel& jt : s.robot.limbs[i].joints) {
      masses.push_back(jt.mass);
      lengths.push_back(jt.link.norm());
    }
    out << "\n[limb." << i << "]\n";
    out << "link_masses = " << number_list(masses) << '\n';
    out << "link_lengths = " << number_list(lengths) << '\n';
  }
}

}  // namespace climb
