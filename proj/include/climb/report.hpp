#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "climb/sim.hpp"
#include "climb/terrain.hpp"

namespace climb {

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
};

struct ChartOptions {
  std::string title;
  std::string x_label = "time (s)";
  std::string y_label;
  std::optional<double> threshold;   // dashed horizontal reference line
  std::string threshold_label;
  int width = 800;
  int height = 400;
};

/// Self-contained SVG line chart. Non-finite samples break the line.
void write_line_chart(std::ostream& out, const std::vector<Series>& series, const ChartOptions& options);

/// Grayscale elevation preview, one rectangle per cell block.
void write_heightmap_svg(std::ostream& out, const TerrainMap& map, int max_pixels = 128);

/// Max pulling force and GIA margin against time, taken from the rows that
/// write_trace_csv emits with the same stride.
Series force_series(const SimTrace& trace, int stride, std::string label, std::string color);
Series gia_series(const SimTrace& trace, int stride, std::string label, std::string color);

}  // namespace climb
