#include "climb/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace climb {

namespace {

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

std::string tick_label(double v) {
  std::ostringstream s;
  s.precision(4);
  s << (std::abs(v) < 1e-12 ? 0.0 : v);
  return s.str();
}

}  // namespace

void write_line_chart(std::ostream& out, const std::vector<Series>& series, const ChartOptions& options) {
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double w = options.width, h = options.height;
  const double pw = w - left - right, ph = h - top - bottom;

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (options.threshold) {
    y0 = std::min(y0, *options.threshold);
    y1 = std::max(y1, *options.threshold);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
      << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape(options.title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0, yv = y0 + (y1 - y0) * i / 5.0;
    out << "<text x=\"" << fixed(px(xv), 1) << "\" y=\"" << top + ph + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(xv) << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << fixed(py(yv) + 4, 1)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(yv) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(options.x_label)
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 16 " << top + ph / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(options.y_label)
      << "</text>\n";

  if (options.threshold) {
    const double y = py(*options.threshold);
    out << "<line x1=\"" << left << "\" y1=\"" << fixed(y, 2) << "\" x2=\"" << left + pw << "\" y2=\"" << fixed(y, 2)
        << "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>\n";
    if (!options.threshold_label.empty())
      out << "<text x=\"" << left + pw - 4 << "\" y=\"" << fixed(y - 4, 2)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#d62728\">"
          << escape(options.threshold_label) << "</text>\n";
  }

  int legend = 0;
  for (const Series& s : series) {
    std::string path;
    bool pen = false;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        pen = false;
        continue;
      }
      path += pen ? " L" : " M";
      path += fixed(px(s.x[i]), 2) + ' ' + fixed(py(s.y[i]), 2);
      pen = true;
    }
    if (!path.empty())
      out << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << escape(s.color) << "\" stroke-width=\"1.2\"/>\n";
    const double ly = top + 14 + 16 * legend++;
    out << "<line x1=\"" << left + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + 30 << "\" y2=\"" << ly
        << "\" stroke=\"" << escape(s.color) << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + 36 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_heightmap_svg(std::ostream& out, const TerrainMap& map, int max_pixels) {
  const MatX& z = map.heights();
  const int block = std::max<int>(1, static_cast<int>(std::ceil(std::max(z.rows(), z.cols()) / double(max_pixels))));
  const int nx = static_cast<int>((z.rows() + block - 1) / block), ny = static_cast<int>((z.cols() + block - 1) / block);
  const double lo = z.minCoeff(), hi = z.maxCoeff();
  const int cell = 4;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << nx * cell << "\" height=\"" << ny * cell
      << "\" viewBox=\"0 0 " << nx * cell << ' ' << ny * cell << "\" shape-rendering=\"crispEdges\">\n";
  for (int by = 0; by < ny; ++by)
    for (int bx = 0; bx < nx; ++bx) {
      const Eigen::Index ix = std::min<Eigen::Index>(bx * block, z.rows() - 1);
      const Eigen::Index iy = std::min<Eigen::Index>(by * block, z.cols() - 1);
      const double s = hi > lo ? (z(ix, iy) - lo) / (hi - lo) : 0.5;
      const int g = static_cast<int>(std::lround(40 + 200 * s));
      // y grows upward in the map, downward in the image
      out << "<rect x=\"" << bx * cell << "\" y=\"" << (ny - 1 - by) * cell << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"rgb(" << g << ',' << g << ',' << g << ")\"/>\n";
    }
  out << "</svg>\n";
}

Series force_series(const SimTrace& trace, int stride, std::string label, std::string color) {
  Series s{std::move(label), {}, {}, std::move(color)};
  for (std::size_t k : trace_rows(trace, stride)) {
    s.x.push_back(trace.t[k]);
    s.y.push_back(trace.max_pull[k]);
  }
  return s;
}

Series gia_series(const SimTrace& trace, int stride, std::string label, std::string color) {
  Series s{std::move(label), {}, {}, std::move(color)};
  for (std::size_t k : trace_rows(trace, stride)) {
    s.x.push_back(trace.t[k]);
    s.y.push_back(trace.gia[k]);
  }
  return s;
}

}  // namespace climb
