#include "dopcbf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "dopcbf/plant.hpp"

namespace dopcbf {

namespace {

constexpr int kPanelW = 480;
constexpr int kPanelH = 300;
constexpr int kMarginL = 58;
constexpr int kMarginR = 14;
constexpr int kMarginT = 30;
constexpr int kMarginB = 42;
constexpr std::size_t kMaxPoints = 1500;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

/// Rounds a raw interval to a 1/2/5 x 10^k tick step.
double nice_step(double range) {
  if (range <= 0.0) return 1.0;
  double raw = range / 4.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double frac = raw / mag;
  double nice = frac < 1.5 ? 1.0 : frac < 3.5 ? 2.0 : frac < 7.5 ? 5.0 : 10.0;
  return nice * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finalize() {
    if (!std::isfinite(lo)) { lo = 0.0; hi = 1.0; }
    if (hi - lo < 1e-12) { lo -= 0.5; hi += 0.5; }
  }
};

void render_panel(std::ostringstream& out, const SvgPanel& panel, int ox, int oy) {
  Range xr, yr;
  for (const SvgSeries& s : panel.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  if (panel.hline) yr.add(*panel.hline);
  xr.finalize();
  yr.finalize();
  double pad = 0.05 * (yr.hi - yr.lo);
  yr.lo -= pad;
  yr.hi += pad;

  const double px0 = ox + kMarginL;
  const double px1 = ox + kPanelW - kMarginR;
  const double py0 = oy + kPanelH - kMarginB;
  const double py1 = oy + kMarginT;
  auto map_x = [&](double v) { return px0 + (v - xr.lo) / (xr.hi - xr.lo) * (px1 - px0); };
  auto map_y = [&](double v) { return py0 + (v - yr.lo) / (yr.hi - yr.lo) * (py1 - py0); };

  out << "<rect x='" << ox << "' y='" << oy << "' width='" << kPanelW
      << "' height='" << kPanelH << "' fill='white' stroke='none'/>\n";
  out << "<text x='" << ox + kPanelW / 2 << "' y='" << oy + 18
      << "' text-anchor='middle' font-size='13' font-weight='bold'>"
      << escape(panel.title) << "</text>\n";

  // Gridlines and tick labels.
  double xstep = nice_step(xr.hi - xr.lo);
  for (double v = std::ceil(xr.lo / xstep) * xstep; v <= xr.hi + 1e-9 * xstep;
       v += xstep) {
    double sx = map_x(v);
    out << "<line x1='" << num(sx) << "' y1='" << num(py0) << "' x2='" << num(sx)
        << "' y2='" << num(py1) << "' stroke='#e0e0e0' stroke-width='1'/>\n";
    out << "<text x='" << num(sx) << "' y='" << num(py0 + 16)
        << "' text-anchor='middle' font-size='10'>" << num(v) << "</text>\n";
  }
  double ystep = nice_step(yr.hi - yr.lo);
  for (double v = std::ceil(yr.lo / ystep) * ystep; v <= yr.hi + 1e-9 * ystep;
       v += ystep) {
    double sy = map_y(v);
    out << "<line x1='" << num(px0) << "' y1='" << num(sy) << "' x2='" << num(px1)
        << "' y2='" << num(sy) << "' stroke='#e0e0e0' stroke-width='1'/>\n";
    out << "<text x='" << num(px0 - 5) << "' y='" << num(sy + 3)
        << "' text-anchor='end' font-size='10'>" << num(v) << "</text>\n";
  }

  if (panel.hline) {
    double sy = map_y(*panel.hline);
    out << "<line x1='" << num(px0) << "' y1='" << num(sy) << "' x2='" << num(px1)
        << "' y2='" << num(sy)
        << "' stroke='#888888' stroke-width='1' stroke-dasharray='5,4'/>\n";
  }

  // Axis frame.
  out << "<rect x='" << num(px0) << "' y='" << num(py1) << "' width='"
      << num(px1 - px0) << "' height='" << num(py0 - py1)
      << "' fill='none' stroke='#333333' stroke-width='1'/>\n";
  out << "<text x='" << num((px0 + px1) / 2) << "' y='" << num(py0 + 32)
      << "' text-anchor='middle' font-size='11'>" << escape(panel.x_label)
      << "</text>\n";
  out << "<text x='" << num(ox + 14) << "' y='" << num((py0 + py1) / 2)
      << "' text-anchor='middle' font-size='11' transform='rotate(-90 "
      << num(ox + 14) << " " << num((py0 + py1) / 2) << ")'>"
      << escape(panel.y_label) << "</text>\n";

  // Series polylines (decimated when long).
  for (std::size_t si = 0; si < panel.series.size(); ++si) {
    const SvgSeries& s = panel.series[si];
    if (s.x.empty() || s.x.size() != s.y.size())
      throw ContractViolation("svg: series '" + s.label + "' has mismatched x/y");
    std::string color =
        s.color.empty() ? kPalette[si % (sizeof(kPalette) / sizeof(*kPalette))]
                        : s.color;
    std::size_t stride = std::max<std::size_t>(1, s.x.size() / kMaxPoints);
    out << "<polyline fill='none' stroke='" << color
        << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < s.x.size(); i += stride)
      out << num(map_x(s.x[i])) << "," << num(map_y(s.y[i])) << " ";
    std::size_t last = s.x.size() - 1;
    if (last % stride != 0)
      out << num(map_x(s.x[last])) << "," << num(map_y(s.y[last]));
    out << "'/>\n";
  }

  // Legend.
  double ly = py1 + 8;
  for (std::size_t si = 0; si < panel.series.size(); ++si) {
    const SvgSeries& s = panel.series[si];
    if (s.label.empty()) continue;
    std::string color =
        s.color.empty() ? kPalette[si % (sizeof(kPalette) / sizeof(*kPalette))]
                        : s.color;
    out << "<line x1='" << num(px1 - 108) << "' y1='" << num(ly) << "' x2='"
        << num(px1 - 88) << "' y2='" << num(ly) << "' stroke='" << color
        << "' stroke-width='2'/>\n";
    out << "<text x='" << num(px1 - 83) << "' y='" << num(ly + 3)
        << "' font-size='10'>" << escape(s.label) << "</text>\n";
    ly += 13;
  }
}

}  // namespace

std::string render_svg_panels(const std::vector<SvgPanel>& panels, int cols) {
  if (panels.empty()) throw ContractViolation("svg: no panels");
  if (cols < 1) throw ContractViolation("svg: cols must be at least 1");

  const int n = static_cast<int>(panels.size());
  const int ncols = std::min(cols, n);
  const int nrows = (n + ncols - 1) / ncols;
  const int width = ncols * kPanelW;
  const int height = nrows * kPanelH;

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "' viewBox='0 0 " << width << " " << height
      << "' font-family='DejaVu Sans, Helvetica, sans-serif'>\n";
  out << "<rect width='" << width << "' height='" << height
      << "' fill='white'/>\n";
  for (int i = 0; i < n; ++i)
    render_panel(out, panels[i], (i % ncols) * kPanelW, (i / ncols) * kPanelH);
  out << "</svg>\n";
  return out.str();
}

}  // namespace dopcbf
