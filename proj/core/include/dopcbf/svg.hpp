#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dopcbf {

struct SvgSeries {
  std::string label;
  std::string color;  ///< empty picks from a default palette
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  std::optional<double> hline;  ///< horizontal reference line (e.g. zero)
};

/// Renders line panels on a fixed grid into a standalone SVG document.
/// Output is deterministic for identical input; long series are decimated
/// to keep files small.
std::string render_svg_panels(const std::vector<SvgPanel>& panels, int cols = 2);

}  // namespace dopcbf
