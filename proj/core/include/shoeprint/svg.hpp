#pragma once

#include <string>
#include <vector>

namespace shoeprint {

struct SvgSeries {
  std::string label;
  std::vector<double> values;  // plotted against the x-label index
};

// Minimal self-contained line plot: axes, one polyline per series, legend,
// and x tick labels. CSV stays the canonical output; this is for eyeballs.
std::string line_plot_svg(const std::string& title, const std::vector<std::string>& x_labels,
                          const std::vector<SvgSeries>& series, int width = 640,
                          int height = 400);

void write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::vector<std::string>& x_labels,
                         const std::vector<SvgSeries>& series, int width = 640, int height = 400);

}  // namespace shoeprint
