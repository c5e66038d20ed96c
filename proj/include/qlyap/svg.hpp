#pragma once

#include <string>
#include <vector>

namespace qlyap {

// One plotted curve. x and y must have equal length.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Self-contained 800x500 line chart: axes, min/max tick labels, one polyline
// per series, legend. No external plotting dependency, deterministic output.
std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series);

}  // namespace qlyap
