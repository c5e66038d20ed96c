#include "qlyap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qlyap {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 780.0;
constexpr double kTop = 45.0;
constexpr double kBottom = 455.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        continue;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) {  // nothing plottable
    xmin = 0.0; xmax = 1.0; ymin = 0.0; ymax = 1.0;
  }
  if (xmax - xmin <= 0.0) {
    xmin -= 0.5; xmax += 0.5;
  }
  if (ymax - ymin <= 0.0) {
    ymin -= 0.5; ymax += 0.5;
  }
  // 5% data margin on all sides
  const double xpad = 0.05 * (xmax - xmin);
  const double ypad = 0.05 * (ymax - ymin);
  xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

  auto px = [&](double x) {
    return kLeft + (x - xmin) / (xmax - xmin) * (kRight - kLeft);
  };
  auto py = [&](double y) {
    return kBottom - (y - ymin) / (ymax - ymin) * (kBottom - kTop);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2
      << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << xml_escape(title) << "</text>\n";

  // axes frame
  svg << "<rect x=\"" << coord(kLeft) << "\" y=\"" << coord(kTop)
      << "\" width=\"" << coord(kRight - kLeft) << "\" height=\""
      << coord(kBottom - kTop)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  // min/max tick labels
  svg << "<text x=\"" << coord(kLeft) << "\" y=\"" << coord(kBottom + 18)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << tick(xmin)
      << "</text>\n"
      << "<text x=\"" << coord(kRight) << "\" y=\"" << coord(kBottom + 18)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << tick(xmax) << "</text>\n"
      << "<text x=\"" << coord(kLeft - 6) << "\" y=\"" << coord(kBottom)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << tick(ymin) << "</text>\n"
      << "<text x=\"" << coord(kLeft - 6) << "\" y=\"" << coord(kTop + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << tick(ymax) << "</text>\n";

  // axis labels
  svg << "<text x=\"" << coord((kLeft + kRight) / 2) << "\" y=\""
      << coord(kHeight - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << xml_escape(x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << coord((kTop + kBottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << coord((kTop + kBottom) / 2) << ")\">" << xml_escape(y_label)
      << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(*kPalette))];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        continue;
      }
      if (i != 0) {
        svg << " ";
      }
      svg << coord(px(s.x[i])) << "," << coord(py(s.y[i]));
    }
    svg << "\"/>\n";
  }

  // legend, top-right inside the frame
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(*kPalette))];
    const double ly = kTop + 16.0 + 16.0 * static_cast<double>(si);
    svg << "<line x1=\"" << coord(kRight - 150) << "\" y1=\"" << coord(ly - 4)
        << "\" x2=\"" << coord(kRight - 126) << "\" y2=\"" << coord(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << coord(kRight - 120) << "\" y=\"" << coord(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << xml_escape(series[si].label) << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace qlyap
