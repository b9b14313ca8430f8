#include "shoeprint/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "shoeprint/error.hpp"

namespace shoeprint {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return buffer;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string line_plot_svg(const std::string& title, const std::vector<std::string>& x_labels,
                          const std::vector<SvgSeries>& series, int width, int height) {
  if (x_labels.empty()) throw ConfigError("plot needs at least one x label");
  if (series.empty()) throw ConfigError("plot needs at least one series");

  double lo = 0.0;
  double hi = 1.0;
  bool first = true;
  for (const SvgSeries& s : series) {
    if (s.values.size() != x_labels.size()) {
      throw ShapeError("series '" + s.label + "' has " + std::to_string(s.values.size()) +
                       " points for " + std::to_string(x_labels.size()) + " x labels");
    }
    for (double v : s.values) {
      if (first) {
        lo = hi = v;
        first = false;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (hi - lo < 1e-12) {
    hi += 1.0;
    lo -= 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double margin_l = 56.0, margin_r = 16.0, margin_t = 34.0, margin_b = 42.0;
  const double plot_w = width - margin_l - margin_r;
  const double plot_h = height - margin_t - margin_b;
  const auto x_at = [&](size_t i) {
    return x_labels.size() == 1
               ? margin_l + plot_w / 2.0
               : margin_l + plot_w * static_cast<double>(i) /
                     static_cast<double>(x_labels.size() - 1);
  };
  const auto y_at = [&](double v) { return margin_t + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"14\">" << escape(title) << "</text>\n";

  // axes
  out << "<line x1=\"" << fmt(margin_l) << "\" y1=\"" << fmt(margin_t) << "\" x2=\""
      << fmt(margin_l) << "\" y2=\"" << fmt(margin_t + plot_h) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fmt(margin_l) << "\" y1=\"" << fmt(margin_t + plot_h) << "\" x2=\""
      << fmt(margin_l + plot_w) << "\" y2=\"" << fmt(margin_t + plot_h)
      << "\" stroke=\"black\"/>\n";

  for (int tick = 0; tick <= 4; ++tick) {
    const double value = lo + (hi - lo) * tick / 4.0;
    const double y = y_at(value);
    out << "<line x1=\"" << fmt(margin_l - 4) << "\" y1=\"" << fmt(y) << "\" x2=\""
        << fmt(margin_l) << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(margin_l - 8) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(value)
        << "</text>\n";
  }
  for (size_t i = 0; i < x_labels.size(); ++i) {
    out << "<text x=\"" << fmt(x_at(i)) << "\" y=\"" << fmt(margin_t + plot_h + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << escape(x_labels[i]) << "</text>\n";
  }

  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < series[s].values.size(); ++i) {
      if (i) out << ' ';
      out << fmt(x_at(i)) << ',' << fmt(y_at(series[s].values[i]));
    }
    out << "\"/>\n";
    const double ly = margin_t + 14.0 * static_cast<double>(s);
    out << "<line x1=\"" << fmt(margin_l + plot_w - 110) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(margin_l + plot_w - 90) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << fmt(margin_l + plot_w - 84) << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << escape(series[s].label)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::vector<std::string>& x_labels,
                         const std::vector<SvgSeries>& series, int width, int height) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << line_plot_svg(title, x_labels, series, width, height);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace shoeprint
