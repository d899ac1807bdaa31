#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace sip {
namespace svg {

/// Minimal deterministic SVG line plots: fixed canvas, fixed palette, fixed
/// number formatting, so identical inputs produce identical bytes.

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.6g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

inline const char* color(size_t idx) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[idx % 8];
}

struct Range {
  double lo = 0.0, hi = 1.0;
};

inline Range find_range(const std::vector<const std::vector<double>*>& values, bool log_scale,
                        double floor_value) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto* vs : values)
    for (double v : *vs) {
      const double w = log_scale ? std::log10(std::max(v, floor_value)) : v;
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
  if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace detail

inline std::string render(const std::vector<Panel>& panels) {
  constexpr double kPanelW = 560, kPanelH = 420;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  constexpr double kViolationFloor = 1e-16;

  const double width = kPanelW * static_cast<double>(panels.size());
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fmt(width)
     << "\" height=\"" << detail::fmt(kPanelH) << "\" viewBox=\"0 0 " << detail::fmt(width) << " "
     << detail::fmt(kPanelH) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& panel = panels[pi];
    const double x0 = kPanelW * static_cast<double>(pi) + kLeft;
    const double y0 = kTop;
    const double plot_w = kPanelW - kLeft - kRight;
    const double plot_h = kPanelH - kTop - kBottom;

    std::vector<const std::vector<double>*> xs, ys;
    for (const Series& s : panel.series) {
      xs.push_back(&s.x);
      ys.push_back(&s.y);
    }
    const detail::Range rx = detail::find_range(xs, false, 0.0);
    const detail::Range ry = detail::find_range(ys, panel.log_y, kViolationFloor);

    const auto map_x = [&](double v) { return x0 + (v - rx.lo) / (rx.hi - rx.lo) * plot_w; };
    const auto map_y = [&](double v) {
      const double w = panel.log_y ? std::log10(std::max(v, kViolationFloor)) : v;
      return y0 + plot_h - (w - ry.lo) / (ry.hi - ry.lo) * plot_h;
    };

    os << "<rect x=\"" << detail::fmt(x0) << "\" y=\"" << detail::fmt(y0) << "\" width=\""
       << detail::fmt(plot_w) << "\" height=\"" << detail::fmt(plot_h)
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << detail::fmt(x0 + plot_w / 2) << "\" y=\"" << detail::fmt(y0 - 14)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" << panel.title
       << "</text>\n";
    os << "<text x=\"" << detail::fmt(x0 + plot_w / 2) << "\" y=\""
       << detail::fmt(y0 + plot_h + 36) << "\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"12\">" << panel.x_label << "</text>\n";
    os << "<text x=\"" << detail::fmt(x0 - 52) << "\" y=\"" << detail::fmt(y0 + plot_h / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 "
       << detail::fmt(x0 - 52) << " " << detail::fmt(y0 + plot_h / 2) << ")\">" << panel.y_label
       << "</text>\n";

    // 5 evenly spaced ticks per axis (decade labels when the axis is log).
    for (int t = 0; t <= 4; ++t) {
      const double fx = rx.lo + (rx.hi - rx.lo) * t / 4.0;
      const double px = map_x(fx);
      os << "<line x1=\"" << detail::fmt(px) << "\" y1=\"" << detail::fmt(y0 + plot_h)
         << "\" x2=\"" << detail::fmt(px) << "\" y2=\"" << detail::fmt(y0 + plot_h + 5)
         << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << detail::fmt(px) << "\" y=\"" << detail::fmt(y0 + plot_h + 18)
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
         << detail::fmt(fx, "%.4g") << "</text>\n";

      const double fy = ry.lo + (ry.hi - ry.lo) * t / 4.0;
      const double py = y0 + plot_h - (fy - ry.lo) / (ry.hi - ry.lo) * plot_h;
      os << "<line x1=\"" << detail::fmt(x0 - 5) << "\" y1=\"" << detail::fmt(py) << "\" x2=\""
         << detail::fmt(x0) << "\" y2=\"" << detail::fmt(py) << "\" stroke=\"black\"/>\n";
      const std::string label =
          panel.log_y ? ("1e" + detail::fmt(fy, "%.2g")) : detail::fmt(fy, "%.4g");
      os << "<text x=\"" << detail::fmt(x0 - 8) << "\" y=\"" << detail::fmt(py + 3)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << label
         << "</text>\n";
    }

    for (size_t si = 0; si < panel.series.size(); ++si) {
      const Series& s = panel.series[si];
      os << "<polyline fill=\"none\" stroke=\"" << detail::color(si)
         << "\" stroke-width=\"1.5\" points=\"";
      for (size_t j = 0; j < s.x.size(); ++j) {
        if (j) os << ' ';
        os << detail::fmt(map_x(s.x[j]), "%.2f") << ',' << detail::fmt(map_y(s.y[j]), "%.2f");
      }
      os << "\"/>\n";
      const double ly = y0 + 16 + 16 * static_cast<double>(si);
      os << "<line x1=\"" << detail::fmt(x0 + 10) << "\" y1=\"" << detail::fmt(ly - 4)
         << "\" x2=\"" << detail::fmt(x0 + 34) << "\" y2=\"" << detail::fmt(ly - 4)
         << "\" stroke=\"" << detail::color(si) << "\" stroke-width=\"1.5\"/>\n";
      os << "<text x=\"" << detail::fmt(x0 + 40) << "\" y=\"" << detail::fmt(ly)
         << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace svg
}  // namespace sip
