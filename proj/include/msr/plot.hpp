#ifndef MSR_PLOT_HPP
#define MSR_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "msr/common.hpp"
#include "msr/stats.hpp"

namespace msr {

enum class PlotKind { box, bar, line };

/// One labeled group. Box plots use the whole value vector; bar and
/// line plots read values[0].
struct Series {
  std::string label;
  std::vector<double> values;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return std::string(buf);
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

}  // namespace detail

/// Renders a deterministic 640x480 SVG chart: same data, same bytes.
/// Returns the SVG text and writes it to `path` when non-empty.
inline std::string render_plot(PlotKind kind, const std::vector<Series>& data,
                               const std::string& title,
                               const std::string& path = {}) {
  if (data.empty()) throw Error(Errc::empty_sample, "plot of empty series");
  for (const auto& s : data)
    if (s.values.empty())
      throw Error(Errc::empty_sample, "series '" + s.label + "' is empty");

  const double width = 640, height = 480;
  const double left = 70, right = 620, top = 50, bottom = 420;

  double vmin = data[0].values[0], vmax = vmin;
  for (const auto& s : data) {
    for (double v : s.values) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  if (kind == PlotKind::bar) vmin = std::min(vmin, 0.0);
  if (vmax == vmin) vmax = vmin + 1.0;
  const double pad = (vmax - vmin) * 0.05;
  const double lo = (kind == PlotKind::bar && vmin == 0.0) ? 0.0 : vmin - pad;
  const double hi = vmax + pad;
  auto y_of = [&](double v) {
    return bottom - (v - lo) / (hi - lo) * (bottom - top);
  };

  const size_t n = data.size();
  const double slot = (right - left) / static_cast<double>(n);

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + detail::svg_num(width) + "\" height=\"" +
         detail::svg_num(height) + "\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + detail::xml_escape(title) + "</text>\n";

  // axes
  svg += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" + detail::svg_num(top) +
         "\" x2=\"" + detail::svg_num(left) + "\" y2=\"" + detail::svg_num(bottom) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" + detail::svg_num(bottom) +
         "\" x2=\"" + detail::svg_num(right) + "\" y2=\"" + detail::svg_num(bottom) +
         "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    const double y = y_of(v);
    svg += "<line x1=\"" + detail::svg_num(left - 4) + "\" y1=\"" + detail::svg_num(y) +
           "\" x2=\"" + detail::svg_num(left) + "\" y2=\"" + detail::svg_num(y) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::svg_num(left - 8) + "\" y=\"" +
           detail::svg_num(y + 4) + "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">" + detail::svg_num(v) + "</text>\n";
  }

  if (kind == PlotKind::box) {
    for (size_t i = 0; i < n; ++i) {
      const FiveNumber f = five_number(data[i].values);
      const double cx = left + slot * (static_cast<double>(i) + 0.5);
      const double half = std::min(slot * 0.3, 40.0);
      // whiskers at the extremes of the five-number summary
      svg += "<line x1=\"" + detail::svg_num(cx) + "\" y1=\"" + detail::svg_num(y_of(f.min)) +
             "\" x2=\"" + detail::svg_num(cx) + "\" y2=\"" + detail::svg_num(y_of(f.q1)) +
             "\" stroke=\"black\"/>\n";
      svg += "<line x1=\"" + detail::svg_num(cx) + "\" y1=\"" + detail::svg_num(y_of(f.q3)) +
             "\" x2=\"" + detail::svg_num(cx) + "\" y2=\"" + detail::svg_num(y_of(f.max)) +
             "\" stroke=\"black\"/>\n";
      for (double v : {f.min, f.max})
        svg += "<line x1=\"" + detail::svg_num(cx - half / 2) + "\" y1=\"" +
               detail::svg_num(y_of(v)) + "\" x2=\"" + detail::svg_num(cx + half / 2) +
               "\" y2=\"" + detail::svg_num(y_of(v)) + "\" stroke=\"black\"/>\n";
      svg += "<rect x=\"" + detail::svg_num(cx - half) + "\" y=\"" +
             detail::svg_num(y_of(f.q3)) + "\" width=\"" + detail::svg_num(half * 2) +
             "\" height=\"" + detail::svg_num(y_of(f.q1) - y_of(f.q3)) +
             "\" fill=\"#cfe2f3\" stroke=\"black\"/>\n";
      svg += "<line x1=\"" + detail::svg_num(cx - half) + "\" y1=\"" +
             detail::svg_num(y_of(f.median)) + "\" x2=\"" + detail::svg_num(cx + half) +
             "\" y2=\"" + detail::svg_num(y_of(f.median)) +
             "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    }
  } else if (kind == PlotKind::bar) {
    for (size_t i = 0; i < n; ++i) {
      const double v = data[i].values[0];
      const double cx = left + slot * (static_cast<double>(i) + 0.5);
      const double half = std::min(slot * 0.35, 50.0);
      const double y0 = y_of(std::max(0.0, lo));
      svg += "<rect x=\"" + detail::svg_num(cx - half) + "\" y=\"" +
             detail::svg_num(y_of(v)) + "\" width=\"" + detail::svg_num(half * 2) +
             "\" height=\"" + detail::svg_num(y0 - y_of(v)) +
             "\" fill=\"#9fc5e8\" stroke=\"black\"/>\n";
    }
  } else {
    std::string points;
    for (size_t i = 0; i < n; ++i) {
      const double cx = left + slot * (static_cast<double>(i) + 0.5);
      if (i) points += " ";
      points += detail::svg_num(cx) + "," + detail::svg_num(y_of(data[i].values[0]));
    }
    svg += "<polyline points=\"" + points +
           "\" fill=\"none\" stroke=\"#3d6bb3\" stroke-width=\"2\"/>\n";
    for (size_t i = 0; i < n; ++i) {
      const double cx = left + slot * (static_cast<double>(i) + 0.5);
      svg += "<circle cx=\"" + detail::svg_num(cx) + "\" cy=\"" +
             detail::svg_num(y_of(data[i].values[0])) + "\" r=\"3\" fill=\"#3d6bb3\"/>\n";
    }
  }

  for (size_t i = 0; i < n; ++i) {
    const double cx = left + slot * (static_cast<double>(i) + 0.5);
    svg += "<text x=\"" + detail::svg_num(cx) + "\" y=\"" + detail::svg_num(bottom + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::xml_escape(data[i].label) + "</text>\n";
  }
  svg += "</svg>\n";

  if (!path.empty()) write_file(path, svg);
  return svg;
}

}  // namespace msr

#endif  // MSR_PLOT_HPP
