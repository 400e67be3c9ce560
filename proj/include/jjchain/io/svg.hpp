#pragma once

// Small SVG line/scatter plot writer for result figures.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace jjchain::io {

enum class Marker { line, dot, hollow_star };

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  Marker marker = Marker::line;
  std::string color = "#1f77b4";
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool equal_aspect = false;  // for complex-plane plots
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

inline double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace detail

inline std::string render_svg(const Plot& plot) {
  constexpr double width = 640, height = 480, left = 80, right = 20, top = 40, bottom = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series) {
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double px = width - left - right;
  const double py = height - top - bottom;
  if (plot.equal_aspect) {
    const double scale = std::max((x1 - x0) / px, (y1 - y0) / py);
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    x0 = cx - 0.5 * scale * px, x1 = cx + 0.5 * scale * px;
    y0 = cy - 0.5 * scale * py, y1 = cy + 0.5 * scale * py;
  }
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * px; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * py; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
                    "font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
         detail::escape(plot.title) + "</text>\n";
  svg += "<rect x=\"" + detail::fmt(left) + "\" y=\"" + detail::fmt(top) + "\" width=\"" +
         detail::fmt(px) + "\" height=\"" + detail::fmt(py) + "\" fill=\"none\" stroke=\"black\"/>\n";

  const double xs = detail::nice_step(x1 - x0);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    svg += "<text x=\"" + detail::fmt(sx(t)) + "\" y=\"" + detail::fmt(top + py + 18) +
           "\" text-anchor=\"middle\">" + detail::fmt(t) + "</text>\n";
  }
  const double ys = detail::nice_step(y1 - y0);
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    svg += "<text x=\"" + detail::fmt(left - 6) + "\" y=\"" + detail::fmt(sy(t) + 4) +
           "\" text-anchor=\"end\">" + detail::fmt(t) + "</text>\n";
  }
  svg += "<text x=\"320\" y=\"" + detail::fmt(height - 16) + "\" text-anchor=\"middle\">" +
         detail::escape(plot.x_label) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + detail::fmt(top + py / 2) + "\" text-anchor=\"middle\" " +
         "transform=\"rotate(-90 18 " + detail::fmt(top + py / 2) + ")\">" +
         detail::escape(plot.y_label) + "</text>\n";

  double legend_y = top + 16;
  for (const auto& s : plot.series) {
    if (s.marker == Marker::line) {
      std::string pts;
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        pts += detail::fmt(sx(s.x[k])) + "," + detail::fmt(sy(s.y[k])) + " ";
      }
      svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" +
             pts + "\"/>\n";
    } else {
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        const std::string cx = detail::fmt(sx(s.x[k])), cy = detail::fmt(sy(s.y[k]));
        if (s.marker == Marker::dot) {
          svg += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
        } else {
          svg += "<text x=\"" + cx + "\" y=\"" + cy + "\" dy=\"5\" text-anchor=\"middle\" " +
                 "font-size=\"16\" fill=\"" + s.color + "\">&#9734;</text>\n";
        }
      }
    }
    svg += "<text x=\"" + detail::fmt(left + px - 8) + "\" y=\"" + detail::fmt(legend_y) +
           "\" text-anchor=\"end\" fill=\"" + s.color + "\">" + detail::escape(s.label) + "</text>\n";
    legend_y += 16;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace jjchain::io
