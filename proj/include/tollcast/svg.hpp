#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "tollcast/date.hpp"
#include "tollcast/error.hpp"

namespace tollcast {

struct SvgSeries {
  std::string label;
  std::vector<Date> dates;
  std::vector<double> values;
  double stroke_width = 1.0;
  std::string color = "#1f77b4";
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Round a value up to a tidy tick step (1/2/5 times a power of ten).
inline double nice_step(double range, int target_ticks) {
  const double raw = range / std::max(1, target_ticks);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  double step = 10.0;
  if (norm <= 1.0) step = 1.0;
  else if (norm <= 2.0) step = 2.0;
  else if (norm <= 5.0) step = 5.0;
  return step * mag;
}

}  // namespace detail

// Self-contained SVG line chart: date axis, zero-based value axis, legend.
// Fixed 800x300 viewport; intended for daily actual-vs-forecast plots where
// the measured series is drawn thin and the forecast thick.
inline void write_line_chart(std::ostream& out, const std::string& title,
                             const std::vector<SvgSeries>& series) {
  if (series.empty()) throw precondition_error("write_line_chart: no series");
  Date d_min = series[0].dates.front();
  Date d_max = series[0].dates.back();
  double v_max = 0.0;
  for (const auto& s : series) {
    if (s.dates.empty() || s.dates.size() != s.values.size()) {
      throw precondition_error("write_line_chart: series '" + s.label +
                               "' is empty or misaligned");
    }
    d_min = std::min(d_min, s.dates.front());
    d_max = std::max(d_max, s.dates.back());
    for (double v : s.values) v_max = std::max(v_max, v);
  }
  if (v_max <= 0.0) v_max = 1.0;
  v_max *= 1.05;

  const double width = 800.0, height = 300.0;
  const double left = 60.0, right = 12.0, top = 28.0, bottom = 34.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double day_span = std::max<double>(1.0, static_cast<double>(d_max - d_min));
  auto x_of = [&](Date d) {
    return left + plot_w * static_cast<double>(d - d_min) / day_span;
  };
  auto y_of = [&](double v) { return top + plot_h * (1.0 - v / v_max); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"300\" "
         "viewBox=\"0 0 800 300\">\n";
  out << "<rect width=\"800\" height=\"300\" fill=\"white\"/>\n";
  out << "<text x=\"" << detail::fmt2(left) << "\" y=\"18\" font-family=\"sans-serif\" "
         "font-size=\"13\">" << title << "</text>\n";

  // Value gridlines and labels.
  const double step = detail::nice_step(v_max, 5);
  for (double v = 0.0; v <= v_max + 1e-9; v += step) {
    const double y = y_of(v);
    out << "<line x1=\"" << detail::fmt2(left) << "\" y1=\"" << detail::fmt2(y)
        << "\" x2=\"" << detail::fmt2(width - right) << "\" y2=\"" << detail::fmt2(y)
        << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    char label[32];
    std::snprintf(label, sizeof(label), "%.0f", v);
    out << "<text x=\"" << detail::fmt2(left - 6) << "\" y=\"" << detail::fmt2(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << label
        << "</text>\n";
  }
  // Month/year ticks: first of each month, thinned to at most ~12 labels.
  std::vector<Date> ticks;
  for (Date d = d_min; d <= d_max; ++d) {
    if (d.day() == 1) ticks.push_back(d);
  }
  if (ticks.empty()) ticks.push_back(d_min);
  const std::size_t stride = ticks.size() > 12 ? (ticks.size() + 11) / 12 : 1;
  for (std::size_t i = 0; i < ticks.size(); i += stride) {
    const double x = x_of(ticks[i]);
    out << "<line x1=\"" << detail::fmt2(x) << "\" y1=\"" << detail::fmt2(top)
        << "\" x2=\"" << detail::fmt2(x) << "\" y2=\"" << detail::fmt2(height - bottom)
        << "\" stroke=\"#eeeeee\" stroke-width=\"0.5\"/>\n";
    char label[16];
    std::snprintf(label, sizeof(label), "%04d-%02d", ticks[i].year(), ticks[i].month());
    out << "<text x=\"" << detail::fmt2(x) << "\" y=\"" << detail::fmt2(height - bottom + 14)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << label
        << "</text>\n";
  }
  // Axes.
  out << "<line x1=\"" << detail::fmt2(left) << "\" y1=\"" << detail::fmt2(top) << "\" x2=\""
      << detail::fmt2(left) << "\" y2=\"" << detail::fmt2(height - bottom)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << detail::fmt2(left) << "\" y1=\"" << detail::fmt2(height - bottom)
      << "\" x2=\"" << detail::fmt2(width - right) << "\" y2=\""
      << detail::fmt2(height - bottom) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
        << detail::fmt2(s.stroke_width) << "\" points=\"";
    for (std::size_t i = 0; i < s.dates.size(); ++i) {
      if (i) out << ' ';
      out << detail::fmt2(x_of(s.dates[i])) << ',' << detail::fmt2(y_of(s.values[i]));
    }
    out << "\"/>\n";
  }
  // Legend, top right.
  double ly = top + 6.0;
  for (const auto& s : series) {
    const double lx = width - right - 180.0;
    out << "<line x1=\"" << detail::fmt2(lx) << "\" y1=\"" << detail::fmt2(ly) << "\" x2=\""
        << detail::fmt2(lx + 24) << "\" y2=\"" << detail::fmt2(ly) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"" << detail::fmt2(s.stroke_width) << "\"/>\n";
    out << "<text x=\"" << detail::fmt2(lx + 30) << "\" y=\"" << detail::fmt2(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    ly += 16.0;
  }
  out << "</svg>\n";
}

}  // namespace tollcast
