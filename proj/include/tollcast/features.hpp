#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tollcast/date.hpp"
#include "tollcast/error.hpp"
#include "tollcast/series.hpp"

namespace tollcast {

// First day of the week for the DAY_OF_WEEK numbering. The weekend is
// Saturday/Sunday regardless; only the numbering shifts.
enum class WeekStart { monday, sunday };

inline WeekStart parse_week_start(std::string_view token) {
  if (token == "monday") return WeekStart::monday;
  if (token == "sunday") return WeekStart::sunday;
  throw config_error("week start must be 'monday' or 'sunday'");
}

// A calendar date exploded into the learning-matrix attributes: the raw
// components, ISO week, day-of-year, a weekend flag, plus one indicator per
// day of the week so models can weight days individually.
struct CalendarRow {
  int year = 0;
  int month = 0;        // 1..12
  int week = 0;         // ISO-8601, 1..53
  int day = 0;          // 1..31
  int day_of_week = 0;  // 0..6 from the configured week start
  int day_of_year = 0;  // 1..366
  bool is_weekend = false;
  std::array<double, 7> dow_onehot{};
};

inline CalendarRow explode_date(Date date, WeekStart start = WeekStart::monday) {
  CalendarRow row;
  row.year = date.year();
  row.month = date.month();
  row.week = date.iso_week();
  row.day = date.day();
  const int mon0 = date.day_of_week();
  row.day_of_week = start == WeekStart::monday ? mon0 : (mon0 + 1) % 7;
  row.day_of_year = date.day_of_year();
  row.is_weekend = mon0 >= 5;
  row.dow_onehot[static_cast<std::size_t>(row.day_of_week)] = 1.0;
  return row;
}

inline constexpr int kFeatureCount = 14;

inline const std::vector<std::string>& feature_column_names() {
  static const std::vector<std::string> names = {
      "YEAR",  "MONTH", "WEEK",  "DAY",   "DAY_OF_WEEK", "DAY_OF_YEAR",
      "IS_WEEKEND", "DOW_0", "DOW_1", "DOW_2", "DOW_3", "DOW_4", "DOW_5", "DOW_6"};
  return names;
}

// One learning-matrix row for a date, in the fixed column order.
inline std::vector<double> feature_row(Date date, WeekStart start = WeekStart::monday) {
  const CalendarRow c = explode_date(date, start);
  std::vector<double> row;
  row.reserve(kFeatureCount);
  row.push_back(static_cast<double>(c.year));
  row.push_back(static_cast<double>(c.month));
  row.push_back(static_cast<double>(c.week));
  row.push_back(static_cast<double>(c.day));
  row.push_back(static_cast<double>(c.day_of_week));
  row.push_back(static_cast<double>(c.day_of_year));
  row.push_back(c.is_weekend ? 1.0 : 0.0);
  for (double v : c.dow_onehot) row.push_back(v);
  return row;
}

// Calendar features aligned with a target vector. The station code rides
// along as metadata; it is not a feature column.
struct FeatureMatrix {
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  std::vector<Date> dates;
  int station_code = 0;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return column_names.size(); }
};

// One row per day of the series, chronological, targets = series values.
inline FeatureMatrix build_matrix(const DailySeries& series,
                                  WeekStart start = WeekStart::monday) {
  if (!series.all_present()) {
    throw precondition_error("build_matrix: series has missing values; impute first");
  }
  FeatureMatrix m;
  m.column_names = feature_column_names();
  m.station_code = series.station_code;
  m.rows.reserve(series.size());
  m.targets.reserve(series.size());
  m.dates.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Date d = series.date_at(i);
    m.rows.push_back(feature_row(d, start));
    m.targets.push_back(*series.values[i]);
    m.dates.push_back(d);
  }
  return m;
}

// Feature rows (no targets) for `n` consecutive days starting at `first`.
inline std::vector<std::vector<double>> feature_rows_for_days(
    Date first, std::size_t n, WeekStart start = WeekStart::monday) {
  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back(feature_row(first + static_cast<std::int64_t>(i), start));
  }
  return rows;
}

enum class ScaleMode { minmax01, standardize };

inline ScaleMode parse_scale_mode(std::string_view token) {
  if (token == "minmax01" || token == "minmax") return ScaleMode::minmax01;
  if (token == "standardize" || token == "standard") return ScaleMode::standardize;
  throw config_error("scale mode must be 'minmax01' or 'standardize'");
}

// Per-column affine scaling parameters, fit on training rows only.
// minmax01: (v - a) / (b - a) with a = min, b = max.
// standardize: (v - a) / b with a = mean, b = population std (denominator n).
// Constant columns map to 0 in both modes.
struct ScalerParams {
  ScaleMode mode = ScaleMode::minmax01;
  std::vector<double> a;
  std::vector<double> b;

  double scale_value(std::size_t col, double v) const {
    if (mode == ScaleMode::minmax01) {
      const double range = b[col] - a[col];
      return range == 0.0 ? 0.0 : (v - a[col]) / range;
    }
    return b[col] == 0.0 ? 0.0 : (v - a[col]) / b[col];
  }

  double unscale_value(std::size_t col, double v) const {
    if (mode == ScaleMode::minmax01) return a[col] + v * (b[col] - a[col]);
    return a[col] + v * b[col];
  }

  std::vector<double> scale_row(const std::vector<double>& row) const {
    if (row.size() != a.size()) {
      throw shape_error("scaler fitted on " + std::to_string(a.size()) +
                        " columns, row has " + std::to_string(row.size()));
    }
    std::vector<double> out(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) out[c] = scale_value(c, row[c]);
    return out;
  }
};

inline ScalerParams fit_scaler(const FeatureMatrix& m, ScaleMode mode) {
  if (m.n_rows() == 0) throw precondition_error("fit_scaler: empty matrix");
  const std::size_t cols = m.n_cols();
  ScalerParams p;
  p.mode = mode;
  p.a.resize(cols);
  p.b.resize(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    if (mode == ScaleMode::minmax01) {
      double lo = m.rows[0][c], hi = m.rows[0][c];
      for (const auto& row : m.rows) {
        lo = std::min(lo, row[c]);
        hi = std::max(hi, row[c]);
      }
      p.a[c] = lo;
      p.b[c] = hi;
    } else {
      double sum = 0.0;
      for (const auto& row : m.rows) sum += row[c];
      const double mean = sum / static_cast<double>(m.n_rows());
      double ss = 0.0;
      for (const auto& row : m.rows) {
        const double d = row[c] - mean;
        ss += d * d;
      }
      p.a[c] = mean;
      p.b[c] = std::sqrt(ss / static_cast<double>(m.n_rows()));
    }
  }
  return p;
}

inline FeatureMatrix apply_scaler(const FeatureMatrix& m, const ScalerParams& p) {
  FeatureMatrix out = m;
  for (auto& row : out.rows) row = p.scale_row(row);
  return out;
}

// Matrix CSV: DATE first, the feature columns in fixed order, TARGET last.
inline void write_matrix_csv(std::ostream& out, const FeatureMatrix& m) {
  out << "DATE";
  for (const auto& name : m.column_names) out << ',' << name;
  out << ",TARGET\n";
  char buf[32];
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    out << m.dates[i].to_string();
    for (double v : m.rows[i]) {
      std::snprintf(buf, sizeof(buf), "%.10g", v);
      out << ',' << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.6f", m.targets[i]);
    out << ',' << buf << "\n";
  }
}

}  // namespace tollcast
