#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tollcast/date.hpp"
#include "tollcast/error.hpp"

namespace tollcast {

// The three vehicle classes counted at a toll station.
enum class VehicleClass { tc1, tc2, tc3 };

inline VehicleClass parse_vehicle_class(std::string_view token) {
  if (token == "TC1" || token == "tc1") return VehicleClass::tc1;
  if (token == "TC2" || token == "tc2") return VehicleClass::tc2;
  if (token == "TC3" || token == "tc3") return VehicleClass::tc3;
  throw parse_error("unknown vehicle class '" + std::string(token) + "'");
}

inline std::string to_string(VehicleClass c) {
  switch (c) {
    case VehicleClass::tc1: return "TC1";
    case VehicleClass::tc2: return "TC2";
    default: return "TC3";
  }
}

// One station-day observation: daily vehicle counts for all three classes.
struct TrafficRecord {
  int station_code = 0;
  Date date;
  long long tc1 = 0;
  long long tc2 = 0;
  long long tc3 = 0;

  long long count(VehicleClass c) const {
    switch (c) {
      case VehicleClass::tc1: return tc1;
      case VehicleClass::tc2: return tc2;
      default: return tc3;
    }
  }
};

// Gap-aware date-indexed series of daily counts for one station and class.
// Slot i corresponds exactly to start_date + i days; an empty optional marks
// a day with no observation. Values are reals because filters produce
// fractional output. Treated as immutable once built.
struct DailySeries {
  int station_code = 0;
  VehicleClass vehicle_class = VehicleClass::tc1;
  Date start_date;
  std::vector<std::optional<double>> values;

  std::size_t size() const { return values.size(); }
  Date date_at(std::size_t i) const {
    return start_date + static_cast<std::int64_t>(i);
  }
  Date end_date() const {
    return start_date + static_cast<std::int64_t>(values.size()) - 1;
  }

  bool all_present() const {
    return std::all_of(values.begin(), values.end(),
                       [](const auto& v) { return v.has_value(); });
  }

  std::size_t missing_count() const {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(),
                      [](const auto& v) { return !v.has_value(); }));
  }

  // Plain vector of values; requires a fully present series.
  std::vector<double> dense_values() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) {
      if (!v) throw precondition_error("series has missing values");
      out.push_back(*v);
    }
    return out;
  }

  // Same station/class/start with replaced values.
  DailySeries with_values(std::vector<std::optional<double>> v) const {
    DailySeries s = *this;
    s.values = std::move(v);
    return s;
  }

  DailySeries with_dense_values(const std::vector<double>& v) const {
    std::vector<std::optional<double>> slots(v.begin(), v.end());
    return with_values(std::move(slots));
  }
};

// Chronological split point: the training window ends on cutoff_date
// (inclusive); everything after it is the test window.
struct SplitSpec {
  Date cutoff_date;
};

// Arrange records for one station/class on a contiguous daily grid from the
// earliest to the latest matching date. Days without a record are missing.
inline DailySeries to_series(const std::vector<TrafficRecord>& records,
                             int station, VehicleClass cls) {
  std::map<Date, double> by_date;
  for (const auto& r : records) {
    if (r.station_code != station) continue;
    auto [it, inserted] = by_date.emplace(r.date, double(r.count(cls)));
    if (!inserted) {
      throw precondition_error("duplicate record for station " +
                               std::to_string(station) + " on " +
                               r.date.to_string());
    }
  }
  if (by_date.empty()) {
    throw precondition_error("no records for station " +
                             std::to_string(station) + " class " +
                             to_string(cls));
  }
  const Date first = by_date.begin()->first;
  const Date last = by_date.rbegin()->first;
  DailySeries s;
  s.station_code = station;
  s.vehicle_class = cls;
  s.start_date = first;
  s.values.assign(static_cast<std::size_t>(last - first) + 1, std::nullopt);
  for (const auto& [date, value] : by_date) {
    s.values[static_cast<std::size_t>(date - first)] = value;
  }
  return s;
}

// Split into (train, test): train holds all days <= cutoff, test the rest.
// The cutoff must leave at least one day on each side.
inline std::pair<DailySeries, DailySeries> split_train_test(
    const DailySeries& series, const SplitSpec& spec) {
  if (spec.cutoff_date < series.start_date ||
      spec.cutoff_date >= series.end_date()) {
    throw precondition_error("cutoff " + spec.cutoff_date.to_string() +
                             " does not lie strictly inside the series span " +
                             series.start_date.to_string() + ".." +
                             series.end_date().to_string());
  }
  const auto n_train =
      static_cast<std::size_t>(spec.cutoff_date - series.start_date) + 1;
  DailySeries train = series;
  train.values.assign(series.values.begin(),
                      series.values.begin() + static_cast<std::ptrdiff_t>(n_train));
  DailySeries test = series;
  test.start_date = spec.cutoff_date + 1;
  test.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(n_train),
                     series.values.end());
  return {std::move(train), std::move(test)};
}

}  // namespace tollcast
