#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tollcast/features.hpp"
#include "tollcast/rng.hpp"
#include "tollcast/series.hpp"

using namespace tollcast;

namespace {

DailySeries days_from(Date start, int n, double value = 1.0) {
  DailySeries s;
  s.station_code = 4;
  s.start_date = start;
  for (int i = 0; i < n; ++i) s.values.emplace_back(value + i);
  return s;
}

}  // namespace

TEST_CASE("explode_date fills every calendar attribute") {
  const auto row = explode_date(Date(2017, 1, 1));
  CHECK(row.year == 2017);
  CHECK(row.month == 1);
  CHECK(row.week == 52);
  CHECK(row.day == 1);
  CHECK(row.day_of_week == 6);
  CHECK(row.day_of_year == 1);
  CHECK(row.is_weekend);
  CHECK(row.dow_onehot == std::array<double, 7>{0, 0, 0, 0, 0, 0, 1});

  const auto monday = explode_date(Date(2016, 2, 29));
  CHECK(monday.day_of_week == 0);
  CHECK_FALSE(monday.is_weekend);
  CHECK(monday.dow_onehot == std::array<double, 7>{1, 0, 0, 0, 0, 0, 0});
}

TEST_CASE("sunday week start renumbers days but keeps the weekend flag") {
  const auto sun = explode_date(Date(2017, 1, 1), WeekStart::sunday);
  CHECK(sun.day_of_week == 0);  // Sunday first
  CHECK(sun.is_weekend);
  const auto sat = explode_date(Date(2017, 1, 7), WeekStart::sunday);
  CHECK(sat.day_of_week == 6);
  CHECK(sat.is_weekend);
  const auto mon = explode_date(Date(2017, 1, 2), WeekStart::sunday);
  CHECK(mon.day_of_week == 1);
  CHECK_FALSE(mon.is_weekend);
}

TEST_CASE("a full week starting Monday yields the identity one-hot block") {
  // 2024-01-01 is a Monday.
  const auto m = build_matrix(days_from(Date(2024, 1, 1), 7));
  REQUIRE(m.n_rows() == 7);
  REQUIRE(m.n_cols() == 14);
  for (std::size_t r = 0; r < 7; ++r) {
    for (std::size_t c = 0; c < 7; ++c) {
      CHECK(m.rows[r][7 + c] == (r == c ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("IS_WEEKEND equals DOW_5 + DOW_6 on random dates") {
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const Date d = Date(2000, 1, 1) + static_cast<std::int64_t>(rng.below(36000));
    const auto row = feature_row(d);
    CHECK(row[6] == row[7 + 5] + row[7 + 6]);
  }
}

TEST_CASE("a four-year series yields 1461 rows of 14 features") {
  const auto m = build_matrix(days_from(Date(2013, 1, 1), 1461));
  CHECK(m.n_rows() == 1461);
  CHECK(m.n_cols() == 14);
  CHECK(m.targets.size() == 1461);
  CHECK(m.dates.front() == Date(2013, 1, 1));
  CHECK(m.dates.back() == Date(2016, 12, 31));
  CHECK(m.station_code == 4);
}

TEST_CASE("build_matrix needs a fully present series") {
  DailySeries s = days_from(Date(2020, 1, 1), 5);
  s.values[2].reset();
  CHECK_THROWS_AS(build_matrix(s), precondition_error);
}

TEST_CASE("minmax scaling maps training columns into the unit interval") {
  FeatureMatrix m;
  m.column_names = {"a", "b"};
  m.rows = {{0.0, 3.0}, {5.0, 3.0}, {10.0, 3.0}};
  m.targets = {1, 2, 3};
  m.dates = {Date(2020, 1, 1), Date(2020, 1, 2), Date(2020, 1, 3)};
  const auto p = fit_scaler(m, ScaleMode::minmax01);
  const auto scaled = apply_scaler(m, p);
  CHECK(scaled.rows[0][0] == 0.0);
  CHECK(scaled.rows[1][0] == 0.5);
  CHECK(scaled.rows[2][0] == 1.0);
  // Constant column maps to zero rather than dividing by zero.
  for (const auto& r : scaled.rows) CHECK(r[1] == 0.0);
}

TEST_CASE("standardize uses the population denominator") {
  FeatureMatrix m;
  m.column_names = {"a"};
  m.rows = {{1.0}, {2.0}, {3.0}};
  m.targets = {0, 0, 0};
  m.dates = {Date(2020, 1, 1), Date(2020, 1, 2), Date(2020, 1, 3)};
  const auto p = fit_scaler(m, ScaleMode::standardize);
  const auto scaled = apply_scaler(m, p);
  CHECK(scaled.rows[0][0] == Catch::Approx(-1.2247448714).epsilon(1e-9));
  CHECK(scaled.rows[1][0] == Catch::Approx(0.0).margin(1e-12));
  CHECK(scaled.rows[2][0] == Catch::Approx(1.2247448714).epsilon(1e-9));
}

TEST_CASE("scaling then unscaling reproduces the original") {
  Rng rng(8);
  FeatureMatrix m;
  m.column_names = {"a", "b", "c"};
  for (int i = 0; i < 50; ++i) {
    m.rows.push_back({rng.uniform(-5, 5), rng.uniform(100, 200), rng.uniform(0, 1)});
    m.targets.push_back(0.0);
    m.dates.push_back(Date(2020, 1, 1) + i);
  }
  for (const ScaleMode mode : {ScaleMode::minmax01, ScaleMode::standardize}) {
    const auto p = fit_scaler(m, mode);
    const auto scaled = apply_scaler(m, p);
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
      for (std::size_t c = 0; c < m.n_cols(); ++c) {
        const double back = p.unscale_value(c, scaled.rows[r][c]);
        CHECK(back == Catch::Approx(m.rows[r][c]).epsilon(1e-12).margin(1e-12));
      }
    }
    if (mode == ScaleMode::minmax01) {
      for (const auto& row : scaled.rows) {
        for (double v : row) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("unseen rows may scale outside the unit interval") {
  FeatureMatrix m;
  m.column_names = {"a"};
  m.rows = {{0.0}, {10.0}};
  m.targets = {0, 0};
  m.dates = {Date(2020, 1, 1), Date(2020, 1, 2)};
  const auto p = fit_scaler(m, ScaleMode::minmax01);
  CHECK(p.scale_row({20.0})[0] == 2.0);  // no clipping
  CHECK_THROWS_AS(p.scale_row({1.0, 2.0}), shape_error);
}

TEST_CASE("rebuilding a matrix from reordered records gives identical rows") {
  // to_series sorts by date, so shuffled input produces the same matrix.
  std::vector<TrafficRecord> records;
  for (int i = 0; i < 40; ++i) records.push_back({4, Date(2021, 3, 1) + i, 100 + i, 0, 0});
  Rng rng(12);
  auto shuffled = records;
  shuffle(shuffled, rng);
  const auto a = build_matrix(to_series(records, 4, VehicleClass::tc1));
  const auto b = build_matrix(to_series(shuffled, 4, VehicleClass::tc1));
  CHECK(a.rows == b.rows);
  CHECK(a.targets == b.targets);
}
