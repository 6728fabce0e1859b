#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "tollcast/csv.hpp"
#include "tollcast/rng.hpp"
#include "tollcast/series.hpp"

using namespace tollcast;

TEST_CASE("parse_csv maps fields directly") {
  const auto records = parse_csv("STATION_CODE,DATE,TC1,TC2,TC3\n7,2014-03-02,1200,300,80");
  REQUIRE(records.size() == 1);
  CHECK(records[0].station_code == 7);
  CHECK(records[0].date == Date(2014, 3, 2));
  CHECK(records[0].tc1 == 1200);
  CHECK(records[0].tc2 == 300);
  CHECK(records[0].tc3 == 80);
}

TEST_CASE("parse_csv rejects malformed rows with line numbers") {
  const std::string header = "STATION_CODE,DATE,TC1,TC2,TC3\n";
  CHECK_THROWS_WITH(parse_csv(header + "7,2014-13-02,1,1,1"),
                    Catch::Matchers::ContainsSubstring("line 2"));
  CHECK_THROWS_AS(parse_csv(header + "7,2014-03-02,-5,1,1"), parse_error);
  CHECK_THROWS_AS(parse_csv(header + "7,2014-03-02,1,1"), parse_error);
  CHECK_THROWS_AS(parse_csv(header + "7,2014-03-02,1,x,1"), parse_error);
  CHECK_THROWS_AS(parse_csv("WRONG,HEADER\n"), parse_error);
  CHECK_THROWS_AS(parse_csv(""), parse_error);
}

TEST_CASE("parse_csv accepts CRLF line endings and skips blank lines") {
  const auto records =
      parse_csv("STATION_CODE,DATE,TC1,TC2,TC3\r\n7,2014-03-02,1,2,3\r\n\r\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0].tc3 == 3);
}

TEST_CASE("csv round trip is the identity on well-formed input") {
  Rng rng(5);
  std::vector<TrafficRecord> records;
  Date d(2014, 1, 1);
  for (int i = 0; i < 200; ++i) {
    records.push_back({3, d, static_cast<long long>(rng.below(100000)),
                       static_cast<long long>(rng.below(5000)),
                       static_cast<long long>(rng.below(800))});
    d = d + 1 + static_cast<std::int64_t>(rng.below(3));  // occasional gaps
  }
  std::ostringstream out;
  write_csv(out, records);
  const auto reparsed = parse_csv(out.str());
  REQUIRE(reparsed.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(reparsed[i].station_code == records[i].station_code);
    CHECK(reparsed[i].date == records[i].date);
    CHECK(reparsed[i].tc1 == records[i].tc1);
    CHECK(reparsed[i].tc2 == records[i].tc2);
    CHECK(reparsed[i].tc3 == records[i].tc3);
  }
}

TEST_CASE("to_series inserts gaps for absent days") {
  std::vector<TrafficRecord> records = {
      {1, Date(2020, 1, 1), 10, 0, 0},
      {1, Date(2020, 1, 3), 30, 0, 0},
  };
  const auto s = to_series(records, 1, VehicleClass::tc1);
  REQUIRE(s.size() == 3);
  CHECK(s.values[0] == 10.0);
  CHECK_FALSE(s.values[1].has_value());
  CHECK(s.values[2] == 30.0);
  CHECK(s.start_date == Date(2020, 1, 1));
}

TEST_CASE("to_series with consecutive days has no gaps") {
  std::vector<TrafficRecord> records;
  for (int i = 0; i < 3; ++i) records.push_back({1, Date(2020, 1, 1) + i, 10, 0, 0});
  const auto s = to_series(records, 1, VehicleClass::tc1);
  REQUIRE(s.size() == 3);
  CHECK(s.all_present());
  for (const auto& v : s.values) CHECK(*v == 10.0);
}

TEST_CASE("to_series errors") {
  std::vector<TrafficRecord> records = {
      {1, Date(2020, 1, 1), 10, 0, 0},
      {1, Date(2020, 1, 1), 11, 0, 0},
  };
  CHECK_THROWS_AS(to_series(records, 1, VehicleClass::tc1), precondition_error);
  CHECK_THROWS_AS(to_series(records, 9, VehicleClass::tc1), precondition_error);
}

TEST_CASE("to_series span equals date range regardless of input order") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TrafficRecord> records;
    const int span = 5 + static_cast<int>(rng.below(60));
    for (int i = 0; i < span; ++i) {
      if (rng.uniform01() < 0.7) {
        records.push_back({2, Date(2019, 3, 1) + i, static_cast<long long>(i), 0, 0});
      }
    }
    if (records.size() < 2) continue;
    shuffle(records, rng);
    const auto s = to_series(records, 2, VehicleClass::tc1);
    Date lo = records[0].date, hi = records[0].date;
    for (const auto& r : records) {
      lo = std::min(lo, r.date);
      hi = std::max(hi, r.date);
    }
    REQUIRE(static_cast<std::int64_t>(s.size()) == hi - lo + 1);
  }
}

TEST_CASE("split_train_test splits chronologically and losslessly") {
  DailySeries s;
  s.start_date = Date(2020, 1, 1);
  for (int i = 0; i < 10; ++i) s.values.emplace_back(double(i));
  const auto [train, test] = split_train_test(s, {Date(2020, 1, 7)});
  CHECK(train.size() == 7);
  CHECK(test.size() == 3);
  CHECK(test.start_date == Date(2020, 1, 8));
  for (int i = 0; i < 7; ++i) CHECK(*train.values[i] == double(i));
  for (int i = 0; i < 3; ++i) CHECK(*test.values[i] == double(7 + i));

  CHECK_THROWS_AS(split_train_test(s, {Date(2020, 1, 10)}), precondition_error);
  CHECK_THROWS_AS(split_train_test(s, {Date(2019, 12, 31)}), precondition_error);
}

TEST_CASE("a four-year series cut at 2016-05-31 tests from 2016-06-01 on") {
  DailySeries s;
  s.start_date = Date(2013, 1, 1);
  for (int i = 0; i < 1461; ++i) s.values.emplace_back(1.0);
  const auto [train, test] = split_train_test(s, {Date(2016, 5, 31)});
  CHECK(test.start_date == Date(2016, 6, 1));
  CHECK(test.end_date() == Date(2016, 12, 31));
  CHECK(train.size() + test.size() == 1461);
}
