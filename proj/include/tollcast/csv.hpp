#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tollcast/error.hpp"
#include "tollcast/series.hpp"

namespace tollcast {

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline long long parse_count(const std::string& field, int line_no,
                             const char* column) {
  if (field.empty()) {
    throw parse_error("line " + std::to_string(line_no) + ": empty " +
                      column + " value");
  }
  std::size_t i = 0;
  bool negative = false;
  if (field[0] == '-' || field[0] == '+') {
    negative = field[0] == '-';
    i = 1;
  }
  long long v = 0;
  if (i == field.size()) {
    throw parse_error("line " + std::to_string(line_no) + ": bad " + column +
                      " value '" + field + "'");
  }
  for (; i < field.size(); ++i) {
    if (field[i] < '0' || field[i] > '9') {
      throw parse_error("line " + std::to_string(line_no) + ": bad " + column +
                        " value '" + field + "'");
    }
    v = v * 10 + (field[i] - '0');
  }
  if (negative && v != 0) {
    throw parse_error("line " + std::to_string(line_no) + ": negative " +
                      column + " count " + field);
  }
  return v;
}

}  // namespace detail

inline constexpr const char* kTrafficCsvHeader = "STATION_CODE,DATE,TC1,TC2,TC3";

// Read station-day records from `STATION_CODE,DATE,TC1,TC2,TC3` text.
// Rows come back in file order. Errors carry the 1-based line number.
inline std::vector<TrafficRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw parse_error("empty input, expected header row");
  if (detail::strip_cr(line) != kTrafficCsvHeader) {
    throw parse_error(std::string("bad header row, expected '") +
                      kTrafficCsvHeader + "'");
  }
  std::vector<TrafficRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != 5) {
      throw parse_error("line " + std::to_string(line_no) + ": expected 5 columns, got " +
                        std::to_string(fields.size()));
    }
    TrafficRecord r;
    try {
      r.station_code = static_cast<int>(detail::parse_count(fields[0], line_no, "STATION_CODE"));
      r.date = Date::parse(fields[1]);
    } catch (const parse_error& e) {
      // Date::parse does not know the line number; re-raise with context.
      std::string msg = e.what();
      if (msg.find("line ") != 0) msg = "line " + std::to_string(line_no) + ": " + msg;
      throw parse_error(msg);
    }
    r.tc1 = detail::parse_count(fields[2], line_no, "TC1");
    r.tc2 = detail::parse_count(fields[3], line_no, "TC2");
    r.tc3 = detail::parse_count(fields[4], line_no, "TC3");
    records.push_back(r);
  }
  return records;
}

inline std::vector<TrafficRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

inline std::vector<TrafficRecord> parse_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  try {
    return parse_csv(in);
  } catch (const parse_error& e) {
    throw parse_error(path + ": " + e.what());
  }
}

inline void write_csv(std::ostream& out, const std::vector<TrafficRecord>& records) {
  out << kTrafficCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.station_code << ',' << r.date.to_string() << ',' << r.tc1 << ','
        << r.tc2 << ',' << r.tc3 << "\n";
  }
}

// `DATE,VALUE` listing of a single series; missing days are skipped.
inline void write_series_csv(std::ostream& out, const DailySeries& series) {
  out << "DATE,VALUE\n";
  char buf[32];
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series.values[i]) continue;
    std::snprintf(buf, sizeof(buf), "%.6f", *series.values[i]);
    out << series.date_at(i).to_string() << ',' << buf << "\n";
  }
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw io_error("failed writing " + path);
}

}  // namespace tollcast
