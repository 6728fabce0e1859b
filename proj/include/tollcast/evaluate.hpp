#pragma once

#include <algorithm>
#include <cstdio>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tollcast/error.hpp"
#include "tollcast/filters.hpp"
#include "tollcast/forecast_model.hpp"
#include "tollcast/series.hpp"
#include "tollcast/smape.hpp"

namespace tollcast {

struct EvalDay {
  Date date;
  double actual = 0.0;
  double forecast = 0.0;
};

struct EvalReport {
  std::string model;
  double smape_pct = 0.0;
  std::vector<EvalDay> days;
  Date train_start, train_end, test_start, test_end;
  std::string scored_against;  // "raw" or "filtered"
};

enum class ScoreTarget { raw, filtered };

// How evaluate prepares data around the model: the optional filter cleans the
// training window before fitting; scoring compares forecasts against the raw
// test actuals by default, or against the test window passed through the
// same filter.
struct EvalConfig {
  std::optional<FilterConfig> filter;
  ScoreTarget score_against = ScoreTarget::raw;
};

// Fit `model` on the (imputed, optionally filtered) training window and
// score its forecasts over the test window. The test window must start the
// day after the training window ends; the model is fitted in here, so it can
// never see a test target during fitting.
inline EvalReport evaluate(ForecastModel& model, const DailySeries& train,
                           const DailySeries& test, const EvalConfig& cfg = {}) {
  if (train.values.empty() || test.values.empty()) {
    throw precondition_error("evaluate: empty train or test window");
  }
  if (train.station_code != test.station_code ||
      train.vehicle_class != test.vehicle_class) {
    throw precondition_error("evaluate: train and test describe different series");
  }
  if (test.start_date != train.end_date() + 1) {
    throw precondition_error(
        "evaluate: test window must start the day after training ends (train ends " +
        train.end_date().to_string() + ", test starts " +
        test.start_date.to_string() + ")");
  }
  DailySeries fit_series = impute_missing(train);
  if (cfg.filter) fit_series = apply_filter(fit_series, *cfg.filter);
  model.fit(fit_series);

  const DailySeries test_imputed = impute_missing(test);
  const std::vector<double> revealed = test_imputed.dense_values();
  std::vector<Date> dates;
  dates.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) dates.push_back(test.date_at(i));

  const std::vector<double> forecasts = model.forecast(dates, revealed);
  if (forecasts.size() != dates.size()) {
    throw shape_error(model.name() + " returned " + std::to_string(forecasts.size()) +
                      " forecasts for " + std::to_string(dates.size()) + " days");
  }
  std::vector<double> target = revealed;
  if (cfg.score_against == ScoreTarget::filtered && cfg.filter) {
    target = apply_filter(test_imputed, *cfg.filter).dense_values();
  }

  EvalReport report;
  report.model = model.name();
  report.smape_pct = smape(target, forecasts);
  report.train_start = train.start_date;
  report.train_end = train.end_date();
  report.test_start = test.start_date;
  report.test_end = test.end_date();
  report.scored_against =
      cfg.score_against == ScoreTarget::filtered && cfg.filter ? "filtered" : "raw";
  report.days.reserve(dates.size());
  for (std::size_t i = 0; i < dates.size(); ++i) {
    report.days.push_back({dates[i], target[i], forecasts[i]});
  }
  return report;
}

// Evaluate each model on the same split and return the reports sorted by
// ascending SMAPE (stable, so equal scores keep their input order).
inline std::vector<EvalReport> compare(
    const std::vector<ForecastModel*>& models, const DailySeries& train,
    const DailySeries& test, const EvalConfig& cfg = {}) {
  std::vector<EvalReport> reports;
  reports.reserve(models.size());
  for (ForecastModel* m : models) reports.push_back(evaluate(*m, train, test, cfg));
  std::stable_sort(reports.begin(), reports.end(),
                   [](const EvalReport& a, const EvalReport& b) {
                     return a.smape_pct < b.smape_pct;
                   });
  return reports;
}

inline void write_report_csv(std::ostream& out, const std::vector<EvalReport>& reports) {
  out << "MODEL,SMAPE_PCT,TRAIN_START,TRAIN_END,TEST_START,TEST_END\n";
  char buf[32];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), "%.4f", r.smape_pct);
    out << r.model << ',' << buf << ',' << r.train_start.to_string() << ','
        << r.train_end.to_string() << ',' << r.test_start.to_string() << ','
        << r.test_end.to_string() << "\n";
  }
}

inline void write_daily_csv(std::ostream& out, const EvalReport& report) {
  out << "DATE,ACTUAL,FORECAST\n";
  char a[32], f[32];
  for (const auto& d : report.days) {
    std::snprintf(a, sizeof(a), "%.6f", d.actual);
    std::snprintf(f, sizeof(f), "%.6f", d.forecast);
    out << d.date.to_string() << ',' << a << ',' << f << "\n";
  }
}

// Plain-text summary, SMAPE to one decimal place.
inline void render_comparison(std::ostream& out, const std::vector<EvalReport>& reports) {
  std::size_t width = 5;
  for (const auto& r : reports) width = std::max(width, r.model.size());
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-*s  %7s  %-8s  %s\n", static_cast<int>(width),
                "model", "smape%", "scoring", "test window");
  out << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), "%-*s  %7.1f  %-8s  %s..%s\n",
                  static_cast<int>(width), r.model.c_str(), r.smape_pct,
                  r.scored_against.c_str(), r.test_start.to_string().c_str(),
                  r.test_end.to_string().c_str());
    out << buf;
  }
}

}  // namespace tollcast
