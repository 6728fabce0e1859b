#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tollcast/error.hpp"
#include "tollcast/series.hpp"

namespace tollcast {

enum class FilterKind { median, moving_average, exponential, deseasonalize };

inline FilterKind parse_filter_kind(std::string_view token) {
  if (token == "median") return FilterKind::median;
  if (token == "moving_average" || token == "ma") return FilterKind::moving_average;
  if (token == "exponential" || token == "ema") return FilterKind::exponential;
  if (token == "deseasonalize") return FilterKind::deseasonalize;
  throw config_error("unknown filter '" + std::string(token) + "'");
}

// Knobs for the outlier-smoothing filters. `window` applies to the median and
// moving-average filters, `alpha` to the exponential one, `period` to
// deseasonalization.
struct FilterConfig {
  FilterKind kind = FilterKind::median;
  int window = 5;
  double alpha = 0.3;
  int period = 7;
};

// Multiplicative seasonal profile: `period` positive factors with mean 1.
struct SeasonalIndices {
  int period = 0;
  std::vector<double> indices;
};

namespace detail {

inline void require_imputed(const DailySeries& s, const char* op) {
  if (!s.all_present()) {
    throw precondition_error(std::string(op) +
                             ": series has missing values; impute first");
  }
}

inline void require_odd_window(int window, std::size_t n) {
  if (window < 1 || window % 2 == 0) {
    throw config_error("window must be a positive odd integer, got " +
                       std::to_string(window));
  }
  if (static_cast<std::size_t>(window) > n) {
    throw config_error("window " + std::to_string(window) +
                       " larger than series length " + std::to_string(n));
  }
}

}  // namespace detail

// Median of a centered window. Near the series ends the window shrinks
// symmetrically so it always stays centered on the current day and keeps an
// odd number of values; this keeps the filter idempotent on monotone input.
inline DailySeries median_filter(const DailySeries& series, int window) {
  detail::require_imputed(series, "median_filter");
  const auto v = series.dense_values();
  const std::size_t n = v.size();
  detail::require_odd_window(window, n);
  const std::size_t half = static_cast<std::size_t>(window / 2);
  std::vector<double> out(n);
  std::vector<double> buf;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = std::min({half, i, n - 1 - i});
    buf.assign(v.begin() + static_cast<std::ptrdiff_t>(i - k),
               v.begin() + static_cast<std::ptrdiff_t>(i + k + 1));
    auto mid = buf.begin() + static_cast<std::ptrdiff_t>(k);
    std::nth_element(buf.begin(), mid, buf.end());
    out[i] = *mid;
  }
  return series.with_dense_values(out);
}

// Arithmetic mean of the centered window, truncated at the series bounds
// (the window keeps its full half-width on the side that is available).
inline DailySeries moving_average(const DailySeries& series, int window) {
  detail::require_imputed(series, "moving_average");
  const auto v = series.dense_values();
  const std::size_t n = v.size();
  detail::require_odd_window(window, n);
  const std::size_t half = static_cast<std::size_t>(window / 2);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += v[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return series.with_dense_values(out);
}

// out[0] = in[0]; out[t] = alpha * in[t] + (1 - alpha) * out[t-1].
inline DailySeries exponential_moving_average(const DailySeries& series,
                                              double alpha) {
  detail::require_imputed(series, "exponential_moving_average");
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw config_error("alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  const auto v = series.dense_values();
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = i == 0 ? v[0] : alpha * v[i] + (1.0 - alpha) * out[i - 1];
  }
  return series.with_dense_values(out);
}

// Multiplicative weekly (or other-period) decomposition: index k is the mean
// of the values at positions congruent to k, divided by the grand mean and
// renormalized so the indices average exactly 1. Output is input divided by
// its position's index.
inline std::pair<DailySeries, SeasonalIndices> deseasonalize(
    const DailySeries& series, int period) {
  detail::require_imputed(series, "deseasonalize");
  if (period < 2) throw config_error("period must be >= 2");
  const auto v = series.dense_values();
  if (v.size() < 2 * static_cast<std::size_t>(period)) {
    throw config_error("series length " + std::to_string(v.size()) +
                       " too short for period " + std::to_string(period) +
                       " (need at least two full periods)");
  }
  for (double x : v) {
    if (!(x > 0.0)) {
      throw domain_error(
          "deseasonalize requires strictly positive values "
          "(multiplicative model)");
    }
  }
  const std::size_t p = static_cast<std::size_t>(period);
  std::vector<double> sums(p, 0.0);
  std::vector<std::size_t> counts(p, 0);
  double grand = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sums[i % p] += v[i];
    counts[i % p] += 1;
    grand += v[i];
  }
  grand /= static_cast<double>(v.size());
  SeasonalIndices idx;
  idx.period = period;
  idx.indices.resize(p);
  double index_mean = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    idx.indices[k] = sums[k] / static_cast<double>(counts[k]) / grand;
    index_mean += idx.indices[k];
  }
  index_mean /= static_cast<double>(p);
  for (double& x : idx.indices) x /= index_mean;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / idx.indices[i % p];
  return {series.with_dense_values(out), std::move(idx)};
}

// Inverse of deseasonalize. `phase` says which index position slot 0 of the
// series corresponds to, so forecasts appended after a deseasonalized series
// can be mapped back.
inline DailySeries reseasonalize(const DailySeries& series,
                                 const SeasonalIndices& indices, int phase) {
  detail::require_imputed(series, "reseasonalize");
  if (indices.period < 2 ||
      indices.indices.size() != static_cast<std::size_t>(indices.period)) {
    throw config_error("invalid seasonal indices");
  }
  const auto v = series.dense_values();
  const std::size_t p = static_cast<std::size_t>(indices.period);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t k = (static_cast<std::size_t>(((phase % indices.period) +
                                                     indices.period)) + i) % p;
    out[i] = v[i] * indices.indices[k];
  }
  return series.with_dense_values(out);
}

// Fill gaps by linear interpolation between the nearest present neighbors;
// leading and trailing gaps copy the nearest present value.
inline DailySeries impute_missing(const DailySeries& series) {
  const std::size_t n = series.size();
  std::size_t present = n - series.missing_count();
  if (present == 0) throw precondition_error("cannot impute an all-missing series");
  std::vector<double> out(n);
  // Index of the previous present slot, or -1.
  std::ptrdiff_t prev = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (series.values[i]) {
      out[i] = *series.values[i];
      if (prev >= 0 && static_cast<std::size_t>(prev) + 1 < i) {
        const double a = out[static_cast<std::size_t>(prev)];
        const double b = out[i];
        const double span = static_cast<double>(i - static_cast<std::size_t>(prev));
        for (std::size_t j = static_cast<std::size_t>(prev) + 1; j < i; ++j) {
          const double t = static_cast<double>(j - static_cast<std::size_t>(prev)) / span;
          out[j] = a + (b - a) * t;
        }
      } else if (prev < 0 && i > 0) {
        for (std::size_t j = 0; j < i; ++j) out[j] = out[i];
      }
      prev = static_cast<std::ptrdiff_t>(i);
    }
  }
  if (prev >= 0 && static_cast<std::size_t>(prev) + 1 < n) {
    for (std::size_t j = static_cast<std::size_t>(prev) + 1; j < n; ++j) {
      out[j] = out[static_cast<std::size_t>(prev)];
    }
  }
  return series.with_dense_values(out);
}

// Dispatch used by the `clean` pipeline stage. Deseasonalization returns the
// adjusted series and drops the indices; callers that need them should call
// deseasonalize directly.
inline DailySeries apply_filter(const DailySeries& series, const FilterConfig& cfg) {
  switch (cfg.kind) {
    case FilterKind::median: return median_filter(series, cfg.window);
    case FilterKind::moving_average: return moving_average(series, cfg.window);
    case FilterKind::exponential: return exponential_moving_average(series, cfg.alpha);
    case FilterKind::deseasonalize: return deseasonalize(series, cfg.period).first;
  }
  throw config_error("unreachable filter kind");
}

}  // namespace tollcast
