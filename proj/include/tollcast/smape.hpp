#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tollcast/error.hpp"

namespace tollcast {

// Symmetric mean absolute percentage error, half-sum denominator:
//   100/n * sum |F - A| / ((|A| + |F|) / 2)
// A day with A = F = 0 contributes nothing. Range [0, 200] for
// non-negative inputs.
inline double smape(const std::vector<double>& actual,
                    const std::vector<double>& forecast) {
  if (actual.empty() || actual.size() != forecast.size()) {
    throw shape_error("smape: need equal-length non-empty vectors, got " +
                      std::to_string(actual.size()) + " and " +
                      std::to_string(forecast.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double denom = (std::abs(actual[i]) + std::abs(forecast[i])) / 2.0;
    if (denom == 0.0) continue;
    sum += std::abs(forecast[i] - actual[i]) / denom;
  }
  return 100.0 * sum / static_cast<double>(actual.size());
}

}  // namespace tollcast
