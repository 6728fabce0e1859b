#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "tollcast/error.hpp"
#include "tollcast/rng.hpp"
#include "tollcast/tree.hpp"

namespace tollcast {

enum class BoostLoss { linear, square, exponential };

inline BoostLoss parse_boost_loss(std::string_view token) {
  if (token == "linear") return BoostLoss::linear;
  if (token == "square") return BoostLoss::square;
  if (token == "exponential") return BoostLoss::exponential;
  throw config_error("boost loss must be linear, square or exponential");
}

// AdaBoost.R2 knobs. `n_estimators` is a cap: boosting stops early when a
// round is perfect or when its weighted loss reaches 0.5. The base learner
// is a shallow CART tree (depth 3 unless overridden).
struct BoostParams {
  int n_estimators = 10000;
  double learning_rate = 1.0;
  TreeParams base = [] {
    TreeParams t;
    t.max_depth = 3;
    return t;
  }();
  BoostLoss loss = BoostLoss::linear;
  std::uint64_t seed = 0;
  // Keep the row-weight vector after every round. Off by default; the
  // verification harness switches it on to replay the weight recurrence.
  bool record_weight_trace = false;
};

class BoostModel {
 public:
  BoostModel() = default;
  BoostModel(BoostParams params, std::vector<RegressionTree> trees,
             std::vector<double> estimator_weights,
             std::vector<std::vector<double>> weight_trace)
      : params_(std::move(params)),
        trees_(std::move(trees)),
        estimator_weights_(std::move(estimator_weights)),
        weight_trace_(std::move(weight_trace)) {}

  const BoostParams& params() const { return params_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  const std::vector<double>& estimator_weights() const { return estimator_weights_; }
  const std::vector<std::vector<double>>& weight_trace() const { return weight_trace_; }

  // Weighted median of the per-tree predictions: the smallest prediction
  // whose cumulative estimator weight reaches half the total.
  double predict_row(const std::vector<double>& row) const {
    const std::size_t t = trees_.size();
    std::vector<std::pair<double, double>> preds;
    preds.reserve(t);
    for (std::size_t i = 0; i < t; ++i) {
      preds.emplace_back(trees_[i].predict_row(row), estimator_weights_[i]);
    }
    std::sort(preds.begin(), preds.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double total = 0.0;
    for (const auto& p : preds) total += p.second;
    const double half = 0.5 * total;
    double cum = 0.0;
    for (const auto& p : preds) {
      cum += p.second;
      if (cum >= half) return p.first;
    }
    return preds.back().first;
  }

  std::vector<double> predict(const std::vector<std::vector<double>>& rows) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(predict_row(r));
    return out;
  }

 private:
  BoostParams params_;
  std::vector<RegressionTree> trees_;
  std::vector<double> estimator_weights_;
  std::vector<std::vector<double>> weight_trace_;
};

namespace detail {

// n draws from the categorical distribution given by `weights` (inverse-CDF
// on the running sum).
inline std::vector<std::size_t> weighted_bootstrap(const std::vector<double>& weights,
                                                   Rng& rng) {
  const std::size_t n = weights.size();
  std::vector<double> cdf(n);
  double cum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cum += weights[i];
    cdf[i] = cum;
  }
  std::vector<std::size_t> picks(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.uniform01() * cum;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    picks[k] = std::min(n - 1, static_cast<std::size_t>(it - cdf.begin()));
  }
  return picks;
}

inline double boost_loss_value(BoostLoss loss, double normalized_error) {
  switch (loss) {
    case BoostLoss::linear: return normalized_error;
    case BoostLoss::square: return normalized_error * normalized_error;
    case BoostLoss::exponential: return 1.0 - std::exp(-normalized_error);
  }
  return normalized_error;
}

}  // namespace detail

// AdaBoost.R2: rounds of (weighted-bootstrap sample -> base tree -> losses
// normalized by the round's max error -> multiplicative weight update).
// A round with zero max error is kept and stops boosting; a round whose
// average loss reaches 0.5 is discarded (unless it is the only one) and
// stops boosting.
inline BoostModel fit_adaboost_r2(const std::vector<std::vector<double>>& X,
                                  const std::vector<double>& y,
                                  const BoostParams& params) {
  const std::size_t n = X.size();
  if (n < 2) throw precondition_error("fit_adaboost_r2: need at least 2 rows");
  if (params.n_estimators < 1) throw config_error("n_estimators must be >= 1");
  if (!(params.learning_rate > 0.0)) throw config_error("learning_rate must be > 0");

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<RegressionTree> trees;
  std::vector<double> estimator_weights;
  std::vector<std::vector<double>> trace;
  if (params.record_weight_trace) trace.push_back(w);

  std::vector<std::vector<double>> sample_x(n);
  std::vector<double> sample_y(n);
  for (int round = 0; round < params.n_estimators; ++round) {
    Rng rng(Rng::derive(params.seed, static_cast<std::uint64_t>(round)));
    const auto picks = detail::weighted_bootstrap(w, rng);
    for (std::size_t k = 0; k < n; ++k) {
      sample_x[k] = X[picks[k]];
      sample_y[k] = y[picks[k]];
    }
    RegressionTree tree =
        fit_tree(sample_x, sample_y, params.base, rng, SplitMode::exhaustive);

    std::vector<double> errors(n);
    double max_error = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      errors[i] = std::abs(tree.predict_row(X[i]) - y[i]);
      max_error = std::max(max_error, errors[i]);
    }
    if (max_error == 0.0) {
      // Perfect fit on the full sample: keep it and stop.
      trees.push_back(std::move(tree));
      estimator_weights.push_back(1.0);
      if (params.record_weight_trace) trace.push_back(w);
      break;
    }
    double avg_loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      errors[i] = detail::boost_loss_value(params.loss, errors[i] / max_error);
      avg_loss += w[i] * errors[i];
    }
    if (avg_loss >= 0.5) {
      if (trees.empty()) {
        trees.push_back(std::move(tree));
        estimator_weights.push_back(1.0);
        if (params.record_weight_trace) trace.push_back(w);
      }
      break;
    }
    const double beta = avg_loss / (1.0 - avg_loss);
    trees.push_back(std::move(tree));
    estimator_weights.push_back(params.learning_rate * std::log(1.0 / beta));

    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::pow(beta, (1.0 - errors[i]) * params.learning_rate);
      wsum += w[i];
    }
    for (double& wi : w) wi /= wsum;
    if (params.record_weight_trace) trace.push_back(w);
  }
  return BoostModel(params, std::move(trees), std::move(estimator_weights),
                    std::move(trace));
}

}  // namespace tollcast
