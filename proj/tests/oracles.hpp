// Independent reference implementations used only by the test suites.
// Each one recomputes a result the library also produces, by a different
// route, so agreement is meaningful.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <vector>

#include "tollcast/adaboost.hpp"
#include "tollcast/tree.hpp"

namespace oracle {

// --- calendar ---------------------------------------------------------------
// Works directly on (year, month, day) triples; no shared code with
// tollcast::Date, which is day-number based.

inline bool leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

inline int month_length(int y, int m) {
  static const int len[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : len[m - 1];
}

// Sakamoto's method; 0 = Sunday.
inline int sakamoto_dow(int y, int m, int d) {
  static const int t[12] = {0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4};
  if (m < 3) y -= 1;
  return (y + y / 4 - y / 100 + y / 400 + t[m - 1] + d) % 7;
}

inline int dow_monday0(int y, int m, int d) { return (sakamoto_dow(y, m, d) + 6) % 7; }

inline int day_of_year(int y, int m, int d) {
  int doy = d;
  for (int k = 1; k < m; ++k) doy += month_length(y, k);
  return doy;
}

struct Ymd {
  int y, m, d;
};

inline Ymd step(Ymd date, int delta) {  // |delta| is always small here
  while (delta > 0) {
    if (++date.d > month_length(date.y, date.m)) {
      date.d = 1;
      if (++date.m > 12) {
        date.m = 1;
        ++date.y;
      }
    }
    --delta;
  }
  while (delta < 0) {
    if (--date.d < 1) {
      if (--date.m < 1) {
        date.m = 12;
        --date.y;
      }
      date.d = month_length(date.y, date.m);
    }
    ++delta;
  }
  return date;
}

// ISO week via the Thursday rule: the week number of a date is the ordinal
// week (within its ISO year) of the Thursday lying in the same Mon..Sun week.
inline int iso_week(int y, int m, int d) {
  const int dow = dow_monday0(y, m, d);  // Monday = 0
  const Ymd thursday = step({y, m, d}, 3 - dow);
  return (day_of_year(thursday.y, thursday.m, thursday.d) - 1) / 7 + 1;
}

// --- CART ---------------------------------------------------------------------
// Brute-force regression tree: every (feature, midpoint) split at every node
// is scored by direct summation in row order. Same stopping and tie-break
// rules as the library, completely different code path.

struct BruteNode {
  bool leaf = true;
  double value = 0.0;
  int feature = -1;
  double threshold = 0.0;
  std::unique_ptr<BruteNode> left, right;
};

inline double subset_sse(const std::vector<double>& y, const std::vector<std::size_t>& rows) {
  double sum = 0.0, sq = 0.0;
  for (std::size_t i : rows) {
    sum += y[i];
    sq += y[i] * y[i];
  }
  return sq - sum * sum / static_cast<double>(rows.size());
}

inline std::unique_ptr<BruteNode> brute_force_tree(
    const std::vector<std::vector<double>>& X, const std::vector<double>& y,
    const std::vector<std::size_t>& rows, const tollcast::TreeParams& params,
    int depth) {
  auto node = std::make_unique<BruteNode>();
  double sum = 0.0;
  double ymin = y[rows[0]], ymax = y[rows[0]];
  for (std::size_t i : rows) {
    sum += y[i];
    ymin = std::min(ymin, y[i]);
    ymax = std::max(ymax, y[i]);
  }
  node->value = sum / static_cast<double>(rows.size());
  const bool depth_capped = params.max_depth >= 0 && depth >= params.max_depth;
  if (rows.size() < static_cast<std::size_t>(params.min_samples_split) || depth_capped ||
      ymin == ymax) {
    return node;
  }
  const double node_sse = subset_sse(y, rows);
  double best_score = node_sse;
  int best_feature = -1;
  double best_threshold = 0.0;
  const std::size_t n_features = X[0].size();
  for (std::size_t f = 0; f < n_features; ++f) {
    std::vector<double> values;
    for (std::size_t i : rows) values.push_back(X[i][f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t j = 0; j + 1 < values.size(); ++j) {
      double t = (values[j] + values[j + 1]) / 2.0;
      if (!(t < values[j + 1])) t = values[j];
      std::vector<std::size_t> left, right;
      for (std::size_t i : rows) {
        (X[i][f] <= t ? left : right).push_back(i);
      }
      if (left.size() < static_cast<std::size_t>(params.min_samples_leaf) ||
          right.size() < static_cast<std::size_t>(params.min_samples_leaf)) {
        continue;
      }
      const double score = subset_sse(y, left) + subset_sse(y, right);
      if (score < best_score) {
        best_score = score;
        best_feature = static_cast<int>(f);
        best_threshold = t;
      }
    }
  }
  if (best_feature < 0) return node;
  node->leaf = false;
  node->feature = best_feature;
  node->threshold = best_threshold;
  std::vector<std::size_t> left, right;
  for (std::size_t i : rows) {
    (X[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right)
        .push_back(i);
  }
  node->left = brute_force_tree(X, y, left, params, depth + 1);
  node->right = brute_force_tree(X, y, right, params, depth + 1);
  return node;
}

inline std::unique_ptr<BruteNode> brute_force_tree(
    const std::vector<std::vector<double>>& X, const std::vector<double>& y,
    const tollcast::TreeParams& params) {
  std::vector<std::size_t> rows(X.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return brute_force_tree(X, y, rows, params, 0);
}

inline double brute_predict(const BruteNode& node, const std::vector<double>& row) {
  if (node.leaf) return node.value;
  return row[static_cast<std::size_t>(node.feature)] <= node.threshold
             ? brute_predict(*node.left, row)
             : brute_predict(*node.right, row);
}

// Structural equality (feature, threshold, leaf values) between the library's
// flat node table and the recursive oracle tree. Values compare bitwise.
inline bool same_tree(const tollcast::RegressionTree& tree, int node_id,
                      const BruteNode& ref) {
  const auto& n = tree.nodes()[static_cast<std::size_t>(node_id)];
  if (ref.leaf) return n.is_leaf() && n.value == ref.value;
  if (n.is_leaf()) return false;
  if (n.feature != ref.feature || n.threshold != ref.threshold) return false;
  return same_tree(tree, n.left, *ref.left) && same_tree(tree, n.right, *ref.right);
}

inline bool same_tree(const tollcast::RegressionTree& tree, const BruteNode& ref) {
  return same_tree(tree, 0, ref);
}

// --- SMAPE -----------------------------------------------------------------
// Straight from the formula, term by term.

inline double smape_reference(const std::vector<double>& a, const std::vector<double>& f) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double num = std::fabs(f[i] - a[i]);
    const double den = (std::fabs(a[i]) + std::fabs(f[i])) / 2.0;
    total += den == 0.0 ? 0.0 : num / den;
  }
  return 100.0 / static_cast<double>(a.size()) * total;
}

// --- AdaBoost.R2 weight recurrence --------------------------------------------
// Replays the weight update from the fitted trees alone and returns the
// per-round weight vectors plus estimator weights it would produce.

struct BoostReplay {
  std::vector<std::vector<double>> weights;  // after each round, starting uniform
  std::vector<double> estimator_weights;
};

inline BoostReplay replay_adaboost_r2(const tollcast::BoostModel& model,
                                      const std::vector<std::vector<double>>& X,
                                      const std::vector<double>& y) {
  const std::size_t n = X.size();
  BoostReplay replay;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  replay.weights.push_back(w);
  const double lr = model.params().learning_rate;
  for (const auto& tree : model.trees()) {
    std::vector<double> loss(n);
    double max_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      loss[i] = std::fabs(tree.predict_row(X[i]) - y[i]);
      max_err = std::max(max_err, loss[i]);
    }
    if (max_err == 0.0) {
      replay.estimator_weights.push_back(1.0);
      replay.weights.push_back(w);
      break;
    }
    double avg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      loss[i] /= max_err;  // linear loss
      avg += w[i] * loss[i];
    }
    if (avg >= 0.5) {
      if (replay.estimator_weights.empty()) {
        replay.estimator_weights.push_back(1.0);
        replay.weights.push_back(w);
      }
      break;
    }
    const double beta = avg / (1.0 - avg);
    replay.estimator_weights.push_back(lr * std::log(1.0 / beta));
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::pow(beta, (1.0 - loss[i]) * lr);
      sum += w[i];
    }
    for (double& wi : w) wi /= sum;
    replay.weights.push_back(w);
  }
  return replay;
}

}  // namespace oracle
