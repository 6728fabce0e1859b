#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "tollcast/error.hpp"
#include "tollcast/rng.hpp"

namespace tollcast {

// How many features to examine per split: all of them, floor(sqrt(F)), or
// floor(f * F), never fewer than one.
struct MaxFeaturesRule {
  enum class Kind { all, sqrt_rule, fraction };
  Kind kind = Kind::all;
  double fraction = 1.0;

  static MaxFeaturesRule all() { return {}; }
  static MaxFeaturesRule sqrt() { return {Kind::sqrt_rule, 0.0}; }
  static MaxFeaturesRule frac(double f) {
    if (!(f > 0.0) || f > 1.0) {
      throw config_error("max_features fraction must lie in (0, 1]");
    }
    return {Kind::fraction, f};
  }

  // "all", "sqrt", or a decimal fraction such as "0.75".
  static MaxFeaturesRule parse(std::string_view token) {
    if (token == "all") return all();
    if (token == "sqrt") return sqrt();
    try {
      return frac(std::stod(std::string(token)));
    } catch (const std::exception&) {
      throw config_error("bad max_features '" + std::string(token) + "'");
    }
  }

  int resolve(int n_features) const {
    switch (kind) {
      case Kind::all:
        return n_features;
      case Kind::sqrt_rule:
        return std::max(1, static_cast<int>(std::floor(
                               std::sqrt(static_cast<double>(n_features)))));
      case Kind::fraction:
        return std::max(1, static_cast<int>(std::floor(fraction * n_features)));
    }
    return n_features;
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::all: return "all";
      case Kind::sqrt_rule: return "sqrt";
      default: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", fraction);
        return buf;
      }
    }
  }
};

struct TreeParams {
  MaxFeaturesRule max_features = MaxFeaturesRule::all();
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  int max_depth = -1;  // < 0 means unlimited
  std::uint64_t seed = 0;
};

enum class SplitMode { exhaustive, random_threshold };

// Flat node table. Internal nodes route rows with x[feature] <= threshold to
// `left`; leaves carry the mean target of the training rows that reached them.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes, int n_features)
      : nodes_(std::move(nodes)), n_features_(n_features) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int feature_count() const { return n_features_; }

  double predict_row(const std::vector<double>& row) const {
    if (static_cast<int>(row.size()) != n_features_) {
      throw shape_error("tree fitted on " + std::to_string(n_features_) +
                        " features, row has " + std::to_string(row.size()));
    }
    int i = 0;
    while (!nodes_[static_cast<std::size_t>(i)].is_leaf()) {
      const TreeNode& n = nodes_[static_cast<std::size_t>(i)];
      i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(i)].value;
  }

  std::vector<double> predict(const std::vector<std::vector<double>>& rows) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(predict_row(r));
    return out;
  }

 private:
  std::vector<TreeNode> nodes_;
  int n_features_ = 0;
};

namespace detail {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double score = std::numeric_limits<double>::infinity();
};

// Greedy top-down CART builder over an index workspace partitioned in place.
class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& X,
              const std::vector<double>& y, const TreeParams& params,
              Rng& rng, SplitMode mode)
      : X_(X), y_(y), params_(params), rng_(rng), mode_(mode) {
    n_features_ = static_cast<int>(X[0].size());
    k_features_ = params.max_features.resolve(n_features_);
    idx_.resize(X.size());
    std::iota(idx_.begin(), idx_.end(), std::size_t{0});
  }

  RegressionTree build() {
    build_node(0, idx_.size(), 0);
    return RegressionTree(std::move(nodes_), n_features_);
  }

 private:
  // Sum of squared deviations via sum/sum-of-squares; exact for integer-valued
  // targets, which is what the equivalence harness relies on.
  static double sse(double sum, double sumsq, double n) {
    return sumsq - (sum * sum) / n;
  }

  int build_node(std::size_t lo, std::size_t hi, int depth) {
    const std::size_t m = hi - lo;
    double sum = 0.0, sumsq = 0.0;
    double ymin = y_[idx_[lo]], ymax = y_[idx_[lo]];
    for (std::size_t p = lo; p < hi; ++p) {
      const double v = y_[idx_[p]];
      sum += v;
      sumsq += v * v;
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
    const int node_id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const bool depth_capped = params_.max_depth >= 0 && depth >= params_.max_depth;
    if (m < static_cast<std::size_t>(params_.min_samples_split) || depth_capped ||
        ymin == ymax) {
      make_leaf(node_id, sum, m);
      return node_id;
    }
    const SplitChoice split = find_split(lo, hi, sse(sum, sumsq, double(m)));
    if (!split.found) {
      make_leaf(node_id, sum, m);
      return node_id;
    }
    auto mid = std::stable_partition(
        idx_.begin() + static_cast<std::ptrdiff_t>(lo),
        idx_.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t i) {
          return X_[i][static_cast<std::size_t>(split.feature)] <= split.threshold;
        });
    const std::size_t cut = static_cast<std::size_t>(mid - idx_.begin());
    nodes_[static_cast<std::size_t>(node_id)].feature = split.feature;
    nodes_[static_cast<std::size_t>(node_id)].threshold = split.threshold;
    const int left = build_node(lo, cut, depth + 1);
    const int right = build_node(cut, hi, depth + 1);
    nodes_[static_cast<std::size_t>(node_id)].left = left;
    nodes_[static_cast<std::size_t>(node_id)].right = right;
    return node_id;
  }

  void make_leaf(int node_id, double sum, std::size_t m) {
    TreeNode& n = nodes_[static_cast<std::size_t>(node_id)];
    n.feature = -1;
    n.value = sum / static_cast<double>(m);
  }

  std::vector<int> candidate_features() {
    std::vector<int> feats(static_cast<std::size_t>(n_features_));
    std::iota(feats.begin(), feats.end(), 0);
    if (k_features_ >= n_features_) return feats;
    for (int i = 0; i < k_features_; ++i) {
      const auto j = static_cast<std::size_t>(i) +
                     static_cast<std::size_t>(rng_.below(
                         static_cast<std::uint64_t>(n_features_ - i)));
      std::swap(feats[static_cast<std::size_t>(i)], feats[j]);
    }
    feats.resize(static_cast<std::size_t>(k_features_));
    // Ascending order keeps the lowest-index tie-break deterministic.
    std::sort(feats.begin(), feats.end());
    return feats;
  }

  // Best split over the sampled features. A split is accepted only if it
  // strictly reduces the node's squared error; ties go to the lowest feature
  // index, then the lowest threshold (features and thresholds are scanned in
  // ascending order with strict improvement).
  SplitChoice find_split(std::size_t lo, std::size_t hi, double node_sse) {
    const std::size_t msl = static_cast<std::size_t>(params_.min_samples_leaf);
    SplitChoice best;
    best.score = node_sse;
    for (int f : candidate_features()) {
      if (mode_ == SplitMode::exhaustive) {
        scan_exhaustive(lo, hi, f, msl, best);
      } else {
        scan_random_threshold(lo, hi, f, msl, best);
      }
    }
    best.found = best.feature >= 0 && best.score < node_sse;
    return best;
  }

  void scan_exhaustive(std::size_t lo, std::size_t hi, int f, std::size_t msl,
                       SplitChoice& best) {
    const std::size_t m = hi - lo;
    pairs_.clear();
    pairs_.reserve(m);
    for (std::size_t p = lo; p < hi; ++p) {
      const std::size_t i = idx_[p];
      pairs_.emplace_back(X_[i][static_cast<std::size_t>(f)], y_[i]);
    }
    std::sort(pairs_.begin(), pairs_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double total_sum = 0.0, total_sq = 0.0;
    for (const auto& [x, yv] : pairs_) {
      total_sum += yv;
      total_sq += yv * yv;
    }
    double left_sum = 0.0, left_sq = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
      left_sum += pairs_[j].second;
      left_sq += pairs_[j].second * pairs_[j].second;
      if (pairs_[j].first == pairs_[j + 1].first) continue;
      const std::size_t n_left = j + 1;
      const std::size_t n_right = m - n_left;
      if (n_left < msl || n_right < msl) continue;
      const double score = sse(left_sum, left_sq, double(n_left)) +
                           sse(total_sum - left_sum, total_sq - left_sq,
                               double(n_right));
      if (score < best.score) {
        best.score = score;
        best.feature = f;
        // Midpoint between consecutive distinct values; if it rounds up to
        // the right value, fall back to the left one so the split separates.
        double t = (pairs_[j].first + pairs_[j + 1].first) / 2.0;
        if (!(t < pairs_[j + 1].first)) t = pairs_[j].first;
        best.threshold = t;
      }
    }
  }

  // One uniform threshold in [min, max) per candidate feature; both sides are
  // always nonempty because rows at the column minimum go left.
  void scan_random_threshold(std::size_t lo, std::size_t hi, int f,
                             std::size_t msl, SplitChoice& best) {
    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -std::numeric_limits<double>::infinity();
    for (std::size_t p = lo; p < hi; ++p) {
      const double x = X_[idx_[p]][static_cast<std::size_t>(f)];
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
    }
    if (x_lo == x_hi) return;
    const double t = rng_.uniform(x_lo, x_hi);
    double left_sum = 0.0, left_sq = 0.0, right_sum = 0.0, right_sq = 0.0;
    std::size_t n_left = 0;
    for (std::size_t p = lo; p < hi; ++p) {
      const std::size_t i = idx_[p];
      const double yv = y_[i];
      if (X_[i][static_cast<std::size_t>(f)] <= t) {
        left_sum += yv;
        left_sq += yv * yv;
        ++n_left;
      } else {
        right_sum += yv;
        right_sq += yv * yv;
      }
    }
    const std::size_t n_right = hi - lo - n_left;
    if (n_left < msl || n_right < msl || n_left == 0 || n_right == 0) return;
    const double score =
        sse(left_sum, left_sq, double(n_left)) + sse(right_sum, right_sq, double(n_right));
    if (score < best.score) {
      best.score = score;
      best.feature = f;
      best.threshold = t;
    }
  }

  const std::vector<std::vector<double>>& X_;
  const std::vector<double>& y_;
  const TreeParams& params_;
  Rng& rng_;
  SplitMode mode_;
  int n_features_ = 0;
  int k_features_ = 0;
  std::vector<std::size_t> idx_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, double>> pairs_;
};

}  // namespace detail

// Grow a single regression tree. `rng` drives feature subsampling and, in
// random_threshold mode, the threshold draws; with max_features = all and
// exhaustive splits it is never consulted.
inline RegressionTree fit_tree(const std::vector<std::vector<double>>& X,
                               const std::vector<double>& y,
                               const TreeParams& params, Rng& rng,
                               SplitMode mode = SplitMode::exhaustive) {
  if (X.empty()) throw precondition_error("fit_tree: no training rows");
  if (X.size() != y.size()) {
    throw shape_error("fit_tree: " + std::to_string(X.size()) + " rows vs " +
                      std::to_string(y.size()) + " targets");
  }
  const std::size_t width = X[0].size();
  if (width == 0) throw precondition_error("fit_tree: rows have no features");
  for (const auto& row : X) {
    if (row.size() != width) throw shape_error("fit_tree: ragged feature rows");
  }
  if (params.min_samples_split < 2) throw config_error("min_samples_split must be >= 2");
  if (params.min_samples_leaf < 1) throw config_error("min_samples_leaf must be >= 1");
  detail::TreeBuilder builder(X, y, params, rng, mode);
  return builder.build();
}

}  // namespace tollcast
