#pragma once

#include <string>
#include <vector>

#include "tollcast/error.hpp"
#include "tollcast/rng.hpp"
#include "tollcast/tree.hpp"

namespace tollcast {

enum class ForestMode { random_forest, extra_trees };

// Random Forest: bootstrap resampling + exhaustive splits.
// Extra-Trees: full sample (by default) + one random threshold per candidate
// feature. Per-tree seeds derive from the master seed before any tree is
// grown, so a parallel build would reproduce the sequential result.
struct ForestParams {
  int n_estimators = 100;
  TreeParams tree;
  bool bootstrap = true;
  ForestMode mode = ForestMode::random_forest;

  static ForestParams random_forest_defaults() {
    ForestParams p;
    p.n_estimators = 5000;
    p.tree.max_features = MaxFeaturesRule::sqrt();
    p.tree.min_samples_split = 2;
    p.tree.min_samples_leaf = 1;
    p.bootstrap = true;
    p.mode = ForestMode::random_forest;
    return p;
  }

  static ForestParams extra_trees_defaults() {
    ForestParams p;
    p.n_estimators = 100;
    p.tree.max_features = MaxFeaturesRule::frac(0.75);
    p.tree.min_samples_split = 10;
    p.tree.min_samples_leaf = 13;
    p.bootstrap = false;
    p.mode = ForestMode::extra_trees;
    return p;
  }
};

class ForestModel {
 public:
  ForestModel() = default;
  ForestModel(ForestParams params, std::vector<RegressionTree> trees)
      : params_(std::move(params)), trees_(std::move(trees)) {}

  const ForestParams& params() const { return params_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }

  double predict_row(const std::vector<double>& row) const {
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict_row(row);
    return sum / static_cast<double>(trees_.size());
  }

  std::vector<double> predict(const std::vector<std::vector<double>>& rows) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(predict_row(r));
    return out;
  }

 private:
  ForestParams params_;
  std::vector<RegressionTree> trees_;
};

inline ForestModel fit_forest(const std::vector<std::vector<double>>& X,
                              const std::vector<double>& y,
                              const ForestParams& params) {
  if (params.n_estimators < 1) throw config_error("n_estimators must be >= 1");
  if (X.empty()) throw precondition_error("fit_forest: no training rows");
  const SplitMode mode = params.mode == ForestMode::random_forest
                             ? SplitMode::exhaustive
                             : SplitMode::random_threshold;
  const std::size_t n = X.size();
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(params.n_estimators));
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    seeds[i] = Rng::derive(params.tree.seed, i);
  }
  std::vector<RegressionTree> trees;
  trees.reserve(seeds.size());
  std::vector<std::vector<double>> sample_x;
  std::vector<double> sample_y;
  for (std::uint64_t seed : seeds) {
    Rng rng(seed);
    if (params.bootstrap) {
      sample_x.clear();
      sample_y.clear();
      sample_x.reserve(n);
      sample_y.reserve(n);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = static_cast<std::size_t>(rng.below(n));
        sample_x.push_back(X[i]);
        sample_y.push_back(y[i]);
      }
      trees.push_back(fit_tree(sample_x, sample_y, params.tree, rng, mode));
    } else {
      trees.push_back(fit_tree(X, y, params.tree, rng, mode));
    }
  }
  return ForestModel(params, std::move(trees));
}

}  // namespace tollcast
