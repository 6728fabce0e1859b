#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tollcast/rng.hpp"
#include "tollcast/tree.hpp"

using namespace tollcast;

namespace {

// Integer-lattice random datasets keep every split score exact in double
// precision, so the library and the brute-force oracle must agree bitwise.
struct LatticeData {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
};

LatticeData random_lattice(Rng& rng, std::size_t max_rows, std::size_t n_features) {
  LatticeData d;
  const std::size_t rows = 2 + rng.below(max_rows - 1);
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> row;
    for (std::size_t f = 0; f < n_features; ++f) {
      row.push_back(static_cast<double>(rng.below(8)));
    }
    d.X.push_back(std::move(row));
    d.y.push_back(static_cast<double>(rng.below(17)));
  }
  return d;
}

}  // namespace

TEST_CASE("constant targets produce a single leaf") {
  std::vector<std::vector<double>> X = {{0}, {1}, {2}, {3}};
  std::vector<double> y = {7, 7, 7, 7};
  Rng rng(1);
  const auto tree = fit_tree(X, y, TreeParams{}, rng);
  REQUIRE(tree.nodes().size() == 1);
  CHECK(tree.predict_row({-100}) == 7.0);
  CHECK(tree.predict_row({55}) == 7.0);
}

TEST_CASE("a clean two-level step is split at its boundary") {
  std::vector<std::vector<double>> X = {{0}, {1}, {2}, {3}};
  std::vector<double> y = {0, 0, 10, 10};
  Rng rng(1);
  const auto tree = fit_tree(X, y, TreeParams{}, rng);
  REQUIRE(tree.nodes().size() == 3);
  CHECK(tree.nodes()[0].feature == 0);
  CHECK(tree.nodes()[0].threshold == 1.5);
  CHECK(tree.predict(X) == y);
}

TEST_CASE("min_samples_leaf equal to n forces a single mean leaf") {
  std::vector<std::vector<double>> X = {{0}, {1}, {2}, {3}};
  std::vector<double> y = {1, 2, 3, 6};
  TreeParams params;
  params.min_samples_leaf = 4;
  Rng rng(1);
  const auto tree = fit_tree(X, y, params, rng);
  REQUIRE(tree.nodes().size() == 1);
  CHECK(tree.predict_row({2}) == 3.0);
}

TEST_CASE("equal-gain splits break ties toward the lowest feature and threshold") {
  // Feature 1 duplicates feature 0, so every split exists on both; the tree
  // must pick feature 0.
  std::vector<std::vector<double>> X = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  std::vector<double> y = {0, 0, 10, 10};
  Rng rng(1);
  const auto tree = fit_tree(X, y, TreeParams{}, rng);
  CHECK(tree.nodes()[0].feature == 0);
}

TEST_CASE("max_depth and min_samples_split stop growth") {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  for (int i = 0; i < 16; ++i) {
    X.push_back({double(i)});
    y.push_back(double(i * i));
  }
  TreeParams depth1;
  depth1.max_depth = 1;
  Rng rng(1);
  const auto stump = fit_tree(X, y, depth1, rng);
  CHECK(stump.nodes().size() <= 3);

  TreeParams no_split;
  no_split.min_samples_split = 17;
  const auto leaf = fit_tree(X, y, no_split, rng);
  CHECK(leaf.nodes().size() == 1);
}

TEST_CASE("exhaustive CART equals the brute-force all-splits oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto data = random_lattice(rng, 12, 3);
    TreeParams params;
    params.min_samples_split = 2 + static_cast<int>(rng.below(3));
    params.min_samples_leaf = 1 + static_cast<int>(rng.below(2));
    Rng tree_rng(trial);
    const auto tree = fit_tree(data.X, data.y, params, tree_rng);
    const auto ref = oracle::brute_force_tree(data.X, data.y, params);
    REQUIRE(oracle::same_tree(tree, *ref));
    for (const auto& row : data.X) {
      REQUIRE(tree.predict_row(row) == oracle::brute_predict(*ref, row));
    }
  }
}

TEST_CASE("predictions stay within the training target range") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 40; ++i) {
      X.push_back({rng.uniform(0, 10), rng.uniform(0, 10)});
      y.push_back(rng.uniform(-50, 50));
    }
    Rng tree_rng(trial);
    const auto tree = fit_tree(X, y, TreeParams{}, tree_rng,
                               trial % 2 ? SplitMode::random_threshold
                                         : SplitMode::exhaustive);
    const double lo = *std::min_element(y.begin(), y.end());
    const double hi = *std::max_element(y.begin(), y.end());
    for (int i = 0; i < 50; ++i) {
      const double p = tree.predict_row({rng.uniform(-5, 15), rng.uniform(-5, 15)});
      CHECK(p >= lo);
      CHECK(p <= hi);
    }
  }
}

TEST_CASE("random-threshold trees fit training data loosely but legally") {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    X.push_back({double(i), rng.uniform(0, 1)});
    y.push_back(i < 15 ? 0.0 : 100.0);
  }
  Rng tree_rng(5);
  const auto tree = fit_tree(X, y, TreeParams{}, tree_rng, SplitMode::random_threshold);
  // Pure leaves on perfectly separable data, whatever thresholds were drawn.
  CHECK(tree.predict(X) == y);
}

TEST_CASE("fit_tree input validation") {
  Rng rng(1);
  CHECK_THROWS_AS(fit_tree({}, {}, TreeParams{}, rng), precondition_error);
  CHECK_THROWS_AS(fit_tree({{1.0}, {2.0}}, {1.0}, TreeParams{}, rng), shape_error);
  CHECK_THROWS_AS(fit_tree({{1.0}, {2.0, 3.0}}, {1.0, 2.0}, TreeParams{}, rng),
                  shape_error);
  const auto tree = fit_tree({{1.0}, {2.0}}, {1.0, 2.0}, TreeParams{}, rng);
  CHECK_THROWS_AS(tree.predict_row({1.0, 2.0}), shape_error);
}

TEST_CASE("max_features resolution") {
  CHECK(MaxFeaturesRule::all().resolve(14) == 14);
  CHECK(MaxFeaturesRule::sqrt().resolve(14) == 3);
  CHECK(MaxFeaturesRule::sqrt().resolve(1) == 1);
  CHECK(MaxFeaturesRule::frac(0.75).resolve(14) == 10);
  CHECK(MaxFeaturesRule::frac(0.01).resolve(14) == 1);
  CHECK(MaxFeaturesRule::parse("0.75").resolve(14) == 10);
  CHECK(MaxFeaturesRule::parse("sqrt").resolve(9) == 3);
  CHECK(MaxFeaturesRule::parse("all").resolve(9) == 9);
  CHECK_THROWS_AS(MaxFeaturesRule::frac(0.0), config_error);
  CHECK_THROWS_AS(MaxFeaturesRule::frac(1.5), config_error);
  CHECK_THROWS_AS(MaxFeaturesRule::parse("bogus"), config_error);
}
