#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "tollcast/forest.hpp"
#include "tollcast/model_io.hpp"
#include "tollcast/rng.hpp"
#include "tollcast/synthgen.hpp"

using namespace tollcast;

namespace {

struct Data {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
};

Data noisy_data(std::uint64_t seed, int n = 60) {
  Rng rng(seed);
  Data d;
  for (int i = 0; i < n; ++i) {
    const double a = rng.uniform(0, 10), b = rng.uniform(0, 10);
    d.X.push_back({a, b});
    d.y.push_back(3 * a - b + rng.normal());
  }
  return d;
}

std::string serialized(const ForestModel& m) {
  std::ostringstream out;
  io::write_forest(out, m);
  return out.str();
}

}  // namespace

TEST_CASE("a one-tree forest without bootstrap is exactly a single CART") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto d = noisy_data(seed);
    ForestParams p;
    p.n_estimators = 1;
    p.bootstrap = false;
    p.mode = ForestMode::random_forest;
    p.tree.max_features = MaxFeaturesRule::all();
    p.tree.seed = seed * 17;
    const auto forest = fit_forest(d.X, d.y, p);
    Rng rng(0);  // never consulted: all features, no bootstrap
    const auto tree = fit_tree(d.X, d.y, p.tree, rng);
    for (const auto& row : d.X) {
      REQUIRE(forest.predict_row(row) == tree.predict_row(row));
    }
  }
}

TEST_CASE("constant targets give constant forest predictions") {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    X.push_back({rng.uniform(0, 1), rng.uniform(0, 1)});
    y.push_back(42.0);
  }
  for (const ForestMode mode : {ForestMode::random_forest, ForestMode::extra_trees}) {
    ForestParams p;
    p.n_estimators = 7;
    p.mode = mode;
    p.bootstrap = mode == ForestMode::random_forest;
    const auto forest = fit_forest(X, y, p);
    CHECK(forest.predict_row({0.5, 0.5}) == 42.0);
  }
}

TEST_CASE("equal seeds reproduce the model bitwise, different seeds differ") {
  const auto d = noisy_data(9);
  for (const ForestMode mode : {ForestMode::random_forest, ForestMode::extra_trees}) {
    ForestParams p;
    p.n_estimators = 5;
    p.mode = mode;
    p.bootstrap = mode == ForestMode::random_forest;
    p.tree.max_features = MaxFeaturesRule::sqrt();
    p.tree.seed = 1234;
    const auto a = fit_forest(d.X, d.y, p);
    const auto b = fit_forest(d.X, d.y, p);
    CHECK(serialized(a) == serialized(b));
    p.tree.seed = 4321;
    const auto c = fit_forest(d.X, d.y, p);
    CHECK(serialized(a) != serialized(c));
  }
}

TEST_CASE("forest prediction is permutation-invariant in tree order") {
  const auto d = noisy_data(11);
  ForestParams p;
  p.n_estimators = 9;
  p.tree.max_features = MaxFeaturesRule::sqrt();
  const auto forest = fit_forest(d.X, d.y, p);
  auto trees = forest.trees();
  std::reverse(trees.begin(), trees.end());
  const ForestModel reversed(p, std::move(trees));
  for (const auto& row : d.X) {
    CHECK(reversed.predict_row(row) ==
          Catch::Approx(forest.predict_row(row)).epsilon(1e-12));
  }
}

TEST_CASE("forest predictions stay within the training target range") {
  const auto d = noisy_data(13);
  const double lo = *std::min_element(d.y.begin(), d.y.end());
  const double hi = *std::max_element(d.y.begin(), d.y.end());
  for (const ForestMode mode : {ForestMode::random_forest, ForestMode::extra_trees}) {
    ForestParams p;
    p.n_estimators = 11;
    p.mode = mode;
    p.bootstrap = mode == ForestMode::random_forest;
    const auto forest = fit_forest(d.X, d.y, p);
    Rng rng(17);
    for (int i = 0; i < 40; ++i) {
      const double v = forest.predict_row({rng.uniform(-2, 12), rng.uniform(-2, 12)});
      CHECK(v >= lo);
      CHECK(v <= hi);
    }
  }
}

TEST_CASE("forest size convergence on synthetic traffic") {
  // Doubling the forest beyond a few hundred trees barely moves predictions:
  // mean absolute difference between 500- and 1000-tree forests stays under
  // 1% of the mean traffic level.
  SynthConfig cfg;
  cfg.n_days = 365;
  cfg.base_level = 1000;
  cfg.weekly_amplitudes = {0.9, 1.0, 1.1, 1.0, 0.95, 1.2, 1.25};
  cfg.annual_amplitude = 0.2;
  cfg.noise_sigma = 0.05;
  cfg.seed = 6;
  const auto synth = generate(cfg);
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  for (std::size_t i = 0; i < synth.noisy.size(); ++i) {
    const Date d = synth.noisy.date_at(i);
    X.push_back({double(d.day_of_week()), double(d.day_of_year()), double(d.month())});
    y.push_back(*synth.noisy.values[i]);
  }
  ForestParams p;
  p.tree.max_features = MaxFeaturesRule::sqrt();
  p.tree.seed = 99;
  p.n_estimators = 500;
  const auto f500 = fit_forest(X, y, p);
  p.n_estimators = 1000;
  const auto f1000 = fit_forest(X, y, p);
  double mad = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    mad += std::abs(f500.predict_row(X[i]) - f1000.predict_row(X[i]));
    mean += y[i];
  }
  mad /= double(X.size());
  mean /= double(X.size());
  CHECK(mad < 0.01 * mean);
}

TEST_CASE("fit_forest validation") {
  ForestParams p;
  p.n_estimators = 0;
  CHECK_THROWS_AS(fit_forest({{1.0}}, {1.0}, p), config_error);
}
