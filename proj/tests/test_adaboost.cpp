#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "tollcast/adaboost.hpp"
#include "tollcast/rng.hpp"
#include "tollcast/smape.hpp"

using namespace tollcast;

namespace {

struct Data {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
};

Data noisy_line(std::uint64_t seed, int n = 20) {
  Rng rng(seed);
  Data d;
  for (int i = 0; i < n; ++i) {
    const double x = double(i);
    d.X.push_back({x});
    d.y.push_back(5.0 + 2.0 * x + rng.normal());
  }
  return d;
}

}  // namespace

TEST_CASE("one round of boosting is exactly its base tree") {
  for (std::uint64_t seed : {3ULL, 5ULL, 8ULL}) {
    const auto d = noisy_line(seed);
    BoostParams p;
    p.n_estimators = 1;
    p.seed = seed;
    const auto model = fit_adaboost_r2(d.X, d.y, p);
    REQUIRE(model.trees().size() == 1);
    for (const auto& row : d.X) {
      REQUIRE(model.predict_row(row) == model.trees()[0].predict_row(row));
    }
  }
}

TEST_CASE("perfectly fittable data stops after one perfect round") {
  // Distinct single-feature rows with min_samples_leaf 1 and no depth cap:
  // the first tree reproduces y exactly, so boosting stops.
  std::vector<std::vector<double>> X = {{0}, {1}, {2}, {3}, {4}, {5}};
  std::vector<double> y = {3, 1, 4, 1, 5, 9};
  BoostParams p;
  p.n_estimators = 50;
  p.base.max_depth = -1;
  const auto model = fit_adaboost_r2(X, y, p);
  CHECK(model.trees().size() == 1);
  CHECK(model.predict(X) == y);
}

TEST_CASE("all-equal targets end in a single perfect round") {
  std::vector<std::vector<double>> X = {{0}, {1}, {2}, {3}};
  std::vector<double> y = {6, 6, 6, 6};
  BoostParams p;
  p.n_estimators = 25;
  const auto model = fit_adaboost_r2(X, y, p);
  CHECK(model.trees().size() == 1);
  CHECK(model.predict_row({2.5}) == 6.0);
}

TEST_CASE("boosting shallow stumps beats a single stump on noisy linear data") {
  const auto d = noisy_line(42);
  BoostParams boosted;
  boosted.n_estimators = 10;
  boosted.base.max_depth = 2;
  boosted.seed = 7;
  boosted.record_weight_trace = true;
  const auto model = fit_adaboost_r2(d.X, d.y, boosted);
  REQUIRE(model.trees().size() >= 2);

  BoostParams single = boosted;
  single.n_estimators = 1;
  const auto stump = fit_adaboost_r2(d.X, d.y, single);

  const double boosted_smape = smape(d.y, model.predict(d.X));
  const double stump_smape = smape(d.y, stump.predict(d.X));
  CHECK(boosted_smape < stump_smape);
}

TEST_CASE("the weight recurrence matches a transparent replay to 1e-12") {
  const auto d = noisy_line(2025);
  BoostParams p;
  p.n_estimators = 10;
  p.base.max_depth = 2;
  p.seed = 13;
  p.record_weight_trace = true;
  const auto model = fit_adaboost_r2(d.X, d.y, p);
  const auto replay = oracle::replay_adaboost_r2(model, d.X, d.y);

  REQUIRE(model.weight_trace().size() == replay.weights.size());
  for (std::size_t r = 0; r < replay.weights.size(); ++r) {
    for (std::size_t i = 0; i < d.y.size(); ++i) {
      REQUIRE(model.weight_trace()[r][i] ==
              Catch::Approx(replay.weights[r][i]).margin(1e-12));
    }
  }
  REQUIRE(model.estimator_weights().size() == replay.estimator_weights.size());
  for (std::size_t r = 0; r < replay.estimator_weights.size(); ++r) {
    REQUIRE(model.estimator_weights()[r] ==
            Catch::Approx(replay.estimator_weights[r]).margin(1e-12));
  }
}

TEST_CASE("row weights stay a probability distribution after every round") {
  const auto d = noisy_line(99, 30);
  BoostParams p;
  p.n_estimators = 12;
  p.base.max_depth = 1;
  p.record_weight_trace = true;
  const auto model = fit_adaboost_r2(d.X, d.y, p);
  for (const auto& w : model.weight_trace()) {
    double sum = 0.0;
    for (double wi : w) {
      CHECK(wi >= 0.0);
      sum += wi;
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("weighted median picks the prediction at half the total weight") {
  // Three constant trees predicting 1, 2, 100.
  auto constant_tree = [](double v) {
    Rng rng(0);
    return fit_tree({{0.0}, {1.0}}, {v, v}, TreeParams{}, rng);
  };
  std::vector<RegressionTree> trees = {constant_tree(100.0), constant_tree(1.0),
                                       constant_tree(2.0)};
  BoostModel even(BoostParams{}, trees, {1.0, 1.0, 1.0}, {});
  CHECK(even.predict_row({0.0}) == 2.0);
  BoostModel skewed(BoostParams{}, trees, {0.1, 5.0, 0.1}, {});
  CHECK(skewed.predict_row({0.0}) == 1.0);
}

TEST_CASE("boost predictions stay within the training target range") {
  const auto d = noisy_line(7, 40);
  BoostParams p;
  p.n_estimators = 15;
  p.base.max_depth = 3;
  const auto model = fit_adaboost_r2(d.X, d.y, p);
  const double lo = *std::min_element(d.y.begin(), d.y.end());
  const double hi = *std::max_element(d.y.begin(), d.y.end());
  for (double x = -10; x < 50; x += 1.7) {
    const double v = model.predict_row({x});
    CHECK(v >= lo);
    CHECK(v <= hi);
  }
}

TEST_CASE("fit_adaboost_r2 validation") {
  CHECK_THROWS_AS(fit_adaboost_r2({{1.0}}, {1.0}, BoostParams{}), precondition_error);
  BoostParams bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(fit_adaboost_r2({{1.0}, {2.0}}, {1.0, 2.0}, bad), config_error);
}
