#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tollcast/adaboost.hpp"
#include "tollcast/error.hpp"
#include "tollcast/features.hpp"
#include "tollcast/forest.hpp"
#include "tollcast/lstm.hpp"
#include "tollcast/mlp.hpp"
#include "tollcast/model_io.hpp"
#include "tollcast/series.hpp"
#include "tollcast/tree.hpp"

namespace tollcast {

// Uniform fit/forecast contract shared by all model families.
//
// `forecast` is asked for the days immediately following the fitted training
// window. `revealed` holds the actual values of those same days; it exists
// for one-step-ahead forecasting, which may read values strictly before the
// day being predicted. Calendar-feature models never touch it, so fitting on
// test data is impossible by construction.
class ForecastModel {
 public:
  virtual ~ForecastModel() = default;
  virtual std::string name() const = 0;
  virtual void fit(const DailySeries& train) = 0;
  virtual std::vector<double> forecast(const std::vector<Date>& dates,
                                       const std::vector<double>& revealed) = 0;
  virtual void save(std::ostream& out) const = 0;
};

namespace detail {

inline void check_fitted(bool fitted, const std::string& name) {
  if (!fitted) throw precondition_error(name + ": forecast called before fit");
}

inline void write_week_start(std::ostream& out, WeekStart ws) {
  out << "week_start " << (ws == WeekStart::monday ? "monday" : "sunday") << '\n';
}

inline WeekStart read_week_start(std::istream& in) {
  io::expect_keyword(in, "week_start");
  return parse_week_start(io::expect_token(in, "week_start value"));
}

}  // namespace detail

// Forest-backed calendar model (Random Forest or Extra-Trees).
class ForestForecaster final : public ForecastModel {
 public:
  ForestForecaster(ForestParams params, WeekStart ws = WeekStart::monday)
      : params_(std::move(params)), week_start_(ws) {}
  ForestForecaster(ForestParams params, ForestModel fitted, WeekStart ws)
      : params_(std::move(params)), week_start_(ws), model_(std::move(fitted)), fitted_(true) {}

  std::string name() const override {
    return params_.mode == ForestMode::random_forest ? "randomforest" : "extratrees";
  }

  void fit(const DailySeries& train) override {
    const FeatureMatrix m = build_matrix(train, week_start_);
    model_ = fit_forest(m.rows, m.targets, params_);
    fitted_ = true;
  }

  std::vector<double> forecast(const std::vector<Date>& dates,
                               const std::vector<double>&) override {
    detail::check_fitted(fitted_, name());
    std::vector<double> out;
    out.reserve(dates.size());
    for (const Date d : dates) out.push_back(model_.predict_row(feature_row(d, week_start_)));
    return out;
  }

  const ForestModel& model() const { return model_; }

  void save(std::ostream& out) const override {
    out << "tollcast-model v1\nkind " << name() << '\n';
    detail::write_week_start(out, week_start_);
    io::write_forest(out, model_);
    out << "end\n";
  }

 private:
  ForestParams params_;
  WeekStart week_start_;
  ForestModel model_;
  bool fitted_ = false;
};

class BoostForecaster final : public ForecastModel {
 public:
  explicit BoostForecaster(BoostParams params, WeekStart ws = WeekStart::monday)
      : params_(std::move(params)), week_start_(ws) {}
  BoostForecaster(BoostParams params, BoostModel fitted, WeekStart ws)
      : params_(std::move(params)), week_start_(ws), model_(std::move(fitted)), fitted_(true) {}

  std::string name() const override { return "adaboost"; }

  void fit(const DailySeries& train) override {
    const FeatureMatrix m = build_matrix(train, week_start_);
    model_ = fit_adaboost_r2(m.rows, m.targets, params_);
    fitted_ = true;
  }

  std::vector<double> forecast(const std::vector<Date>& dates,
                               const std::vector<double>&) override {
    detail::check_fitted(fitted_, name());
    std::vector<double> out;
    out.reserve(dates.size());
    for (const Date d : dates) out.push_back(model_.predict_row(feature_row(d, week_start_)));
    return out;
  }

  const BoostModel& model() const { return model_; }

  void save(std::ostream& out) const override {
    out << "tollcast-model v1\nkind adaboost\n";
    detail::write_week_start(out, week_start_);
    io::write_boost(out, model_);
    out << "end\n";
  }

 private:
  BoostParams params_;
  WeekStart week_start_;
  BoostModel model_;
  bool fitted_ = false;
};

// MLP with feature scaling fitted on the training matrix and the target
// mapped to [0, 1] for stable SGD; predictions are mapped back.
class MLPForecaster final : public ForecastModel {
 public:
  MLPForecaster(MLPParams params, ScaleMode scale = ScaleMode::minmax01,
                WeekStart ws = WeekStart::monday)
      : params_(std::move(params)), scale_mode_(scale), week_start_(ws) {}

  std::string name() const override { return "mlp"; }

  void fit(const DailySeries& train) override {
    const FeatureMatrix m = build_matrix(train, week_start_);
    scaler_ = fit_scaler(m, scale_mode_);
    const FeatureMatrix scaled = apply_scaler(m, scaler_);
    double lo = m.targets[0], hi = m.targets[0];
    for (double t : m.targets) {
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    target_norm_ = SeriesNorm{lo, hi};
    std::vector<double> y(m.targets.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = target_norm_.normalize(m.targets[i]);
    model_ = mlp_train(scaled.rows, y, params_);
    fitted_ = true;
  }

  std::vector<double> forecast(const std::vector<Date>& dates,
                               const std::vector<double>&) override {
    detail::check_fitted(fitted_, name());
    std::vector<double> out;
    out.reserve(dates.size());
    for (const Date d : dates) {
      const auto row = scaler_.scale_row(feature_row(d, week_start_));
      out.push_back(target_norm_.denormalize(model_.forward(row)));
    }
    return out;
  }

  const MLPModel& model() const { return model_; }

  void save(std::ostream& out) const override {
    out << "tollcast-model v1\nkind mlp\n";
    detail::write_week_start(out, week_start_);
    out << "scaler " << (scaler_.mode == ScaleMode::minmax01 ? "minmax01" : "standardize")
        << '\n';
    io::write_vector(out, scaler_.a);
    io::write_vector(out, scaler_.b);
    out << "target_norm " << io::hex_double(target_norm_.lo) << ' '
        << io::hex_double(target_norm_.hi) << '\n';
    io::write_mlp(out, model_);
    out << "end\n";
  }

  void restore(ScalerParams scaler, SeriesNorm norm, MLPModel model) {
    scaler_ = std::move(scaler);
    target_norm_ = norm;
    model_ = std::move(model);
    fitted_ = true;
  }

 private:
  MLPParams params_;
  ScaleMode scale_mode_;
  WeekStart week_start_;
  ScalerParams scaler_;
  SeriesNorm target_norm_;
  MLPModel model_;
  bool fitted_ = false;
};

// LSTM over the raw (normalized) series. Keeps the last lookback values of
// the training window so forecasting can continue where training ended.
class LSTMForecaster final : public ForecastModel {
 public:
  LSTMForecaster(std::vector<int> hidden_sizes, WindowSpec spec,
                 LSTMTrainParams train_params, ForecastMode mode)
      : hidden_sizes_(std::move(hidden_sizes)),
        spec_(spec),
        train_params_(train_params),
        mode_(mode) {}

  std::string name() const override { return "lstm"; }

  void fit(const DailySeries& train) override {
    const WindowSet windows = make_windows(train, spec_);
    network_ = train_lstm(windows, LSTMNetwork::init(hidden_sizes_, spec_, train_params_.seed),
                          train_params_);
    const auto values = train.dense_values();
    tail_.assign(values.end() - spec_.lookback, values.end());
    tail_start_ = train.end_date() - (spec_.lookback - 1);
    template_ = train;
    template_.values.clear();
    fitted_ = true;
  }

  std::vector<double> forecast(const std::vector<Date>& dates,
                               const std::vector<double>& revealed) override {
    detail::check_fitted(fitted_, name());
    if (dates.empty()) return {};
    const Date expected = tail_start_ + static_cast<std::int64_t>(tail_.size());
    if (dates.front() != expected) {
      throw precondition_error("lstm: fitted through " + (expected - 1).to_string() +
                               ", cannot start forecasting at " + dates.front().to_string());
    }
    DailySeries history = template_;
    history.start_date = tail_start_;
    history.values.assign(tail_.begin(), tail_.end());
    if (mode_ == ForecastMode::one_step) {
      if (revealed.size() < dates.size()) {
        throw precondition_error("lstm one-step forecasting needs the observed values");
      }
      for (std::size_t i = 0; i < dates.size(); ++i) history.values.emplace_back(revealed[i]);
      return lstm_forecast(network_, history, static_cast<int>(dates.size()),
                           ForecastMode::one_step)
          .values;
    }
    return lstm_forecast(network_, history, static_cast<int>(dates.size()),
                         ForecastMode::multi_step)
        .values;
  }

  const LSTMNetwork& network() const { return network_; }
  ForecastMode mode() const { return mode_; }

  void save(std::ostream& out) const override {
    out << "tollcast-model v1\nkind lstm\n";
    out << "mode " << (mode_ == ForecastMode::one_step ? "one_step" : "multi_step") << '\n';
    out << "tail " << tail_start_.to_string() << ' ';
    io::write_vector(out, tail_);
    out << "station " << template_.station_code << ' ' << to_string(template_.vehicle_class)
        << '\n';
    io::write_lstm(out, network_);
    out << "end\n";
  }

  void restore(LSTMNetwork net, Date tail_start, std::vector<double> tail,
               DailySeries series_template) {
    network_ = std::move(net);
    spec_ = network_.spec();
    tail_start_ = tail_start;
    tail_ = std::move(tail);
    template_ = std::move(series_template);
    fitted_ = true;
  }

 private:
  std::vector<int> hidden_sizes_;
  WindowSpec spec_;
  LSTMTrainParams train_params_;
  ForecastMode mode_;
  LSTMNetwork network_;
  std::vector<double> tail_;
  Date tail_start_;
  DailySeries template_;
  bool fitted_ = false;
};

// Repeats the most recent full cycle of the training window: the forecast
// for a day is the last observed value at the same weekly position.
inline std::vector<double> naive_seasonal(const DailySeries& train, int horizon,
                                          int period = 7) {
  if (horizon < 1) throw config_error("horizon must be >= 1");
  if (period < 1) throw config_error("period must be >= 1");
  const auto v = train.dense_values();
  if (v.size() < static_cast<std::size_t>(period)) {
    throw precondition_error("naive_seasonal needs at least one full period of history");
  }
  std::vector<double> out(static_cast<std::size_t>(horizon));
  for (int j = 0; j < horizon; ++j) {
    out[static_cast<std::size_t>(j)] =
        v[v.size() - static_cast<std::size_t>(period) +
          static_cast<std::size_t>(j % period)];
  }
  return out;
}

class NaiveSeasonalForecaster final : public ForecastModel {
 public:
  explicit NaiveSeasonalForecaster(int period = 7) : period_(period) {}

  std::string name() const override { return "naive"; }

  void fit(const DailySeries& train) override {
    const auto v = train.dense_values();
    if (v.size() < static_cast<std::size_t>(period_)) {
      throw precondition_error("naive: training window shorter than one period");
    }
    cycle_.assign(v.end() - period_, v.end());
    fitted_ = true;
  }

  std::vector<double> forecast(const std::vector<Date>& dates,
                               const std::vector<double>&) override {
    detail::check_fitted(fitted_, name());
    std::vector<double> out;
    out.reserve(dates.size());
    for (std::size_t j = 0; j < dates.size(); ++j) {
      out.push_back(cycle_[j % cycle_.size()]);
    }
    return out;
  }

  void save(std::ostream& out) const override {
    out << "tollcast-model v1\nkind naive\nperiod " << period_ << '\n';
    io::write_vector(out, cycle_);
    out << "end\n";
  }

  void restore(std::vector<double> cycle) {
    cycle_ = std::move(cycle);
    fitted_ = true;
  }

 private:
  int period_;
  std::vector<double> cycle_;
  bool fitted_ = false;
};

// All the knobs the pipeline needs to build any model. Field defaults follow
// the reference configurations each family is normally run with.
struct ModelConfigs {
  ForestParams rf = ForestParams::random_forest_defaults();
  ForestParams et = ForestParams::extra_trees_defaults();
  BoostParams ada;
  MLPParams mlp;
  ScaleMode mlp_scale = ScaleMode::minmax01;
  std::vector<int> lstm_hidden{16};
  WindowSpec lstm_window{100, 10};
  LSTMTrainParams lstm_train;
  ForecastMode lstm_mode = ForecastMode::one_step;
  WeekStart week_start = WeekStart::monday;
  int naive_period = 7;
};

// Fan one master seed out to every component deterministically.
inline void apply_master_seed(ModelConfigs& cfg, std::uint64_t seed) {
  cfg.rf.tree.seed = Rng::derive(seed, 1);
  cfg.et.tree.seed = Rng::derive(seed, 2);
  cfg.ada.seed = Rng::derive(seed, 3);
  cfg.ada.base.seed = cfg.ada.seed;
  cfg.mlp.seed = Rng::derive(seed, 4);
  cfg.lstm_train.seed = Rng::derive(seed, 5);
}

enum class ModelKind { randomforest, extratrees, adaboost, mlp, lstm, naive };

inline ModelKind parse_model_kind(std::string_view token) {
  if (token == "rf" || token == "randomforest") return ModelKind::randomforest;
  if (token == "et" || token == "extratrees") return ModelKind::extratrees;
  if (token == "adaboost" || token == "ada") return ModelKind::adaboost;
  if (token == "mlp") return ModelKind::mlp;
  if (token == "lstm") return ModelKind::lstm;
  if (token == "naive") return ModelKind::naive;
  throw config_error("unknown model '" + std::string(token) + "'");
}

inline std::unique_ptr<ForecastModel> make_forecaster(ModelKind kind,
                                                      const ModelConfigs& cfg) {
  switch (kind) {
    case ModelKind::randomforest: {
      ForestParams p = cfg.rf;
      p.mode = ForestMode::random_forest;
      return std::make_unique<ForestForecaster>(p, cfg.week_start);
    }
    case ModelKind::extratrees: {
      ForestParams p = cfg.et;
      p.mode = ForestMode::extra_trees;
      return std::make_unique<ForestForecaster>(p, cfg.week_start);
    }
    case ModelKind::adaboost:
      return std::make_unique<BoostForecaster>(cfg.ada, cfg.week_start);
    case ModelKind::mlp:
      return std::make_unique<MLPForecaster>(cfg.mlp, cfg.mlp_scale, cfg.week_start);
    case ModelKind::lstm:
      return std::make_unique<LSTMForecaster>(cfg.lstm_hidden, cfg.lstm_window,
                                              cfg.lstm_train, cfg.lstm_mode);
    case ModelKind::naive:
      return std::make_unique<NaiveSeasonalForecaster>(cfg.naive_period);
  }
  throw config_error("unreachable model kind");
}

// Reload any serialized forecaster. The returned model is ready to forecast.
inline std::unique_ptr<ForecastModel> load_forecaster(std::istream& in) {
  io::expect_keyword(in, "tollcast-model");
  const std::string version = io::expect_token(in, "format version");
  if (version != "v1") throw parse_error("unsupported model format '" + version + "'");
  io::expect_keyword(in, "kind");
  const std::string kind = io::expect_token(in, "model kind");
  if (kind == "randomforest" || kind == "extratrees") {
    const WeekStart ws = detail::read_week_start(in);
    ForestModel m = io::read_forest(in);
    io::expect_keyword(in, "end");
    ForestParams p = m.params();
    return std::make_unique<ForestForecaster>(p, std::move(m), ws);
  }
  if (kind == "adaboost") {
    const WeekStart ws = detail::read_week_start(in);
    BoostModel m = io::read_boost(in);
    io::expect_keyword(in, "end");
    BoostParams p = m.params();
    return std::make_unique<BoostForecaster>(p, std::move(m), ws);
  }
  if (kind == "mlp") {
    const WeekStart ws = detail::read_week_start(in);
    io::expect_keyword(in, "scaler");
    ScalerParams scaler;
    scaler.mode = parse_scale_mode(io::expect_token(in, "scaler mode"));
    scaler.a = io::read_vector(in, "scaler a");
    scaler.b = io::read_vector(in, "scaler b");
    io::expect_keyword(in, "target_norm");
    SeriesNorm norm;
    norm.lo = io::read_double(in, "target norm lo");
    norm.hi = io::read_double(in, "target norm hi");
    MLPModel m = io::read_mlp(in);
    io::expect_keyword(in, "end");
    auto fc = std::make_unique<MLPForecaster>(MLPParams{}, scaler.mode, ws);
    fc->restore(std::move(scaler), norm, std::move(m));
    return fc;
  }
  if (kind == "lstm") {
    io::expect_keyword(in, "mode");
    const ForecastMode mode = parse_forecast_mode(io::expect_token(in, "forecast mode"));
    io::expect_keyword(in, "tail");
    const Date tail_start = Date::parse(io::expect_token(in, "tail start date"));
    auto tail = io::read_vector(in, "tail values");
    io::expect_keyword(in, "station");
    DailySeries tmpl;
    tmpl.station_code = static_cast<int>(io::read_int(in, "station code"));
    tmpl.vehicle_class = parse_vehicle_class(io::expect_token(in, "vehicle class"));
    LSTMNetwork net = io::read_lstm(in);
    io::expect_keyword(in, "end");
    auto fc = std::make_unique<LSTMForecaster>(std::vector<int>{}, net.spec(),
                                               LSTMTrainParams{}, mode);
    fc->restore(std::move(net), tail_start, std::move(tail), std::move(tmpl));
    return fc;
  }
  if (kind == "naive") {
    io::expect_keyword(in, "period");
    const int period = static_cast<int>(io::read_int(in, "period"));
    auto cycle = io::read_vector(in, "cycle values");
    io::expect_keyword(in, "end");
    auto fc = std::make_unique<NaiveSeasonalForecaster>(period);
    fc->restore(std::move(cycle));
    return fc;
  }
  throw parse_error("unknown model kind '" + kind + "' in model file");
}

}  // namespace tollcast
