#pragma once

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tollcast/csv.hpp"
#include "tollcast/evaluate.hpp"
#include "tollcast/features.hpp"
#include "tollcast/filters.hpp"
#include "tollcast/forecast_model.hpp"
#include "tollcast/series.hpp"
#include "tollcast/svg.hpp"
#include "tollcast/synthgen.hpp"

namespace tollcast {
namespace cli {

namespace detail {

inline std::vector<std::string> split(const std::string& text, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == delim) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& tok : split(text, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw config_error(std::string("bad ") + what + " entry '" + tok + "'");
    }
  }
  if (out.empty()) throw config_error(std::string(what) + " list is empty");
  return out;
}

// "DATE,DURATION,MULT;DATE,DURATION,MULT;..."
inline std::vector<SynthEvent> parse_events(const std::string& text) {
  std::vector<SynthEvent> out;
  for (const auto& item : split(text, ';')) {
    const auto parts = split(item, ',');
    if (parts.size() != 3) {
      throw config_error("bad event '" + item + "' (want DATE,DURATION,MULTIPLIER)");
    }
    SynthEvent e;
    e.date = Date::parse(parts[0]);
    e.duration_days = std::stoi(parts[1]);
    e.multiplier = std::stod(parts[2]);
    out.push_back(e);
  }
  return out;
}

// "DATE,LENGTH;DATE,LENGTH;..."
inline std::vector<MissingSpan> parse_missing(const std::string& text) {
  std::vector<MissingSpan> out;
  for (const auto& item : split(text, ';')) {
    const auto parts = split(item, ',');
    if (parts.size() != 2) {
      throw config_error("bad missing span '" + item + "' (want DATE,LENGTH)");
    }
    out.push_back({Date::parse(parts[0]), std::stoi(parts[1])});
  }
  return out;
}

inline std::string clean_twin_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) {
    return path + "_clean";
  }
  return path.substr(0, dot) + "_clean" + path.substr(dot);
}

inline DailySeries load_series(const std::string& path, int station,
                               const std::string& cls) {
  const auto records = parse_csv_file(path);
  int chosen = station;
  if (station < 0) {
    std::set<int> stations;
    for (const auto& r : records) stations.insert(r.station_code);
    if (stations.size() != 1) {
      throw config_error(path + " holds " + std::to_string(stations.size()) +
                         " stations; pick one with --station");
    }
    chosen = *stations.begin();
  }
  return to_series(records, chosen, parse_vehicle_class(cls));
}

// Shared flag bundles -------------------------------------------------------

struct FilterOptions {
  std::string filter = "none";
  int window = 5;
  double alpha = 0.3;
  int period = 7;

  void attach(CLI::App* app) {
    app->add_option("--filter", filter,
                    "Outlier filter applied before modeling: none, median, "
                    "moving_average, exponential, deseasonalize")
        ->capture_default_str();
    app->add_option("--window", window, "Window (odd) for median/moving_average")
        ->capture_default_str();
    app->add_option("--alpha", alpha, "Smoothing factor for the exponential filter")
        ->capture_default_str();
    app->add_option("--period", period, "Season length for deseasonalization")
        ->capture_default_str();
  }

  std::optional<FilterConfig> build() const {
    if (filter == "none") return std::nullopt;
    FilterConfig cfg;
    cfg.kind = parse_filter_kind(filter);
    cfg.window = window;
    cfg.alpha = alpha;
    cfg.period = period;
    return cfg;
  }
};

struct ModelOptions {
  // Random Forest
  int rf_trees = 5000;
  int rf_min_split = 2;
  int rf_min_leaf = 1;
  std::string rf_max_features = "sqrt";
  int rf_max_depth = -1;
  bool rf_no_bootstrap = false;
  // Extra-Trees
  int et_trees = 100;
  int et_min_split = 10;
  int et_min_leaf = 13;
  std::string et_max_features = "0.75";
  int et_max_depth = -1;
  bool et_bootstrap = false;
  // AdaBoost.R2
  int ada_rounds = 10000;
  double ada_lr = 1.0;
  std::string ada_loss = "linear";
  int ada_depth = 3;
  int ada_min_split = 2;
  int ada_min_leaf = 1;
  // MLP
  std::string mlp_hidden = "200,100,100,200,100,200";
  double mlp_alpha = 0.01;
  int mlp_max_iter = 80000;
  int mlp_batch = 40;
  double mlp_lr = 1e-3;
  std::string mlp_activation = "relu";
  double mlp_tol = 1e-6;
  std::string mlp_scale = "minmax01";
  // LSTM
  std::string lstm_hidden = "16";
  int lstm_lookback = 100;
  int lstm_lookforward = 10;
  int lstm_epochs = 1000;
  double lstm_lr = 0.05;
  int lstm_batch = 32;
  double lstm_tol = 1e-6;
  std::string lstm_mode = "one_step";
  // Common
  int naive_period = 7;
  std::string week_start = "monday";
  std::uint64_t seed = 0;

  void attach(CLI::App* app) {
    app->add_option("--rf-trees", rf_trees, "Random Forest trees")->capture_default_str();
    app->add_option("--rf-min-split", rf_min_split)->capture_default_str();
    app->add_option("--rf-min-leaf", rf_min_leaf)->capture_default_str();
    app->add_option("--rf-max-features", rf_max_features, "all, sqrt or a fraction")
        ->capture_default_str();
    app->add_option("--rf-max-depth", rf_max_depth, "-1 = unlimited")->capture_default_str();
    app->add_flag("--rf-no-bootstrap", rf_no_bootstrap, "Fit each tree on the full sample");
    app->add_option("--et-trees", et_trees, "Extra-Trees estimators")->capture_default_str();
    app->add_option("--et-min-split", et_min_split)->capture_default_str();
    app->add_option("--et-min-leaf", et_min_leaf)->capture_default_str();
    app->add_option("--et-max-features", et_max_features)->capture_default_str();
    app->add_option("--et-max-depth", et_max_depth)->capture_default_str();
    app->add_flag("--et-bootstrap", et_bootstrap, "Bootstrap Extra-Trees samples");
    app->add_option("--ada-rounds", ada_rounds, "AdaBoost.R2 boosting rounds (cap)")
        ->capture_default_str();
    app->add_option("--ada-lr", ada_lr, "AdaBoost learning rate")->capture_default_str();
    app->add_option("--ada-loss", ada_loss, "linear, square or exponential")
        ->capture_default_str();
    app->add_option("--ada-depth", ada_depth, "Base tree depth")->capture_default_str();
    app->add_option("--ada-min-split", ada_min_split)->capture_default_str();
    app->add_option("--ada-min-leaf", ada_min_leaf)->capture_default_str();
    app->add_option("--mlp-hidden", mlp_hidden, "Hidden layer sizes, comma-separated")
        ->capture_default_str();
    app->add_option("--mlp-alpha", mlp_alpha, "L2 penalty")->capture_default_str();
    app->add_option("--mlp-max-iter", mlp_max_iter, "Epoch cap")->capture_default_str();
    app->add_option("--mlp-batch", mlp_batch)->capture_default_str();
    app->add_option("--mlp-lr", mlp_lr, "SGD learning rate")->capture_default_str();
    app->add_option("--mlp-activation", mlp_activation, "relu, tanh or logistic")
        ->capture_default_str();
    app->add_option("--mlp-tol", mlp_tol, "Early-stop improvement tolerance")
        ->capture_default_str();
    app->add_option("--mlp-scale", mlp_scale, "minmax01 or standardize")
        ->capture_default_str();
    app->add_option("--lstm-hidden", lstm_hidden, "LSTM hidden sizes, comma-separated")
        ->capture_default_str();
    app->add_option("--lstm-lookback", lstm_lookback)->capture_default_str();
    app->add_option("--lstm-lookforward", lstm_lookforward)->capture_default_str();
    app->add_option("--lstm-epochs", lstm_epochs)->capture_default_str();
    app->add_option("--lstm-lr", lstm_lr)->capture_default_str();
    app->add_option("--lstm-batch", lstm_batch)->capture_default_str();
    app->add_option("--lstm-tol", lstm_tol)->capture_default_str();
    app->add_option("--lstm-mode", lstm_mode, "one_step or multi_step")
        ->capture_default_str();
    app->add_option("--naive-period", naive_period, "Season length of the naive baseline")
        ->capture_default_str();
    app->add_option("--week-start", week_start, "monday or sunday")->capture_default_str();
    app->add_option("--seed", seed, "Master seed fanned out to every component")
        ->capture_default_str();
  }

  ModelConfigs build() const {
    ModelConfigs cfg;
    cfg.rf.n_estimators = rf_trees;
    cfg.rf.tree.min_samples_split = rf_min_split;
    cfg.rf.tree.min_samples_leaf = rf_min_leaf;
    cfg.rf.tree.max_features = MaxFeaturesRule::parse(rf_max_features);
    cfg.rf.tree.max_depth = rf_max_depth;
    cfg.rf.bootstrap = !rf_no_bootstrap;
    cfg.et.n_estimators = et_trees;
    cfg.et.tree.min_samples_split = et_min_split;
    cfg.et.tree.min_samples_leaf = et_min_leaf;
    cfg.et.tree.max_features = MaxFeaturesRule::parse(et_max_features);
    cfg.et.tree.max_depth = et_max_depth;
    cfg.et.bootstrap = et_bootstrap;
    cfg.ada.n_estimators = ada_rounds;
    cfg.ada.learning_rate = ada_lr;
    cfg.ada.loss = parse_boost_loss(ada_loss);
    cfg.ada.base.max_depth = ada_depth;
    cfg.ada.base.min_samples_split = ada_min_split;
    cfg.ada.base.min_samples_leaf = ada_min_leaf;
    cfg.mlp.hidden_layer_sizes = parse_int_list(mlp_hidden, "mlp-hidden");
    cfg.mlp.alpha = mlp_alpha;
    cfg.mlp.max_iter = mlp_max_iter;
    cfg.mlp.batch_size = mlp_batch;
    cfg.mlp.learning_rate = mlp_lr;
    cfg.mlp.activation = parse_activation(mlp_activation);
    cfg.mlp.tol = mlp_tol;
    cfg.mlp_scale = parse_scale_mode(mlp_scale);
    cfg.lstm_hidden = parse_int_list(lstm_hidden, "lstm-hidden");
    cfg.lstm_window = WindowSpec{lstm_lookback, lstm_lookforward};
    cfg.lstm_train.epochs = lstm_epochs;
    cfg.lstm_train.learning_rate = lstm_lr;
    cfg.lstm_train.batch_size = lstm_batch;
    cfg.lstm_train.tol = lstm_tol;
    cfg.lstm_mode = parse_forecast_mode(lstm_mode);
    cfg.naive_period = naive_period;
    cfg.week_start = parse_week_start(week_start);
    apply_master_seed(cfg, seed);
    return cfg;
  }
};

inline void write_text_file(const std::string& path, const std::string& content) {
  write_file(path, content);
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args) {
  CLI::App app{"tollcast: daily toll-traffic forecasting pipeline"};
  app.require_subcommand(1);

  // --- synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark dataset");
  synth->set_config("--config", "", "Key = value config file");
  struct {
    std::string out = "traffic.csv";
    std::string start = "2013-01-01";
    int days = 1461;
    double base_level = 10000.0;
    std::string weekly = "1,1,1,1,1,1,1";
    double annual_amplitude = 0.0;
    int peak_doy = 196;
    double trend = 0.0;
    std::string events;
    double outlier_rate = 0.0;
    std::string missing;
    double noise_sigma = 0.0;
    std::uint64_t seed = 1;
    int station = 1;
    double tc2_fraction = 0.3;
    double tc3_fraction = 0.12;
  } sy;
  synth->add_option("--out", sy.out, "Output CSV (a *_clean twin is written next to it)")
      ->capture_default_str();
  synth->add_option("--start", sy.start, "First day, YYYY-MM-DD")->capture_default_str();
  synth->add_option("--days", sy.days, "Number of days")->capture_default_str();
  synth->add_option("--base-level", sy.base_level)->capture_default_str();
  synth->add_option("--weekly", sy.weekly, "7 weekday multipliers, Monday first")
      ->capture_default_str();
  synth->add_option("--annual-amplitude", sy.annual_amplitude)->capture_default_str();
  synth->add_option("--peak-doy", sy.peak_doy, "Day of year of the annual peak")
      ->capture_default_str();
  synth->add_option("--trend", sy.trend, "Linear growth per year")->capture_default_str();
  synth->add_option("--events", sy.events,
                    "DATE,DURATION,MULT;... dated surges and collapses");
  synth->add_option("--outlier-rate", sy.outlier_rate)->capture_default_str();
  synth->add_option("--missing", sy.missing, "DATE,LENGTH;... spans with no rows");
  synth->add_option("--noise-sigma", sy.noise_sigma, "Relative Gaussian noise")
      ->capture_default_str();
  synth->add_option("--seed", sy.seed)->capture_default_str();
  synth->add_option("--station", sy.station)->capture_default_str();
  synth->add_option("--tc2-fraction", sy.tc2_fraction)->capture_default_str();
  synth->add_option("--tc3-fraction", sy.tc3_fraction)->capture_default_str();

  // --- clean ----------------------------------------------------------------
  auto* clean = app.add_subcommand("clean", "Impute and filter one series, write DATE,VALUE");
  clean->set_config("--config");
  struct {
    std::string in, out = "clean.csv";
    int station = -1;
    std::string cls = "TC1";
  } cl;
  detail::FilterOptions clean_filter;
  clean_filter.filter = "median";
  clean->add_option("--in", cl.in, "Input traffic CSV")->required();
  clean->add_option("--out", cl.out)->capture_default_str();
  clean->add_option("--station", cl.station, "Station code (optional if the file has one)");
  clean->add_option("--class", cl.cls, "TC1, TC2 or TC3")->capture_default_str();
  clean_filter.attach(clean);

  // --- featurize -------------------------------------------------------------
  auto* feat = app.add_subcommand("featurize", "Write the calendar learning matrix as CSV");
  feat->set_config("--config");
  struct {
    std::string in, out = "matrix.csv";
    int station = -1;
    std::string cls = "TC1";
    std::string week_start = "monday";
  } fz;
  detail::FilterOptions feat_filter;
  feat->add_option("--in", fz.in)->required();
  feat->add_option("--out", fz.out)->capture_default_str();
  feat->add_option("--station", fz.station);
  feat->add_option("--class", fz.cls)->capture_default_str();
  feat->add_option("--week-start", fz.week_start)->capture_default_str();
  feat_filter.attach(feat);

  // --- train -----------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Fit a model and serialize it");
  train->set_config("--config");
  struct {
    std::string in, out = "model.txt";
    int station = -1;
    std::string cls = "TC1";
    std::string model = "randomforest";
    std::string cutoff;
  } tr;
  detail::FilterOptions train_filter;
  detail::ModelOptions train_models;
  train->add_option("--in", tr.in)->required();
  train->add_option("--out", tr.out, "Serialized model path")->capture_default_str();
  train->add_option("--station", tr.station);
  train->add_option("--class", tr.cls)->capture_default_str();
  train->add_option("--model", tr.model, "rf, extratrees, adaboost, mlp, lstm or naive")
      ->capture_default_str();
  train->add_option("--cutoff", tr.cutoff,
                    "Fit on days <= cutoff only (default: the whole series)");
  train_filter.attach(train);
  train_models.attach(train);

  // --- predict ----------------------------------------------------------------
  auto* predict = app.add_subcommand("predict", "Load a model and write DATE,FORECAST");
  predict->set_config("--config");
  struct {
    std::string model, in, out = "forecast.csv";
    int station = -1;
    std::string cls = "TC1";
    std::string from;
    int steps = 28;
  } pr;
  predict->add_option("--model", pr.model, "Serialized model file")->required();
  predict->add_option("--in", pr.in, "History CSV (context for the forecast)")->required();
  predict->add_option("--out", pr.out)->capture_default_str();
  predict->add_option("--station", pr.station);
  predict->add_option("--class", pr.cls)->capture_default_str();
  predict->add_option("--from", pr.from,
                      "First forecast day (default: the day after the history ends; "
                      "a one-step LSTM instead walks the last --steps observed days)");
  predict->add_option("--steps", pr.steps, "Days to forecast")->capture_default_str();

  // --- evaluate ----------------------------------------------------------------
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score one model on a chronological split");
  evaluate_cmd->set_config("--config");
  struct {
    std::string in;
    int station = -1;
    std::string cls = "TC1";
    std::string model = "randomforest";
    std::string cutoff;
    std::string score_against = "raw";
    std::string out_prefix = "eval";
  } ev;
  detail::FilterOptions eval_filter;
  detail::ModelOptions eval_models;
  evaluate_cmd->add_option("--in", ev.in)->required();
  evaluate_cmd->add_option("--station", ev.station);
  evaluate_cmd->add_option("--class", ev.cls)->capture_default_str();
  evaluate_cmd->add_option("--model", ev.model)->capture_default_str();
  evaluate_cmd->add_option("--cutoff", ev.cutoff, "Last training day, YYYY-MM-DD")->required();
  evaluate_cmd->add_option("--score-against", ev.score_against, "raw or filtered actuals")
      ->capture_default_str();
  evaluate_cmd->add_option("--out-prefix", ev.out_prefix,
                           "Writes <prefix>_report.csv and <prefix>_daily.csv")
      ->capture_default_str();
  eval_filter.attach(evaluate_cmd);
  eval_models.attach(evaluate_cmd);

  // --- compare -----------------------------------------------------------------
  auto* compare_cmd = app.add_subcommand("compare", "Score several models on one split");
  compare_cmd->set_config("--config");
  struct {
    std::string in;
    int station = -1;
    std::string cls = "TC1";
    std::string models = "mlp,rf,adaboost,extratrees,lstm,naive";
    std::string cutoff;
    std::string score_against = "raw";
    std::string out_prefix = "compare";
  } cp;
  detail::FilterOptions cmp_filter;
  detail::ModelOptions cmp_models;
  compare_cmd->add_option("--in", cp.in)->required();
  compare_cmd->add_option("--station", cp.station);
  compare_cmd->add_option("--class", cp.cls)->capture_default_str();
  compare_cmd->add_option("--models", cp.models, "Comma-separated model list")
      ->capture_default_str();
  compare_cmd->add_option("--cutoff", cp.cutoff)->required();
  compare_cmd->add_option("--score-against", cp.score_against)->capture_default_str();
  compare_cmd->add_option("--out-prefix", cp.out_prefix,
                          "Writes <prefix>_summary.csv and <prefix>_<model>_daily.csv")
      ->capture_default_str();
  cmp_filter.attach(compare_cmd);
  cmp_models.attach(compare_cmd);

  // --- plot ----------------------------------------------------------------------
  auto* plot = app.add_subcommand("plot", "Render a DATE,ACTUAL,FORECAST CSV as SVG");
  plot->set_config("--config");
  struct {
    std::string in, out = "chart.svg";
    std::string title = "Measured vs forecast";
  } pl;
  plot->add_option("--in", pl.in, "Daily CSV from evaluate/compare")->required();
  plot->add_option("--out", pl.out)->capture_default_str();
  plot->add_option("--title", pl.title)->capture_default_str();

  // ---------------------------------------------------------------------------
  std::vector<const char*> argv;
  argv.push_back("tollcast");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (synth->parsed()) {
      SynthConfig cfg;
      cfg.start_date = Date::parse(sy.start);
      cfg.n_days = sy.days;
      cfg.base_level = sy.base_level;
      const auto weekly = detail::split(sy.weekly, ',');
      if (weekly.size() != 7) throw config_error("--weekly needs exactly 7 values");
      for (std::size_t i = 0; i < 7; ++i) cfg.weekly_amplitudes[i] = std::stod(weekly[i]);
      cfg.annual_amplitude = sy.annual_amplitude;
      cfg.peak_day_of_year = sy.peak_doy;
      cfg.trend_per_year = sy.trend;
      if (!sy.events.empty()) cfg.events = detail::parse_events(sy.events);
      cfg.outlier_rate = sy.outlier_rate;
      if (!sy.missing.empty()) cfg.missing_spans = detail::parse_missing(sy.missing);
      cfg.noise_sigma = sy.noise_sigma;
      cfg.seed = sy.seed;
      cfg.station_code = sy.station;
      const StationSynth result =
          generate_station(cfg, sy.tc2_fraction, sy.tc3_fraction);
      std::ostringstream noisy, cleaned;
      write_csv(noisy, result.noisy_records);
      write_csv(cleaned, result.clean_records);
      write_file(sy.out, noisy.str());
      write_file(detail::clean_twin_path(sy.out), cleaned.str());
      std::cout << "wrote " << sy.out << " (" << result.noisy_records.size()
                << " rows, " << result.tc1.outlier_days << " TC1 outlier days) and "
                << detail::clean_twin_path(sy.out) << "\n";
      return 0;
    }

    if (clean->parsed()) {
      const DailySeries series = detail::load_series(cl.in, cl.station, cl.cls);
      const auto cfg = clean_filter.build();
      if (!cfg) throw config_error("clean needs a filter (median, moving_average, ...)");
      const DailySeries filtered = apply_filter(impute_missing(series), *cfg);
      std::ostringstream out;
      write_series_csv(out, filtered);
      write_file(cl.out, out.str());
      std::cout << "wrote " << cl.out << " (" << filtered.size() << " days)\n";
      return 0;
    }

    if (feat->parsed()) {
      DailySeries series = impute_missing(detail::load_series(fz.in, fz.station, fz.cls));
      if (const auto cfg = feat_filter.build()) series = apply_filter(series, *cfg);
      const FeatureMatrix m = build_matrix(series, parse_week_start(fz.week_start));
      std::ostringstream out;
      write_matrix_csv(out, m);
      write_file(fz.out, out.str());
      std::cout << "wrote " << fz.out << " (" << m.n_rows() << " rows x "
                << m.n_cols() << " feature columns)\n";
      return 0;
    }

    if (train->parsed()) {
      DailySeries series = detail::load_series(tr.in, tr.station, tr.cls);
      if (!tr.cutoff.empty()) {
        series = split_train_test(series, SplitSpec{Date::parse(tr.cutoff)}).first;
      }
      DailySeries fit_series = impute_missing(series);
      if (const auto cfg = train_filter.build()) fit_series = apply_filter(fit_series, *cfg);
      const ModelConfigs configs = train_models.build();
      auto model = make_forecaster(parse_model_kind(tr.model), configs);
      model->fit(fit_series);
      std::ostringstream out;
      model->save(out);
      write_file(tr.out, out.str());
      std::cout << "wrote " << tr.out << " (" << model->name() << " fitted on "
                << fit_series.size() << " days)\n";
      return 0;
    }

    if (predict->parsed()) {
      std::ifstream model_in(pr.model);
      if (!model_in) throw io_error("cannot open " + pr.model);
      auto model = load_forecaster(model_in);
      const DailySeries history =
          impute_missing(detail::load_series(pr.in, pr.station, pr.cls));
      if (pr.steps < 1) throw config_error("--steps must be >= 1");

      SeriesForecast fc;
      if (auto* lstm = dynamic_cast<LSTMForecaster*>(model.get())) {
        DailySeries context = history;
        if (!pr.from.empty() && lstm->mode() == ForecastMode::multi_step) {
          const Date from = Date::parse(pr.from);
          const SplitSpec spec{from - 1};
          context = split_train_test(history, spec).first;
        }
        fc = lstm_forecast(lstm->network(), context, pr.steps, lstm->mode());
      } else {
        const Date from = pr.from.empty() ? history.end_date() + 1 : Date::parse(pr.from);
        for (int i = 0; i < pr.steps; ++i) fc.dates.push_back(from + i);
        fc.values = model->forecast(fc.dates, {});
      }
      std::ostringstream out;
      out << "DATE,FORECAST\n";
      char buf[32];
      for (std::size_t i = 0; i < fc.dates.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.6f", fc.values[i]);
        out << fc.dates[i].to_string() << ',' << buf << "\n";
      }
      write_file(pr.out, out.str());
      std::cout << "wrote " << pr.out << " (" << fc.dates.size() << " days of "
                << model->name() << " forecasts)\n";
      return 0;
    }

    if (evaluate_cmd->parsed()) {
      const DailySeries series = detail::load_series(ev.in, ev.station, ev.cls);
      const auto [train_s, test_s] =
          split_train_test(series, SplitSpec{Date::parse(ev.cutoff)});
      EvalConfig cfg;
      cfg.filter = eval_filter.build();
      cfg.score_against =
          ev.score_against == "filtered" ? ScoreTarget::filtered : ScoreTarget::raw;
      auto model = make_forecaster(parse_model_kind(ev.model), eval_models.build());
      const EvalReport report = evaluate(*model, train_s, test_s, cfg);
      std::ostringstream summary, daily;
      write_report_csv(summary, {report});
      write_daily_csv(daily, report);
      write_file(ev.out_prefix + "_report.csv", summary.str());
      write_file(ev.out_prefix + "_daily.csv", daily.str());
      render_comparison(std::cout, {report});
      return 0;
    }

    if (compare_cmd->parsed()) {
      const DailySeries series = detail::load_series(cp.in, cp.station, cp.cls);
      const auto [train_s, test_s] =
          split_train_test(series, SplitSpec{Date::parse(cp.cutoff)});
      EvalConfig cfg;
      cfg.filter = cmp_filter.build();
      cfg.score_against =
          cp.score_against == "filtered" ? ScoreTarget::filtered : ScoreTarget::raw;
      const ModelConfigs configs = cmp_models.build();
      std::vector<std::unique_ptr<ForecastModel>> owned;
      std::vector<ForecastModel*> models;
      for (const auto& token : detail::split(cp.models, ',')) {
        owned.push_back(make_forecaster(parse_model_kind(token), configs));
        models.push_back(owned.back().get());
      }
      if (models.empty()) throw config_error("--models list is empty");
      const auto reports = compare(models, train_s, test_s, cfg);
      std::ostringstream summary;
      write_report_csv(summary, reports);
      write_file(cp.out_prefix + "_summary.csv", summary.str());
      for (const auto& r : reports) {
        std::ostringstream daily;
        write_daily_csv(daily, r);
        write_file(cp.out_prefix + "_" + r.model + "_daily.csv", daily.str());
      }
      render_comparison(std::cout, reports);
      return 0;
    }

    if (plot->parsed()) {
      std::ifstream in(pl.in);
      if (!in) throw io_error("cannot open " + pl.in);
      std::string line;
      if (!std::getline(in, line)) throw parse_error(pl.in + ": empty file");
      SvgSeries measured{"measured", {}, {}, 1.0, "#1f77b4"};
      SvgSeries forecast{"forecast", {}, {}, 2.2, "#d62728"};
      int line_no = 1;
      while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split(line, ',');
        if (fields.size() != 3) {
          throw parse_error(pl.in + ": line " + std::to_string(line_no) +
                            ": expected DATE,ACTUAL,FORECAST");
        }
        const Date d = Date::parse(fields[0]);
        measured.dates.push_back(d);
        measured.values.push_back(std::stod(fields[1]));
        forecast.dates.push_back(d);
        forecast.values.push_back(std::stod(fields[2]));
      }
      std::ostringstream out;
      write_line_chart(out, pl.title, {measured, forecast});
      write_file(pl.out, out.str());
      std::cout << "wrote " << pl.out << "\n";
      return 0;
    }
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace cli
}  // namespace tollcast
