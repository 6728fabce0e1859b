#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tollcast/adaboost.hpp"
#include "tollcast/error.hpp"
#include "tollcast/forest.hpp"
#include "tollcast/lstm.hpp"
#include "tollcast/mlp.hpp"
#include "tollcast/tree.hpp"

namespace tollcast {
namespace io {

// Doubles travel as C99 hex floats so serialized models reload bit-exactly.
inline std::string hex_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

inline double parse_hex_double(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    throw parse_error("bad numeric token '" + token + "' in model file");
  }
  return v;
}

inline std::string expect_token(std::istream& in, const char* what) {
  std::string token;
  if (!(in >> token)) {
    throw parse_error(std::string("model file ended while reading ") + what);
  }
  return token;
}

inline void expect_keyword(std::istream& in, const std::string& keyword) {
  const std::string token = expect_token(in, keyword.c_str());
  if (token != keyword) {
    throw parse_error("expected '" + keyword + "' in model file, got '" + token + "'");
  }
}

inline long read_int(std::istream& in, const char* what) {
  const std::string token = expect_token(in, what);
  try {
    return std::stol(token);
  } catch (const std::exception&) {
    throw parse_error(std::string("bad integer for ") + what + ": '" + token + "'");
  }
}

inline double read_double(std::istream& in, const char* what) {
  return parse_hex_double(expect_token(in, what));
}

inline void write_vector(std::ostream& out, const std::vector<double>& v) {
  out << v.size();
  for (double x : v) out << ' ' << hex_double(x);
  out << '\n';
}

inline std::vector<double> read_vector(std::istream& in, const char* what) {
  const long n = read_int(in, what);
  if (n < 0) throw parse_error(std::string("negative length for ") + what);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = read_double(in, what);
  return v;
}

// --- regression trees -----------------------------------------------------

inline void write_tree(std::ostream& out, const RegressionTree& tree) {
  out << "tree " << tree.nodes().size() << ' ' << tree.feature_count() << '\n';
  for (const auto& n : tree.nodes()) {
    out << n.feature << ' ' << hex_double(n.threshold) << ' ' << n.left << ' '
        << n.right << ' ' << hex_double(n.value) << '\n';
  }
}

inline RegressionTree read_tree(std::istream& in) {
  expect_keyword(in, "tree");
  const long count = read_int(in, "node count");
  const long features = read_int(in, "feature count");
  std::vector<TreeNode> nodes(static_cast<std::size_t>(count));
  for (auto& n : nodes) {
    n.feature = static_cast<int>(read_int(in, "node feature"));
    n.threshold = read_double(in, "node threshold");
    n.left = static_cast<int>(read_int(in, "node left"));
    n.right = static_cast<int>(read_int(in, "node right"));
    n.value = read_double(in, "node value");
  }
  return RegressionTree(std::move(nodes), static_cast<int>(features));
}

// --- shared parameter blocks ----------------------------------------------

inline void write_tree_params(std::ostream& out, const TreeParams& p) {
  out << "tree_params " << p.max_features.to_string() << ' ' << p.min_samples_split
      << ' ' << p.min_samples_leaf << ' ' << p.max_depth << ' ' << p.seed << '\n';
}

inline TreeParams read_tree_params(std::istream& in) {
  expect_keyword(in, "tree_params");
  TreeParams p;
  p.max_features = MaxFeaturesRule::parse(expect_token(in, "max_features"));
  p.min_samples_split = static_cast<int>(read_int(in, "min_samples_split"));
  p.min_samples_leaf = static_cast<int>(read_int(in, "min_samples_leaf"));
  p.max_depth = static_cast<int>(read_int(in, "max_depth"));
  p.seed = static_cast<std::uint64_t>(std::stoull(expect_token(in, "seed")));
  return p;
}

// --- forest -----------------------------------------------------------------

inline void write_forest(std::ostream& out, const ForestModel& model) {
  const auto& p = model.params();
  out << "forest " << (p.mode == ForestMode::random_forest ? "random_forest" : "extra_trees")
      << ' ' << p.n_estimators << ' ' << (p.bootstrap ? 1 : 0) << '\n';
  write_tree_params(out, p.tree);
  for (const auto& t : model.trees()) write_tree(out, t);
}

inline ForestModel read_forest(std::istream& in) {
  expect_keyword(in, "forest");
  ForestParams p;
  const std::string mode = expect_token(in, "forest mode");
  if (mode == "random_forest") {
    p.mode = ForestMode::random_forest;
  } else if (mode == "extra_trees") {
    p.mode = ForestMode::extra_trees;
  } else {
    throw parse_error("unknown forest mode '" + mode + "'");
  }
  p.n_estimators = static_cast<int>(read_int(in, "n_estimators"));
  p.bootstrap = read_int(in, "bootstrap flag") != 0;
  p.tree = read_tree_params(in);
  std::vector<RegressionTree> trees;
  trees.reserve(static_cast<std::size_t>(p.n_estimators));
  for (int i = 0; i < p.n_estimators; ++i) trees.push_back(read_tree(in));
  return ForestModel(p, std::move(trees));
}

// --- adaboost ---------------------------------------------------------------

inline void write_boost(std::ostream& out, const BoostModel& model) {
  const auto& p = model.params();
  const char* loss = p.loss == BoostLoss::linear
                         ? "linear"
                         : (p.loss == BoostLoss::square ? "square" : "exponential");
  out << "adaboost_r2 " << p.n_estimators << ' ' << hex_double(p.learning_rate)
      << ' ' << loss << ' ' << p.seed << ' ' << model.trees().size() << '\n';
  write_tree_params(out, p.base);
  write_vector(out, model.estimator_weights());
  for (const auto& t : model.trees()) write_tree(out, t);
}

inline BoostModel read_boost(std::istream& in) {
  expect_keyword(in, "adaboost_r2");
  BoostParams p;
  p.n_estimators = static_cast<int>(read_int(in, "n_estimators"));
  p.learning_rate = read_double(in, "learning_rate");
  p.loss = parse_boost_loss(expect_token(in, "loss"));
  p.seed = static_cast<std::uint64_t>(std::stoull(expect_token(in, "seed")));
  const long rounds = read_int(in, "round count");
  p.base = read_tree_params(in);
  auto weights = read_vector(in, "estimator weights");
  if (static_cast<long>(weights.size()) != rounds) {
    throw parse_error("estimator weight count mismatch in model file");
  }
  std::vector<RegressionTree> trees;
  trees.reserve(static_cast<std::size_t>(rounds));
  for (long i = 0; i < rounds; ++i) trees.push_back(read_tree(in));
  return BoostModel(p, std::move(trees), std::move(weights), {});
}

// --- mlp ---------------------------------------------------------------------

inline void write_mlp(std::ostream& out, const MLPModel& model) {
  out << "mlp " << to_string(model.activation()) << ' ' << model.layers().size() << '\n';
  for (const auto& layer : model.layers()) {
    out << "layer " << layer.in << ' ' << layer.out << '\n';
    write_vector(out, layer.w);
    write_vector(out, layer.b);
  }
}

inline MLPModel read_mlp(std::istream& in) {
  expect_keyword(in, "mlp");
  MLPModel model;
  model.set_activation(parse_activation(expect_token(in, "activation")));
  const long n_layers = read_int(in, "layer count");
  auto& layers = model.layers();
  for (long l = 0; l < n_layers; ++l) {
    expect_keyword(in, "layer");
    detail::DenseLayer layer;
    layer.in = static_cast<int>(read_int(in, "layer input width"));
    layer.out = static_cast<int>(read_int(in, "layer output width"));
    layer.w = read_vector(in, "layer weights");
    layer.b = read_vector(in, "layer biases");
    if (layer.w.size() != static_cast<std::size_t>(layer.in) * static_cast<std::size_t>(layer.out) ||
        layer.b.size() != static_cast<std::size_t>(layer.out)) {
      throw parse_error("layer dimension mismatch in model file");
    }
    layers.push_back(std::move(layer));
  }
  return model;
}

// --- lstm ----------------------------------------------------------------------

inline void write_lstm(std::ostream& out, const LSTMNetwork& net) {
  out << "lstm " << net.spec().lookback << ' ' << net.spec().lookforward << ' '
      << net.cells().size() << ' ' << hex_double(net.norm().lo) << ' '
      << hex_double(net.norm().hi) << '\n';
  for (const auto& cell : net.cells()) {
    out << "cell " << cell.input_size << ' ' << cell.hidden_size << '\n';
    for (const auto& gate : cell.gates) {
      write_vector(out, gate.w);
      write_vector(out, gate.u);
      write_vector(out, gate.b);
    }
  }
  write_vector(out, net.readout_weights());
  write_vector(out, net.readout_bias());
}

inline LSTMNetwork read_lstm(std::istream& in) {
  expect_keyword(in, "lstm");
  WindowSpec spec;
  spec.lookback = static_cast<int>(read_int(in, "lookback"));
  spec.lookforward = static_cast<int>(read_int(in, "lookforward"));
  const long n_cells = read_int(in, "cell count");
  SeriesNorm norm;
  norm.lo = read_double(in, "norm lo");
  norm.hi = read_double(in, "norm hi");
  std::vector<int> sizes;
  std::vector<LSTMCellWeights> cells;
  for (long l = 0; l < n_cells; ++l) {
    expect_keyword(in, "cell");
    LSTMCellWeights cell;
    cell.input_size = static_cast<int>(read_int(in, "cell input size"));
    cell.hidden_size = static_cast<int>(read_int(in, "cell hidden size"));
    for (auto& gate : cell.gates) {
      gate.w = read_vector(in, "gate input weights");
      gate.u = read_vector(in, "gate recurrent weights");
      gate.b = read_vector(in, "gate bias");
    }
    sizes.push_back(cell.hidden_size);
    cells.push_back(std::move(cell));
  }
  LSTMNetwork net = LSTMNetwork::init(sizes, spec, 0);
  net.cells() = std::move(cells);
  net.readout_weights() = read_vector(in, "readout weights");
  net.readout_bias() = read_vector(in, "readout bias");
  net.set_norm(norm);
  if (net.readout_weights().size() !=
          static_cast<std::size_t>(spec.lookforward) *
              static_cast<std::size_t>(net.cells().back().hidden_size) ||
      net.readout_bias().size() != static_cast<std::size_t>(spec.lookforward)) {
    throw parse_error("readout dimension mismatch in model file");
  }
  return net;
}

}  // namespace io
}  // namespace tollcast
