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

enum class Activation { relu, tanh_act, logistic };

inline Activation parse_activation(std::string_view token) {
  if (token == "relu") return Activation::relu;
  if (token == "tanh") return Activation::tanh_act;
  if (token == "logistic" || token == "sigmoid") return Activation::logistic;
  throw config_error("activation must be relu, tanh or logistic");
}

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh_act: return "tanh";
    default: return "logistic";
  }
}

// Multi-layer perceptron regressor knobs. `max_iter` caps training epochs;
// training also stops once the best full-data loss has not improved by `tol`
// for 20 consecutive epochs. Inputs are expected pre-scaled (minmax01 or
// standardized); the pipeline wrappers take care of that.
struct MLPParams {
  std::vector<int> hidden_layer_sizes{200, 100, 100, 200, 100, 200};
  double alpha = 0.01;  // L2 penalty on weights (not biases), per-sample
  int max_iter = 80000;
  int batch_size = 40;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  Activation activation = Activation::relu;
  double tol = 1e-6;
};

inline constexpr int kEarlyStopPatience = 20;

namespace detail {

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // row-major, w[o * in + j]
  std::vector<double> b;
};

inline double activate(Activation a, double z) {
  switch (a) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::tanh_act: return std::tanh(z);
    default: return 1.0 / (1.0 + std::exp(-z));
  }
}

// Derivative expressed through the activation value.
inline double activate_prime(Activation a, double value) {
  switch (a) {
    case Activation::relu: return value > 0.0 ? 1.0 : 0.0;
    case Activation::tanh_act: return 1.0 - value * value;
    default: return value * (1.0 - value);
  }
}

}  // namespace detail

// Fully connected network: affine + activation per hidden layer, affine with
// identity activation on the single regression output.
class MLPModel {
 public:
  MLPModel() = default;

  static MLPModel init(int input_width, const MLPParams& params) {
    if (input_width < 1) throw config_error("input width must be >= 1");
    for (int h : params.hidden_layer_sizes) {
      if (h < 1) throw config_error("hidden layer sizes must be >= 1");
    }
    MLPModel m;
    m.act_ = params.activation;
    Rng rng(params.seed);
    int prev = input_width;
    std::vector<int> sizes = params.hidden_layer_sizes;
    sizes.push_back(1);
    for (int size : sizes) {
      detail::DenseLayer layer;
      layer.in = prev;
      layer.out = size;
      layer.w.resize(static_cast<std::size_t>(prev) * static_cast<std::size_t>(size));
      layer.b.assign(static_cast<std::size_t>(size), 0.0);
      const double limit = std::sqrt(6.0 / static_cast<double>(prev + size));
      for (double& w : layer.w) w = rng.uniform(-limit, limit);
      m.layers_.push_back(std::move(layer));
      prev = size;
    }
    return m;
  }

  int input_width() const { return layers_.empty() ? 0 : layers_.front().in; }
  Activation activation() const { return act_; }
  const std::vector<detail::DenseLayer>& layers() const { return layers_; }
  std::vector<detail::DenseLayer>& layers() { return layers_; }
  const std::vector<double>& loss_trace() const { return loss_trace_; }
  void set_loss_trace(std::vector<double> trace) { loss_trace_ = std::move(trace); }
  void set_activation(Activation a) { act_ = a; }

  double forward(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != input_width()) {
      throw shape_error("network expects " + std::to_string(input_width()) +
                        " inputs, got " + std::to_string(x.size()));
    }
    std::vector<double> a = x;
    std::vector<double> next;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& layer = layers_[l];
      const bool last = l + 1 == layers_.size();
      next.assign(static_cast<std::size_t>(layer.out), 0.0);
      for (int o = 0; o < layer.out; ++o) {
        double z = layer.b[static_cast<std::size_t>(o)];
        const double* wrow = &layer.w[static_cast<std::size_t>(o) *
                                      static_cast<std::size_t>(layer.in)];
        for (int j = 0; j < layer.in; ++j) z += wrow[j] * a[static_cast<std::size_t>(j)];
        next[static_cast<std::size_t>(o)] = last ? z : detail::activate(act_, z);
      }
      a.swap(next);
    }
    return a[0];
  }

  std::vector<double> predict(const std::vector<std::vector<double>>& rows) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(forward(r));
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.w.size() + l.b.size();
    return n;
  }

  // Weights then biases, layer by layer. Used by the finite-difference check.
  std::vector<double> flat_parameters() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& l : layers_) {
      out.insert(out.end(), l.w.begin(), l.w.end());
      out.insert(out.end(), l.b.begin(), l.b.end());
    }
    return out;
  }

  void set_flat_parameters(const std::vector<double>& flat) {
    std::size_t pos = 0;
    for (auto& l : layers_) {
      std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), l.w.size(), l.w.begin());
      pos += l.w.size();
      std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), l.b.size(), l.b.begin());
      pos += l.b.size();
    }
  }

  double squared_weight_norm() const {
    double s = 0.0;
    for (const auto& l : layers_) {
      for (double w : l.w) s += w * w;
    }
    return s;
  }

 private:
  std::vector<detail::DenseLayer> layers_;
  Activation act_ = Activation::relu;
  std::vector<double> loss_trace_;
};

// Mean squared error over the given rows plus an L2 penalty on the weights,
// (alpha / 2n) * sum w^2; biases are not penalized.
inline double mlp_loss(const MLPModel& model,
                       const std::vector<std::vector<double>>& X,
                       const std::vector<double>& y, double alpha) {
  if (X.empty() || X.size() != y.size()) {
    throw shape_error("mlp_loss: rows and targets must be non-empty and aligned");
  }
  double mse = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double d = model.forward(X[i]) - y[i];
    mse += d * d;
  }
  const double n = static_cast<double>(X.size());
  return mse / n + alpha / (2.0 * n) * model.squared_weight_norm();
}

namespace detail {

// Backpropagation gradient of mlp_loss on (X, y); same layout as the layers.
inline std::vector<DenseLayer> mlp_gradient(const MLPModel& model,
                                            const std::vector<std::vector<double>>& X,
                                            const std::vector<double>& y,
                                            double alpha) {
  const auto& layers = model.layers();
  std::vector<DenseLayer> grads(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    grads[l].in = layers[l].in;
    grads[l].out = layers[l].out;
    grads[l].w.assign(layers[l].w.size(), 0.0);
    grads[l].b.assign(layers[l].b.size(), 0.0);
  }
  const double n = static_cast<double>(X.size());
  const Activation act = model.activation();

  std::vector<std::vector<double>> acts(layers.size() + 1);
  std::vector<double> delta, delta_prev;
  for (std::size_t r = 0; r < X.size(); ++r) {
    acts[0] = X[r];
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& layer = layers[l];
      const bool last = l + 1 == layers.size();
      auto& out = acts[l + 1];
      out.assign(static_cast<std::size_t>(layer.out), 0.0);
      for (int o = 0; o < layer.out; ++o) {
        double z = layer.b[static_cast<std::size_t>(o)];
        const double* wrow = &layer.w[static_cast<std::size_t>(o) *
                                      static_cast<std::size_t>(layer.in)];
        for (int j = 0; j < layer.in; ++j) z += wrow[j] * acts[l][static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(o)] = last ? z : activate(act, z);
      }
    }
    // d(MSE)/d(pred) for the mean over n rows.
    delta.assign(1, 2.0 * (acts.back()[0] - y[r]) / n);
    for (std::size_t l = layers.size(); l-- > 0;) {
      const auto& layer = layers[l];
      auto& g = grads[l];
      const auto& a_prev = acts[l];
      for (int o = 0; o < layer.out; ++o) {
        const double d = delta[static_cast<std::size_t>(o)];
        g.b[static_cast<std::size_t>(o)] += d;
        double* grow = &g.w[static_cast<std::size_t>(o) * static_cast<std::size_t>(layer.in)];
        for (int j = 0; j < layer.in; ++j) grow[j] += d * a_prev[static_cast<std::size_t>(j)];
      }
      if (l == 0) break;
      delta_prev.assign(static_cast<std::size_t>(layer.in), 0.0);
      for (int o = 0; o < layer.out; ++o) {
        const double d = delta[static_cast<std::size_t>(o)];
        const double* wrow = &layer.w[static_cast<std::size_t>(o) *
                                      static_cast<std::size_t>(layer.in)];
        for (int j = 0; j < layer.in; ++j) delta_prev[static_cast<std::size_t>(j)] += wrow[j] * d;
      }
      for (int j = 0; j < layers[l - 1].out; ++j) {
        delta_prev[static_cast<std::size_t>(j)] *=
            activate_prime(act, acts[l][static_cast<std::size_t>(j)]);
      }
      delta.swap(delta_prev);
    }
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const double scale = alpha / n;
    for (std::size_t k = 0; k < layers[l].w.size(); ++k) {
      grads[l].w[k] += scale * layers[l].w[k];
    }
  }
  return grads;
}

}  // namespace detail

// Mini-batch SGD on shuffled epochs. Returns the parameters with the best
// full-data loss seen, together with the per-epoch loss trace.
inline MLPModel mlp_train(const std::vector<std::vector<double>>& X,
                          const std::vector<double>& y, const MLPParams& params) {
  if (X.empty() || X.size() != y.size()) {
    throw shape_error("mlp_train: rows and targets must be non-empty and aligned");
  }
  if (params.max_iter < 0) throw config_error("max_iter must be >= 0");
  if (params.batch_size < 1) throw config_error("batch_size must be >= 1");
  if (!(params.learning_rate > 0.0)) throw config_error("learning_rate must be > 0");

  const std::size_t n = X.size();
  const std::size_t batch =
      std::min<std::size_t>(static_cast<std::size_t>(params.batch_size), n);
  MLPModel model = MLPModel::init(static_cast<int>(X[0].size()), params);
  Rng shuffle_rng(Rng::derive(params.seed, 0x5affULL));

  MLPModel best = model;
  double best_loss = std::numeric_limits<double>::infinity();
  int stall = 0;
  std::vector<double> trace;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < params.max_iter; ++epoch) {
    shuffle(order, shuffle_rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      std::vector<std::vector<double>> rows;
      std::vector<double> by;
      rows.reserve(stop - start);
      by.reserve(stop - start);
      for (std::size_t k = start; k < stop; ++k) {
        rows.push_back(X[order[k]]);
        by.push_back(y[order[k]]);
      }
      const auto grads = detail::mlp_gradient(model, rows, by, params.alpha);
      auto& layers = model.layers();
      for (std::size_t l = 0; l < layers.size(); ++l) {
        for (std::size_t k = 0; k < layers[l].w.size(); ++k) {
          layers[l].w[k] -= params.learning_rate * grads[l].w[k];
        }
        for (std::size_t k = 0; k < layers[l].b.size(); ++k) {
          layers[l].b[k] -= params.learning_rate * grads[l].b[k];
        }
      }
    }
    const double loss = mlp_loss(model, X, y, params.alpha);
    if (!std::isfinite(loss)) {
      throw training_error(
          "mlp_train: loss diverged at epoch " + std::to_string(epoch) +
          "; lower the learning rate");
    }
    trace.push_back(loss);
    if (best_loss - loss >= params.tol) {
      best_loss = loss;
      best = model;
      stall = 0;
    } else {
      ++stall;
      if (stall >= kEarlyStopPatience) break;
    }
  }
  if (best_loss == std::numeric_limits<double>::infinity()) best = model;
  best.set_loss_trace(std::move(trace));
  return best;
}

// Largest relative disagreement between backprop and central finite
// differences of mlp_loss over every parameter.
inline double mlp_gradient_check(const MLPModel& model,
                                 const std::vector<std::vector<double>>& X,
                                 const std::vector<double>& y, double alpha,
                                 double epsilon = 1e-5) {
  const auto grads = detail::mlp_gradient(model, X, y, alpha);
  std::vector<double> flat_grad;
  for (const auto& g : grads) {
    flat_grad.insert(flat_grad.end(), g.w.begin(), g.w.end());
    flat_grad.insert(flat_grad.end(), g.b.begin(), g.b.end());
  }
  MLPModel probe = model;
  std::vector<double> theta = model.flat_parameters();
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + epsilon;
    probe.set_flat_parameters(theta);
    const double up = mlp_loss(probe, X, y, alpha);
    theta[i] = saved - epsilon;
    probe.set_flat_parameters(theta);
    const double down = mlp_loss(probe, X, y, alpha);
    theta[i] = saved;
    const double fd = (up - down) / (2.0 * epsilon);
    const double denom = std::max(1e-8, std::abs(flat_grad[i]) + std::abs(fd));
    worst = std::max(worst, std::abs(flat_grad[i] - fd) / denom);
  }
  probe.set_flat_parameters(theta);
  return worst;
}

}  // namespace tollcast
