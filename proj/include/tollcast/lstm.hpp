#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tollcast/date.hpp"
#include "tollcast/error.hpp"
#include "tollcast/rng.hpp"
#include "tollcast/series.hpp"

namespace tollcast {

// Sliding-window geometry: each training sample sees `lookback` consecutive
// values and predicts the following `lookforward` values at once.
struct WindowSpec {
  int lookback = 100;
  int lookforward = 10;
};

// Min-max normalization of the raw series to [0, 1], remembered at fit time
// so forecasts can be mapped back. A constant series maps to 0 everywhere and
// denormalizes back to the constant.
struct SeriesNorm {
  double lo = 0.0;
  double hi = 1.0;

  double normalize(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }
  double denormalize(double u) const { return hi > lo ? lo + u * (hi - lo) : lo; }
};

struct WindowSet {
  WindowSpec spec;
  SeriesNorm norm;
  std::vector<std::vector<double>> inputs;   // normalized, length = lookback
  std::vector<std::vector<double>> targets;  // normalized, length = lookforward
};

// Slice a fully present series into lookback windows and lookforward targets.
// Sample k covers values [k, k+lookback) -> [k+lookback, k+lookback+lookforward).
inline WindowSet make_windows(const DailySeries& series, const WindowSpec& spec) {
  if (spec.lookback < 1 || spec.lookforward < 1) {
    throw config_error("lookback and lookforward must be >= 1");
  }
  const auto v = series.dense_values();
  const std::size_t need =
      static_cast<std::size_t>(spec.lookback) + static_cast<std::size_t>(spec.lookforward);
  if (v.size() < need) {
    throw precondition_error("series length " + std::to_string(v.size()) +
                             " is too short; need at least " + std::to_string(need) +
                             " (lookback + lookforward)");
  }
  WindowSet ws;
  ws.spec = spec;
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  ws.norm = SeriesNorm{*lo_it, *hi_it};
  std::vector<double> nv(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) nv[i] = ws.norm.normalize(v[i]);
  const std::size_t count = v.size() - need + 1;
  ws.inputs.reserve(count);
  ws.targets.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    ws.inputs.emplace_back(nv.begin() + static_cast<std::ptrdiff_t>(k),
                           nv.begin() + static_cast<std::ptrdiff_t>(k + spec.lookback));
    ws.targets.emplace_back(
        nv.begin() + static_cast<std::ptrdiff_t>(k + spec.lookback),
        nv.begin() + static_cast<std::ptrdiff_t>(k + need));
  }
  return ws;
}

// One gate's parameters: input weights (hidden x input), recurrent weights
// (hidden x hidden), bias.
struct GateWeights {
  std::vector<double> w;
  std::vector<double> u;
  std::vector<double> b;
};

// Standard LSTM cell, gates ordered input, forget, output, candidate.
struct LSTMCellWeights {
  int input_size = 0;
  int hidden_size = 0;
  std::array<GateWeights, 4> gates;
};

namespace detail {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// a = b + W x + U h_prev for one gate.
inline void gate_preactivation(const GateWeights& g, int hidden, int input,
                               const double* x, const double* h_prev, double* out) {
  for (int h = 0; h < hidden; ++h) {
    double z = g.b[static_cast<std::size_t>(h)];
    const double* wrow = &g.w[static_cast<std::size_t>(h) * static_cast<std::size_t>(input)];
    for (int d = 0; d < input; ++d) z += wrow[d] * x[d];
    const double* urow = &g.u[static_cast<std::size_t>(h) * static_cast<std::size_t>(hidden)];
    for (int k = 0; k < hidden; ++k) z += urow[k] * h_prev[k];
    out[static_cast<std::size_t>(h)] = z;
  }
}

// Per-timestep values cached during the forward pass for backpropagation.
struct CellStepCache {
  std::vector<double> x, i, f, o, g, c, tanh_c, h;
};

inline void cell_forward(const LSTMCellWeights& cell, const double* x,
                         const double* h_prev, const double* c_prev,
                         CellStepCache& cache) {
  const int H = cell.hidden_size;
  const int D = cell.input_size;
  cache.x.assign(x, x + D);
  cache.i.resize(static_cast<std::size_t>(H));
  cache.f.resize(static_cast<std::size_t>(H));
  cache.o.resize(static_cast<std::size_t>(H));
  cache.g.resize(static_cast<std::size_t>(H));
  cache.c.resize(static_cast<std::size_t>(H));
  cache.tanh_c.resize(static_cast<std::size_t>(H));
  cache.h.resize(static_cast<std::size_t>(H));
  std::vector<double> a(static_cast<std::size_t>(H));
  gate_preactivation(cell.gates[0], H, D, x, h_prev, a.data());
  for (int h = 0; h < H; ++h) cache.i[static_cast<std::size_t>(h)] = sigmoid(a[static_cast<std::size_t>(h)]);
  gate_preactivation(cell.gates[1], H, D, x, h_prev, a.data());
  for (int h = 0; h < H; ++h) cache.f[static_cast<std::size_t>(h)] = sigmoid(a[static_cast<std::size_t>(h)]);
  gate_preactivation(cell.gates[2], H, D, x, h_prev, a.data());
  for (int h = 0; h < H; ++h) cache.o[static_cast<std::size_t>(h)] = sigmoid(a[static_cast<std::size_t>(h)]);
  gate_preactivation(cell.gates[3], H, D, x, h_prev, a.data());
  for (int h = 0; h < H; ++h) cache.g[static_cast<std::size_t>(h)] = std::tanh(a[static_cast<std::size_t>(h)]);
  for (int h = 0; h < H; ++h) {
    const auto k = static_cast<std::size_t>(h);
    cache.c[k] = cache.f[k] * c_prev[h] + cache.i[k] * cache.g[k];
    cache.tanh_c[k] = std::tanh(cache.c[k]);
    cache.h[k] = cache.o[k] * cache.tanh_c[k];
  }
}

}  // namespace detail

// Single cell update from explicit previous state; returns (h_t, c_t).
inline std::pair<std::vector<double>, std::vector<double>> cell_step(
    const LSTMCellWeights& cell, const std::vector<double>& x,
    const std::vector<double>& h_prev, const std::vector<double>& c_prev) {
  if (static_cast<int>(x.size()) != cell.input_size ||
      static_cast<int>(h_prev.size()) != cell.hidden_size ||
      static_cast<int>(c_prev.size()) != cell.hidden_size) {
    throw shape_error("cell_step: dimension mismatch");
  }
  detail::CellStepCache cache;
  detail::cell_forward(cell, x.data(), h_prev.data(), c_prev.data(), cache);
  return {cache.h, cache.c};
}

struct LSTMTrainParams {
  int epochs = 1000;
  double learning_rate = 0.05;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double tol = 1e-6;
};

// Stacked LSTM cells over a scalar series with an affine multi-output
// readout (identity activation) of width lookforward on the final hidden
// state of the top cell.
class LSTMNetwork {
 public:
  LSTMNetwork() = default;

  static LSTMNetwork init(const std::vector<int>& hidden_sizes,
                          const WindowSpec& spec, std::uint64_t seed) {
    if (hidden_sizes.empty()) throw config_error("need at least one LSTM layer");
    for (int h : hidden_sizes) {
      if (h < 1) throw config_error("hidden sizes must be >= 1");
    }
    LSTMNetwork net;
    net.spec_ = spec;
    Rng rng(seed);
    int input = 1;
    for (int hsize : hidden_sizes) {
      LSTMCellWeights cell;
      cell.input_size = input;
      cell.hidden_size = hsize;
      const double wlim = std::sqrt(6.0 / static_cast<double>(input + hsize));
      const double ulim = std::sqrt(6.0 / static_cast<double>(hsize + hsize));
      for (std::size_t g = 0; g < 4; ++g) {
        auto& gate = cell.gates[g];
        gate.w.resize(static_cast<std::size_t>(hsize) * static_cast<std::size_t>(input));
        gate.u.resize(static_cast<std::size_t>(hsize) * static_cast<std::size_t>(hsize));
        // Forget gate (index 1) starts biased open so early training does not
        // wipe the cell state.
        gate.b.assign(static_cast<std::size_t>(hsize), g == 1 ? 1.0 : 0.0);
        for (double& w : gate.w) w = rng.uniform(-wlim, wlim);
        for (double& u : gate.u) u = rng.uniform(-ulim, ulim);
      }
      net.cells_.push_back(std::move(cell));
      input = hsize;
    }
    const int top = hidden_sizes.back();
    const double rlim = std::sqrt(6.0 / static_cast<double>(top + spec.lookforward));
    net.readout_w_.resize(static_cast<std::size_t>(spec.lookforward) *
                          static_cast<std::size_t>(top));
    for (double& w : net.readout_w_) w = rng.uniform(-rlim, rlim);
    net.readout_b_.assign(static_cast<std::size_t>(spec.lookforward), 0.0);
    return net;
  }

  const WindowSpec& spec() const { return spec_; }
  const SeriesNorm& norm() const { return norm_; }
  void set_norm(const SeriesNorm& n) { norm_ = n; }
  const std::vector<LSTMCellWeights>& cells() const { return cells_; }
  std::vector<LSTMCellWeights>& cells() { return cells_; }
  const std::vector<double>& readout_weights() const { return readout_w_; }
  std::vector<double>& readout_weights() { return readout_w_; }
  const std::vector<double>& readout_bias() const { return readout_b_; }
  std::vector<double>& readout_bias() { return readout_b_; }
  const std::vector<double>& loss_trace() const { return loss_trace_; }
  void set_loss_trace(std::vector<double> t) { loss_trace_ = std::move(t); }
  void set_spec(const WindowSpec& s) { spec_ = s; }

  // Run a normalized lookback window through the stack from zero states and
  // apply the readout to the final top hidden state.
  std::vector<double> forward_sequence(const std::vector<double>& window) const {
    if (static_cast<int>(window.size()) != spec_.lookback) {
      throw shape_error("window length " + std::to_string(window.size()) +
                        " != lookback " + std::to_string(spec_.lookback));
    }
    const int layers = static_cast<int>(cells_.size());
    std::vector<std::vector<double>> h(cells_.size()), c(cells_.size());
    for (int l = 0; l < layers; ++l) {
      h[static_cast<std::size_t>(l)].assign(
          static_cast<std::size_t>(cells_[static_cast<std::size_t>(l)].hidden_size), 0.0);
      c[static_cast<std::size_t>(l)] = h[static_cast<std::size_t>(l)];
    }
    detail::CellStepCache cache;
    for (double x_t : window) {
      double scalar = x_t;
      const double* input = &scalar;
      for (int l = 0; l < layers; ++l) {
        auto& cell = cells_[static_cast<std::size_t>(l)];
        detail::cell_forward(cell, input, h[static_cast<std::size_t>(l)].data(),
                             c[static_cast<std::size_t>(l)].data(), cache);
        h[static_cast<std::size_t>(l)] = cache.h;
        c[static_cast<std::size_t>(l)] = cache.c;
        input = h[static_cast<std::size_t>(l)].data();
      }
    }
    const auto& top = h.back();
    const int hsize = cells_.back().hidden_size;
    std::vector<double> out(static_cast<std::size_t>(spec_.lookforward));
    for (int k = 0; k < spec_.lookforward; ++k) {
      double z = readout_b_[static_cast<std::size_t>(k)];
      const double* wrow =
          &readout_w_[static_cast<std::size_t>(k) * static_cast<std::size_t>(hsize)];
      for (int j = 0; j < hsize; ++j) z += wrow[j] * top[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(k)] = z;
    }
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = readout_w_.size() + readout_b_.size();
    for (const auto& cell : cells_) {
      for (const auto& g : cell.gates) n += g.w.size() + g.u.size() + g.b.size();
    }
    return n;
  }

  std::vector<double> flat_parameters() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& cell : cells_) {
      for (const auto& g : cell.gates) {
        out.insert(out.end(), g.w.begin(), g.w.end());
        out.insert(out.end(), g.u.begin(), g.u.end());
        out.insert(out.end(), g.b.begin(), g.b.end());
      }
    }
    out.insert(out.end(), readout_w_.begin(), readout_w_.end());
    out.insert(out.end(), readout_b_.begin(), readout_b_.end());
    return out;
  }

  void set_flat_parameters(const std::vector<double>& flat) {
    std::size_t pos = 0;
    auto take = [&](std::vector<double>& dst) {
      std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), dst.size(), dst.begin());
      pos += dst.size();
    };
    for (auto& cell : cells_) {
      for (auto& g : cell.gates) {
        take(g.w);
        take(g.u);
        take(g.b);
      }
    }
    take(readout_w_);
    take(readout_b_);
  }

 private:
  std::vector<LSTMCellWeights> cells_;
  std::vector<double> readout_w_;
  std::vector<double> readout_b_;
  WindowSpec spec_;
  SeriesNorm norm_;
  std::vector<double> loss_trace_;
};

// Mean squared error over all predicted elements of the given samples
// (normalized scale).
inline double lstm_loss(const LSTMNetwork& net,
                        const std::vector<std::vector<double>>& inputs,
                        const std::vector<std::vector<double>>& targets) {
  if (inputs.empty() || inputs.size() != targets.size()) {
    throw shape_error("lstm_loss: inputs and targets must be non-empty and aligned");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    const auto pred = net.forward_sequence(inputs[s]);
    for (std::size_t k = 0; k < pred.size(); ++k) {
      const double d = pred[k] - targets[s][k];
      sum += d * d;
    }
    count += pred.size();
  }
  return sum / static_cast<double>(count);
}

namespace detail {

struct LSTMGrads {
  std::vector<LSTMCellWeights> cells;  // same shapes, used as gradient storage
  std::vector<double> readout_w;
  std::vector<double> readout_b;

  static LSTMGrads zeros_like(const LSTMNetwork& net) {
    LSTMGrads g;
    g.cells = net.cells();
    for (auto& cell : g.cells) {
      for (auto& gate : cell.gates) {
        std::fill(gate.w.begin(), gate.w.end(), 0.0);
        std::fill(gate.u.begin(), gate.u.end(), 0.0);
        std::fill(gate.b.begin(), gate.b.end(), 0.0);
      }
    }
    g.readout_w.assign(net.readout_weights().size(), 0.0);
    g.readout_b.assign(net.readout_bias().size(), 0.0);
    return g;
  }

  double squared_norm() const {
    double s = 0.0;
    auto add = [&s](const std::vector<double>& v) {
      for (double x : v) s += x * x;
    };
    for (const auto& cell : cells) {
      for (const auto& gate : cell.gates) {
        add(gate.w);
        add(gate.u);
        add(gate.b);
      }
    }
    add(readout_w);
    add(readout_b);
    return s;
  }

  void scale(double f) {
    auto mul = [f](std::vector<double>& v) {
      for (double& x : v) x *= f;
    };
    for (auto& cell : cells) {
      for (auto& gate : cell.gates) {
        mul(gate.w);
        mul(gate.u);
        mul(gate.b);
      }
    }
    mul(readout_w);
    mul(readout_b);
  }
};

// Full backpropagation through time for one batch of samples. Accumulates
// parameter gradients of the batch MSE (mean over samples x lookforward)
// into `grads`; optionally reports the gradient w.r.t. the first sample's
// input window (used to probe end-to-end sensitivity).
inline void lstm_backprop_batch(const LSTMNetwork& net,
                                const std::vector<const std::vector<double>*>& inputs,
                                const std::vector<const std::vector<double>*>& targets,
                                LSTMGrads& grads,
                                std::vector<double>* first_input_grad = nullptr) {
  const auto& cells = net.cells();
  const int layers = static_cast<int>(cells.size());
  const int T = net.spec().lookback;
  const int K = net.spec().lookforward;
  const double inv = 1.0 / (static_cast<double>(inputs.size()) * static_cast<double>(K));

  // Per-layer, per-timestep forward caches for the sample being processed.
  std::vector<std::vector<CellStepCache>> cache(
      static_cast<std::size_t>(layers),
      std::vector<CellStepCache>(static_cast<std::size_t>(T)));

  for (std::size_t s = 0; s < inputs.size(); ++s) {
    const auto& window = *inputs[s];
    const auto& target = *targets[s];
    // Forward with caches.
    for (int t = 0; t < T; ++t) {
      double scalar = window[static_cast<std::size_t>(t)];
      const double* input = &scalar;
      for (int l = 0; l < layers; ++l) {
        const auto& cell = cells[static_cast<std::size_t>(l)];
        const int H = cell.hidden_size;
        static thread_local std::vector<double> zeros;
        zeros.assign(static_cast<std::size_t>(H), 0.0);
        const double* h_prev =
            t > 0 ? cache[static_cast<std::size_t>(l)][static_cast<std::size_t>(t - 1)].h.data()
                  : zeros.data();
        const double* c_prev =
            t > 0 ? cache[static_cast<std::size_t>(l)][static_cast<std::size_t>(t - 1)].c.data()
                  : zeros.data();
        auto& cc = cache[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)];
        cell_forward(cell, input, h_prev, c_prev, cc);
        input = cc.h.data();
      }
    }
    // Readout and its gradient.
    const auto& h_top = cache[static_cast<std::size_t>(layers - 1)][static_cast<std::size_t>(T - 1)].h;
    const int top_h = cells.back().hidden_size;
    std::vector<double> dy(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      double z = net.readout_bias()[static_cast<std::size_t>(k)];
      const double* wrow = &net.readout_weights()[static_cast<std::size_t>(k) *
                                                  static_cast<std::size_t>(top_h)];
      for (int j = 0; j < top_h; ++j) z += wrow[j] * h_top[static_cast<std::size_t>(j)];
      dy[static_cast<std::size_t>(k)] = 2.0 * (z - target[static_cast<std::size_t>(k)]) * inv;
    }
    // dh seeds per layer per timestep: the top layer's last step receives the
    // readout gradient; lower layers receive dx from the layer above.
    std::vector<std::vector<std::vector<double>>> dh_seed(
        static_cast<std::size_t>(layers));
    for (int l = 0; l < layers; ++l) {
      dh_seed[static_cast<std::size_t>(l)].assign(
          static_cast<std::size_t>(T),
          std::vector<double>(static_cast<std::size_t>(cells[static_cast<std::size_t>(l)].hidden_size), 0.0));
    }
    for (int k = 0; k < K; ++k) {
      const double d = dy[static_cast<std::size_t>(k)];
      const double* wrow = &net.readout_weights()[static_cast<std::size_t>(k) *
                                                  static_cast<std::size_t>(top_h)];
      auto& dst = dh_seed[static_cast<std::size_t>(layers - 1)][static_cast<std::size_t>(T - 1)];
      for (int j = 0; j < top_h; ++j) dst[static_cast<std::size_t>(j)] += wrow[j] * d;
      grads.readout_b[static_cast<std::size_t>(k)] += d;
      double* grow = &grads.readout_w[static_cast<std::size_t>(k) *
                                      static_cast<std::size_t>(top_h)];
      for (int j = 0; j < top_h; ++j) grow[j] += d * h_top[static_cast<std::size_t>(j)];
    }
    // Backward through layers, top to bottom, each over reversed time.
    for (int l = layers - 1; l >= 0; --l) {
      const auto& cell = cells[static_cast<std::size_t>(l)];
      auto& gcell = grads.cells[static_cast<std::size_t>(l)];
      const int H = cell.hidden_size;
      const int D = cell.input_size;
      std::vector<double> dh_next(static_cast<std::size_t>(H), 0.0);
      std::vector<double> dc_next(static_cast<std::size_t>(H), 0.0);
      std::vector<double> da_i(static_cast<std::size_t>(H)), da_f(static_cast<std::size_t>(H)),
          da_o(static_cast<std::size_t>(H)), da_g(static_cast<std::size_t>(H));
      for (int t = T - 1; t >= 0; --t) {
        const auto& cc = cache[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)];
        const std::vector<double>* h_prev = nullptr;
        const std::vector<double>* c_prev = nullptr;
        static thread_local std::vector<double> zero_state;
        if (t > 0) {
          h_prev = &cache[static_cast<std::size_t>(l)][static_cast<std::size_t>(t - 1)].h;
          c_prev = &cache[static_cast<std::size_t>(l)][static_cast<std::size_t>(t - 1)].c;
        } else {
          zero_state.assign(static_cast<std::size_t>(H), 0.0);
          h_prev = &zero_state;
          c_prev = &zero_state;
        }
        for (int h = 0; h < H; ++h) {
          const auto k = static_cast<std::size_t>(h);
          const double dh = dh_seed[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)][k] +
                            dh_next[k];
          const double dtan = 1.0 - cc.tanh_c[k] * cc.tanh_c[k];
          const double dc = dh * cc.o[k] * dtan + dc_next[k];
          const double do_ = dh * cc.tanh_c[k];
          const double di = dc * cc.g[k];
          const double df = dc * (*c_prev)[k];
          const double dg = dc * cc.i[k];
          da_i[k] = di * cc.i[k] * (1.0 - cc.i[k]);
          da_f[k] = df * cc.f[k] * (1.0 - cc.f[k]);
          da_o[k] = do_ * cc.o[k] * (1.0 - cc.o[k]);
          da_g[k] = dg * (1.0 - cc.g[k] * cc.g[k]);
          dc_next[k] = dc * cc.f[k];
        }
        const std::array<const std::vector<double>*, 4> das = {&da_i, &da_f, &da_o, &da_g};
        std::fill(dh_next.begin(), dh_next.end(), 0.0);
        std::vector<double>* dx_dst = nullptr;
        if (l > 0) {
          dx_dst = &dh_seed[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(t)];
        } else if (first_input_grad && s == 0) {
          dx_dst = nullptr;  // handled below with scalar input
        }
        double dx_scalar = 0.0;
        for (std::size_t g = 0; g < 4; ++g) {
          const auto& da = *das[g];
          auto& gate = gcell.gates[g];
          const auto& wgate = cell.gates[g];
          for (int h = 0; h < H; ++h) {
            const double d = da[static_cast<std::size_t>(h)];
            gate.b[static_cast<std::size_t>(h)] += d;
            double* gw = &gate.w[static_cast<std::size_t>(h) * static_cast<std::size_t>(D)];
            double* gu = &gate.u[static_cast<std::size_t>(h) * static_cast<std::size_t>(H)];
            const double* ww = &wgate.w[static_cast<std::size_t>(h) * static_cast<std::size_t>(D)];
            const double* wu = &wgate.u[static_cast<std::size_t>(h) * static_cast<std::size_t>(H)];
            for (int dcol = 0; dcol < D; ++dcol) {
              gw[dcol] += d * cc.x[static_cast<std::size_t>(dcol)];
            }
            for (int j = 0; j < H; ++j) {
              gu[j] += d * (*h_prev)[static_cast<std::size_t>(j)];
              dh_next[static_cast<std::size_t>(j)] += wu[j] * d;
            }
            if (dx_dst) {
              for (int dcol = 0; dcol < D; ++dcol) {
                (*dx_dst)[static_cast<std::size_t>(dcol)] += ww[dcol] * d;
              }
            } else if (l == 0) {
              dx_scalar += ww[0] * d;
            }
          }
        }
        if (l == 0 && first_input_grad && s == 0) {
          (*first_input_grad)[static_cast<std::size_t>(t)] = dx_scalar;
        }
      }
    }
  }
}

}  // namespace detail

// Mini-batch SGD with full backpropagation through time and global gradient
// norm clipping at 1.0. Tracks the full-training loss per epoch and returns
// the best parameters seen; stops early once the best loss has not improved
// by `tol` for 20 consecutive epochs.
inline LSTMNetwork train_lstm(const WindowSet& windows, LSTMNetwork network,
                              const LSTMTrainParams& params) {
  if (windows.inputs.empty()) throw precondition_error("train_lstm: no samples");
  if (params.epochs < 0) throw config_error("epochs must be >= 0");
  if (params.batch_size < 1) throw config_error("batch_size must be >= 1");
  network.set_norm(windows.norm);
  const std::size_t n = windows.inputs.size();
  const std::size_t batch =
      std::min<std::size_t>(static_cast<std::size_t>(params.batch_size), n);

  LSTMNetwork best = network;
  double best_loss = std::numeric_limits<double>::infinity();
  int stall = 0;
  std::vector<double> trace;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(Rng::derive(params.seed, 0x10a3ULL));

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle(order, shuffle_rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      std::vector<const std::vector<double>*> bi, bt;
      bi.reserve(stop - start);
      bt.reserve(stop - start);
      for (std::size_t k = start; k < stop; ++k) {
        bi.push_back(&windows.inputs[order[k]]);
        bt.push_back(&windows.targets[order[k]]);
      }
      auto grads = detail::LSTMGrads::zeros_like(network);
      detail::lstm_backprop_batch(network, bi, bt, grads);
      const double norm = std::sqrt(grads.squared_norm());
      if (norm > 1.0) grads.scale(1.0 / norm);
      auto& cells = network.cells();
      for (std::size_t l = 0; l < cells.size(); ++l) {
        for (std::size_t g = 0; g < 4; ++g) {
          auto& gate = cells[l].gates[g];
          const auto& ggate = grads.cells[l].gates[g];
          for (std::size_t k = 0; k < gate.w.size(); ++k) gate.w[k] -= params.learning_rate * ggate.w[k];
          for (std::size_t k = 0; k < gate.u.size(); ++k) gate.u[k] -= params.learning_rate * ggate.u[k];
          for (std::size_t k = 0; k < gate.b.size(); ++k) gate.b[k] -= params.learning_rate * ggate.b[k];
        }
      }
      auto& rw = network.readout_weights();
      for (std::size_t k = 0; k < rw.size(); ++k) rw[k] -= params.learning_rate * grads.readout_w[k];
      auto& rb = network.readout_bias();
      for (std::size_t k = 0; k < rb.size(); ++k) rb[k] -= params.learning_rate * grads.readout_b[k];
    }
    const double loss = lstm_loss(network, windows.inputs, windows.targets);
    if (!std::isfinite(loss)) {
      throw training_error("train_lstm: loss diverged at epoch " + std::to_string(epoch));
    }
    trace.push_back(loss);
    if (best_loss - loss >= params.tol) {
      best_loss = loss;
      best = network;
      stall = 0;
    } else {
      ++stall;
      if (stall >= 20) break;
    }
  }
  if (best_loss == std::numeric_limits<double>::infinity()) best = network;
  best.set_loss_trace(std::move(trace));
  best.set_norm(windows.norm);
  return best;
}

// Largest relative disagreement between BPTT and central finite differences
// of lstm_loss over every parameter.
inline double lstm_gradient_check(const LSTMNetwork& network,
                                  const std::vector<std::vector<double>>& inputs,
                                  const std::vector<std::vector<double>>& targets,
                                  double epsilon = 1e-5) {
  std::vector<const std::vector<double>*> pi, pt;
  for (const auto& v : inputs) pi.push_back(&v);
  for (const auto& v : targets) pt.push_back(&v);
  auto grads = detail::LSTMGrads::zeros_like(network);
  detail::lstm_backprop_batch(network, pi, pt, grads);
  std::vector<double> flat_grad;
  for (const auto& cell : grads.cells) {
    for (const auto& g : cell.gates) {
      flat_grad.insert(flat_grad.end(), g.w.begin(), g.w.end());
      flat_grad.insert(flat_grad.end(), g.u.begin(), g.u.end());
      flat_grad.insert(flat_grad.end(), g.b.begin(), g.b.end());
    }
  }
  flat_grad.insert(flat_grad.end(), grads.readout_w.begin(), grads.readout_w.end());
  flat_grad.insert(flat_grad.end(), grads.readout_b.begin(), grads.readout_b.end());

  LSTMNetwork probe = network;
  std::vector<double> theta = network.flat_parameters();
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + epsilon;
    probe.set_flat_parameters(theta);
    const double up = lstm_loss(probe, inputs, targets);
    theta[i] = saved - epsilon;
    probe.set_flat_parameters(theta);
    const double down = lstm_loss(probe, inputs, targets);
    theta[i] = saved;
    const double fd = (up - down) / (2.0 * epsilon);
    const double denom = std::max(1e-8, std::abs(flat_grad[i]) + std::abs(fd));
    worst = std::max(worst, std::abs(flat_grad[i] - fd) / denom);
  }
  return worst;
}

// Gradient of the loss w.r.t. each element of a single input window; probes
// that signals anywhere in the window reach the output.
inline std::vector<double> lstm_input_gradient(const LSTMNetwork& network,
                                               const std::vector<double>& input,
                                               const std::vector<double>& target) {
  std::vector<const std::vector<double>*> pi{&input};
  std::vector<const std::vector<double>*> pt{&target};
  auto grads = detail::LSTMGrads::zeros_like(network);
  std::vector<double> dx(input.size(), 0.0);
  detail::lstm_backprop_batch(network, pi, pt, grads, &dx);
  return dx;
}

enum class ForecastMode { one_step, multi_step };

inline ForecastMode parse_forecast_mode(std::string_view token) {
  if (token == "one_step") return ForecastMode::one_step;
  if (token == "multi_step") return ForecastMode::multi_step;
  throw config_error("forecast mode must be one_step or multi_step");
}

struct SeriesForecast {
  std::vector<Date> dates;
  std::vector<double> values;
};

// one_step: predict each of the last `steps` days of `series` from the true
// lookback window that precedes it (first readout element only).
// multi_step: start from the final lookback window of `series` and emit
// blocks of lookforward values after its end, feeding predictions back in
// until `steps` values exist.
inline SeriesForecast lstm_forecast(const LSTMNetwork& network,
                                    const DailySeries& series, int steps,
                                    ForecastMode mode) {
  if (steps < 1) throw config_error("steps must be >= 1");
  const auto& spec = network.spec();
  const auto values = series.dense_values();
  const auto& norm = network.norm();
  std::vector<double> nv(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) nv[i] = norm.normalize(values[i]);

  SeriesForecast out;
  if (mode == ForecastMode::one_step) {
    const std::size_t n = nv.size();
    if (n < static_cast<std::size_t>(steps) + static_cast<std::size_t>(spec.lookback)) {
      throw precondition_error(
          "one-step forecasting " + std::to_string(steps) + " days needs " +
          std::to_string(steps + spec.lookback) + " known values, have " +
          std::to_string(n));
    }
    for (std::size_t j = n - static_cast<std::size_t>(steps); j < n; ++j) {
      std::vector<double> window(nv.begin() + static_cast<std::ptrdiff_t>(j - static_cast<std::size_t>(spec.lookback)),
                                 nv.begin() + static_cast<std::ptrdiff_t>(j));
      out.values.push_back(norm.denormalize(network.forward_sequence(window)[0]));
      out.dates.push_back(series.date_at(j));
    }
    return out;
  }
  if (nv.size() < static_cast<std::size_t>(spec.lookback)) {
    throw precondition_error("multi-step forecasting needs at least lookback (" +
                             std::to_string(spec.lookback) + ") known values");
  }
  std::vector<double> window(nv.end() - spec.lookback, nv.end());
  std::vector<double> produced;
  while (produced.size() < static_cast<std::size_t>(steps)) {
    const auto block = network.forward_sequence(window);
    for (double v : block) {
      produced.push_back(v);
      window.erase(window.begin());
      window.push_back(v);
    }
  }
  produced.resize(static_cast<std::size_t>(steps));
  const Date first = series.end_date() + 1;
  for (int j = 0; j < steps; ++j) {
    out.dates.push_back(first + j);
    out.values.push_back(norm.denormalize(produced[static_cast<std::size_t>(j)]));
  }
  return out;
}

}  // namespace tollcast
