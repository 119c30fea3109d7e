#include "pcnn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "pcnn/linalg.hpp"

namespace pcnn {

const char* to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  return "?";
}

const char* to_string(Loss l) {
  switch (l) {
    case Loss::mae: return "mae";
    case Loss::mse: return "mse";
    case Loss::binary_cross_entropy: return "bce";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "tanh") return Activation::tanh;
  if (s == "identity") return Activation::identity;
  throw std::invalid_argument("unknown activation: " + s);
}

Loss loss_from_string(const std::string& s) {
  if (s == "mae") return Loss::mae;
  if (s == "mse") return Loss::mse;
  if (s == "bce" || s == "binary_cross_entropy") return Loss::binary_cross_entropy;
  throw std::invalid_argument("unknown loss: " + s);
}

namespace {

double activate(double z, Activation a) {
  switch (a) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::sigmoid: return sigmoid(z);
    case Activation::tanh: return std::tanh(z);
    case Activation::identity: return z;
  }
  return z;
}

// Derivative expressed through the post-activation value.
double activate_grad(double a_val, Activation a) {
  switch (a) {
    case Activation::relu: return a_val > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return a_val * (1.0 - a_val);
    case Activation::tanh: return 1.0 - a_val * a_val;
    case Activation::identity: return 1.0;
  }
  return 1.0;
}

Matrix affine(const Matrix& x, const Matrix& w, const Matrix& b) {
  Matrix z = matmul(x, w);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto zi = z.row(i);
    const auto bb = b.row(0);
    for (std::size_t j = 0; j < z.cols(); ++j) zi[j] += bb[j];
  }
  return z;
}

void apply_activation(Matrix& z, Activation a) {
  if (a == Activation::identity) return;
  double* p = z.data();
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = activate(p[i], a);
}

// Per-sample losses are summed over output dims and averaged over rows.
// For binary_cross_entropy the network output is a logit per dimension.
double output_loss(const Matrix& out, const Matrix& y, Loss loss) {
  const std::size_t n = out.rows();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      const double p = out(i, j), t = y(i, j);
      switch (loss) {
        case Loss::mae: total += std::abs(p - t); break;
        case Loss::mse: total += (p - t) * (p - t); break;
        case Loss::binary_cross_entropy:
          total += binary_cross_entropy(sigmoid(p), t);
          break;
      }
    }
  }
  return total / static_cast<double>(n);
}

// Preallocated per-batch buffers; the training loop reuses them every step so
// the hot path performs no heap traffic (matters when many subpatterns train
// concurrently).
struct BatchWorkspace {
  Matrix bx, by;
  std::vector<Matrix> acts;    // acts[j]: output of layer j (post-activation)
  std::vector<Matrix> deltas;  // deltas[j]: dL/d(pre-activation of layer j)
  std::vector<Matrix> gw, gb;

  BatchWorkspace(const Mlp& m, std::size_t batch, std::size_t d, std::size_t out) {
    bx = Matrix(batch, d);
    by = Matrix(batch, out);
    for (std::size_t j = 0; j < m.n_layers(); ++j) {
      acts.emplace_back(batch, m.layer_dims[j + 1]);
      deltas.emplace_back(batch, m.layer_dims[j + 1]);
      gw.emplace_back(m.weights[j].rows(), m.weights[j].cols());
      gb.emplace_back(1, m.biases[j].cols());
    }
  }
};

void affine_into(const Matrix& x, const Matrix& w, const Matrix& b, Matrix& out) {
  const std::size_t n = x.rows(), k = x.cols(), m = w.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* oi = out.data() + i * m;
    const double* bb = b.data();
    for (std::size_t j = 0; j < m; ++j) oi[j] = bb[j];
    const double* xi = x.data() + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double xv = xi[p];
      if (xv == 0.0) continue;
      const double* wp = w.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) oi[j] += xv * wp[j];
    }
  }
}

// Gradients and loss for one batch, all results written into the workspace.
double backprop_batch(const Mlp& m, BatchWorkspace& ws, Loss loss) {
  const Matrix* prev = &ws.bx;
  for (std::size_t j = 0; j < m.n_layers(); ++j) {
    affine_into(*prev, m.weights[j], m.biases[j], ws.acts[j]);
    if (j + 1 < m.n_layers()) apply_activation(ws.acts[j], m.activation);
    prev = &ws.acts[j];
  }
  const Matrix& out = ws.acts.back();
  const double batch_loss = output_loss(out, ws.by, loss);

  const double inv_n = 1.0 / static_cast<double>(out.rows());
  Matrix& last_delta = ws.deltas.back();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      const double p = out(i, j), t = ws.by(i, j);
      double g = 0.0;
      switch (loss) {
        case Loss::mae: {
          const double r = p - t;
          g = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
          break;
        }
        case Loss::mse: g = 2.0 * (p - t); break;
        case Loss::binary_cross_entropy: g = sigmoid(p) - t; break;
      }
      last_delta(i, j) = g * inv_n;
    }
  }

  for (std::size_t jj = m.n_layers(); jj > 0; --jj) {
    const std::size_t j = jj - 1;
    const Matrix& input = j == 0 ? ws.bx : ws.acts[j - 1];
    const Matrix& delta = ws.deltas[j];

    Matrix& gw = ws.gw[j];
    std::fill(gw.data(), gw.data() + gw.size(), 0.0);
    for (std::size_t i = 0; i < input.rows(); ++i) {
      const double* xi = input.data() + i * input.cols();
      const double* di = delta.data() + i * delta.cols();
      for (std::size_t r = 0; r < input.cols(); ++r) {
        const double xv = xi[r];
        if (xv == 0.0) continue;
        double* gr = gw.data() + r * delta.cols();
        for (std::size_t c = 0; c < delta.cols(); ++c) gr[c] += xv * di[c];
      }
    }
    Matrix& gb = ws.gb[j];
    std::fill(gb.data(), gb.data() + gb.size(), 0.0);
    for (std::size_t i = 0; i < delta.rows(); ++i)
      for (std::size_t c = 0; c < delta.cols(); ++c) gb(0, c) += delta(i, c);

    if (j == 0) break;
    Matrix& prev_delta = ws.deltas[j - 1];
    for (std::size_t i = 0; i < prev_delta.rows(); ++i) {
      const double* di = delta.data() + i * delta.cols();
      double* pi = prev_delta.data() + i * prev_delta.cols();
      const double* wj = m.weights[j].data();
      for (std::size_t r = 0; r < prev_delta.cols(); ++r) {
        const double* wr = wj + r * delta.cols();
        double s = 0.0;
        for (std::size_t c = 0; c < delta.cols(); ++c) s += di[c] * wr[c];
        pi[r] = s * activate_grad(ws.acts[j - 1](i, r), m.activation);
      }
    }
  }
  return batch_loss;
}


}  // namespace

Matrix forward(const Mlp& model, const Matrix& inputs) {
  if (inputs.cols() != model.input_dim())
    throw std::invalid_argument("forward: input dim " + std::to_string(inputs.cols()) +
                                " != model dim " + std::to_string(model.input_dim()));
  Matrix a = inputs;
  for (std::size_t j = 0; j < model.n_layers(); ++j) {
    a = affine(a, model.weights[j], model.biases[j]);
    if (j + 1 < model.n_layers()) apply_activation(a, model.activation);
  }
  return a;
}

std::vector<double> forward_row(const Mlp& model, std::span<const double> x) {
  Matrix in(1, x.size());
  std::copy(x.begin(), x.end(), in.row(0).begin());
  const Matrix out = forward(model, in);
  return {out.row(0).begin(), out.row(0).end()};
}

std::size_t parameter_count(const Mlp& model) {
  std::size_t n = 0;
  for (std::size_t j = 0; j + 1 < model.layer_dims.size(); ++j)
    n += model.layer_dims[j] * model.layer_dims[j + 1] + model.layer_dims[j + 1];
  return n;
}

double binary_cross_entropy(double pred, double label) {
  constexpr double kEps = 1e-12;
  const double p = std::clamp(pred, kEps, 1.0 - kEps);
  return -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
}

Mlp make_mlp(std::vector<std::size_t> dims, Activation act) {
  if (dims.size() < 2) throw std::invalid_argument("make_mlp: need at least [d, D]");
  for (auto w : dims)
    if (w == 0) throw std::invalid_argument("make_mlp: zero-width layer");
  Mlp m;
  m.layer_dims = std::move(dims);
  m.activation = act;
  for (std::size_t j = 0; j + 1 < m.layer_dims.size(); ++j) {
    m.weights.emplace_back(m.layer_dims[j], m.layer_dims[j + 1]);
    m.biases.emplace_back(1, m.layer_dims[j + 1]);
  }
  return m;
}

Mlp init_gradient_start(const std::vector<std::size_t>& dims, Activation act, Rng& rng) {
  Mlp m = make_mlp(dims, act);
  for (std::size_t j = 0; j < m.n_layers(); ++j) {
    const double fan_in = static_cast<double>(m.layer_dims[j]);
    const double gain = act == Activation::relu ? 2.0 : 1.0;
    const double std_dev = std::sqrt(gain / fan_in);
    double* w = m.weights[j].data();
    for (std::size_t i = 0; i < m.weights[j].size(); ++i)
      w[i] = std_dev * sample_gaussian_scalar(rng);
  }
  return m;
}

Mlp init_random_features(const std::vector<std::size_t>& dims, Activation act, Rng& rng) {
  Mlp m = make_mlp(dims, act);
  // Hidden layers only; the readout stays zero until the ridge fit.
  for (std::size_t j = 0; j + 1 < m.n_layers(); ++j) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(m.layer_dims[j]));
    double* w = m.weights[j].data();
    for (std::size_t i = 0; i < m.weights[j].size(); ++i)
      w[i] = scale * sample_gaussian_scalar(rng);
    double* b = m.biases[j].data();
    for (std::size_t i = 0; i < m.biases[j].size(); ++i)
      b[i] = sample_uniform(rng, -1.0, 1.0);
  }
  return m;
}

void fit_readout_ridge(Mlp& model, const Matrix& inputs, const Matrix& targets,
                       double lambda) {
  // Features = output of the last hidden layer (or the raw inputs for a
  // single affine map), augmented with a ones column for the bias.
  Matrix feats = inputs;
  for (std::size_t j = 0; j + 1 < model.n_layers(); ++j) {
    feats = affine(feats, model.weights[j], model.biases[j]);
    apply_activation(feats, model.activation);
  }
  Matrix aug(feats.rows(), feats.cols() + 1);
  for (std::size_t i = 0; i < feats.rows(); ++i) {
    auto dst = aug.row(i);
    const auto src = feats.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
    dst[feats.cols()] = 1.0;
  }
  const Matrix w = ridge_solve(aug, targets, lambda);
  Matrix& readout = model.weights.back();
  Matrix& bias = model.biases.back();
  for (std::size_t i = 0; i < feats.cols(); ++i)
    for (std::size_t j = 0; j < readout.cols(); ++j) readout(i, j) = w(i, j);
  for (std::size_t j = 0; j < bias.cols(); ++j) bias(0, j) = w(feats.cols(), j);
}

double loss_value(const Mlp& model, const Matrix& inputs, const Matrix& targets,
                  Loss loss) {
  return output_loss(forward(model, inputs), targets, loss);
}

void loss_gradients(const Mlp& model, const Matrix& inputs, const Matrix& targets,
                    Loss loss, std::vector<Matrix>& grad_w,
                    std::vector<Matrix>& grad_b, double* loss_out) {
  if (inputs.rows() == 0) throw std::invalid_argument("loss_gradients: empty batch");
  BatchWorkspace ws(model, inputs.rows(), inputs.cols(), targets.cols());
  ws.bx = inputs;
  ws.by = targets;
  const double batch_loss = backprop_batch(model, ws, loss);
  if (loss_out) *loss_out = batch_loss;
  grad_w = std::move(ws.gw);
  grad_b = std::move(ws.gb);
}

namespace {

struct AdamState {
  std::vector<Matrix> m_w, v_w, m_b, v_b;
  std::size_t t = 0;

  explicit AdamState(const Mlp& model) {
    for (std::size_t j = 0; j < model.n_layers(); ++j) {
      m_w.emplace_back(model.weights[j].rows(), model.weights[j].cols());
      v_w.emplace_back(model.weights[j].rows(), model.weights[j].cols());
      m_b.emplace_back(1, model.biases[j].cols());
      v_b.emplace_back(1, model.biases[j].cols());
    }
  }

  static void update(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v,
                     const TrainConfig& c, double bc1, double bc2) {
    double* p = param.data();
    const double* g = grad.data();
    double* mp = m.data();
    double* vp = v.data();
    for (std::size_t i = 0; i < param.size(); ++i) {
      mp[i] = c.adam_beta1 * mp[i] + (1.0 - c.adam_beta1) * g[i];
      vp[i] = c.adam_beta2 * vp[i] + (1.0 - c.adam_beta2) * g[i] * g[i];
      const double mhat = mp[i] / bc1;
      const double vhat = vp[i] / bc2;
      p[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.adam_eps);
    }
  }

  void step(Mlp& model, const std::vector<Matrix>& gw, const std::vector<Matrix>& gb,
            const TrainConfig& c) {
    ++t;
    const double bc1 = 1.0 - std::pow(c.adam_beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(c.adam_beta2, static_cast<double>(t));
    for (std::size_t j = 0; j < model.n_layers(); ++j) {
      update(model.weights[j], gw[j], m_w[j], v_w[j], c, bc1, bc2);
      update(model.biases[j], gb[j], m_b[j], v_b[j], c, bc1, bc2);
    }
  }
};

Mlp train_gradient(const Dataset& data, const TrainConfig& cfg,
                   const std::vector<std::size_t>& dims, TrainStats* stats) {
  Rng rng(cfg.seed);
  Mlp model = init_gradient_start(dims, cfg.activation, rng);
  AdamState adam(model);

  const std::size_t n = data.n_rows();
  const std::size_t batch = std::min<std::size_t>(std::max<std::size_t>(cfg.batch_size, 1), n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  const std::size_t remainder = n % batch;
  BatchWorkspace full(model, batch, data.input_dim(), data.target_dim());
  BatchWorkspace tail(model, remainder ? remainder : 1, data.input_dim(),
                      data.target_dim());

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(order, rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      BatchWorkspace& ws = len == batch ? full : tail;
      for (std::size_t k = 0; k < len; ++k) {
        const auto src_x = data.inputs.row(order[start + k]);
        const auto src_y = data.targets.row(order[start + k]);
        std::copy(src_x.begin(), src_x.end(), ws.bx.row(k).begin());
        std::copy(src_y.begin(), src_y.end(), ws.by.row(k).begin());
      }
      const double batch_loss = backprop_batch(model, ws, cfg.loss);
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("train_ffnn: non-finite loss at epoch " +
                                 std::to_string(epoch) + "; training aborted");
      epoch_loss += batch_loss * static_cast<double>(len);
      adam.step(model, ws.gw, ws.gb, cfg);
    }
    epoch_loss /= static_cast<double>(n);
    if (stats) stats->epoch_loss.push_back(epoch_loss);
  }
  if (stats && !stats->epoch_loss.empty()) {
    stats->first_epoch_loss = stats->epoch_loss.front();
    stats->final_epoch_loss = stats->epoch_loss.back();
  }
  return model;
}

Mlp train_random_readout(const Dataset& data, const TrainConfig& cfg,
                         const std::vector<std::size_t>& dims, TrainStats* stats) {
  Rng rng(cfg.seed);
  Mlp model = init_random_features(dims, cfg.activation, rng);
  fit_readout_ridge(model, data.inputs, data.targets, cfg.ridge_lambda);
  const double final_loss = loss_value(model, data.inputs, data.targets, cfg.loss);
  if (!std::isfinite(final_loss))
    throw std::runtime_error("train_ffnn: non-finite loss after readout fit");
  if (stats) {
    stats->epoch_loss = {final_loss};
    stats->first_epoch_loss = final_loss;
    stats->final_epoch_loss = final_loss;
  }
  return model;
}

}  // namespace

Mlp train_ffnn(const Dataset& data, const TrainConfig& config,
               const std::vector<std::size_t>& dims, TrainStats* stats) {
  data.validate();
  if (data.n_rows() == 0) throw std::invalid_argument("train_ffnn: empty dataset");
  if (dims.size() < 2 || dims.front() != data.input_dim() ||
      dims.back() != data.target_dim())
    throw std::invalid_argument("train_ffnn: dims must run from input dim to target dim");
  if (config.mode == TrainMode::gradient && !(config.learning_rate > 0.0))
    throw std::invalid_argument("train_ffnn: learning_rate must be > 0 in gradient mode");
  if (config.mode == TrainMode::random_readout && config.ridge_lambda < 0.0)
    throw std::invalid_argument("train_ffnn: ridge_lambda must be >= 0");

  return config.mode == TrainMode::gradient
             ? train_gradient(data, config, dims, stats)
             : train_random_readout(data, config, dims, stats);
}

double gradient_check(const Mlp& model, const Matrix& inputs, const Matrix& targets,
                      Loss loss) {
  std::vector<Matrix> gw, gb;
  loss_gradients(model, inputs, targets, loss, gw, gb);

  constexpr double kStep = 1e-5;
  double max_rel = 0.0;
  Mlp probe = model;
  auto check_entry = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + kStep;
    const double lp = loss_value(probe, inputs, targets, loss);
    param = saved - kStep;
    const double lm = loss_value(probe, inputs, targets, loss);
    param = saved;
    const double fd = (lp - lm) / (2.0 * kStep);
    const double denom = std::max({std::abs(analytic), std::abs(fd), 1e-6});
    max_rel = std::max(max_rel, std::abs(analytic - fd) / denom);
  };
  for (std::size_t j = 0; j < model.n_layers(); ++j) {
    for (std::size_t i = 0; i < probe.weights[j].size(); ++i)
      check_entry(probe.weights[j].data()[i], gw[j].data()[i]);
    for (std::size_t i = 0; i < probe.biases[j].size(); ++i)
      check_entry(probe.biases[j].data()[i], gb[j].data()[i]);
  }
  return max_rel;
}

std::uint64_t hidden_parameter_hash(const Mlp& model) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const Matrix& m) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
    for (std::size_t i = 0; i < m.size() * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (std::size_t j = 0; j + 1 < model.n_layers(); ++j) {
    mix(model.weights[j]);
    mix(model.biases[j]);
  }
  return h;
}

}  // namespace pcnn
