#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcnn/dataset.hpp"
#include "pcnn/matrix.hpp"
#include "pcnn/rng.hpp"

namespace pcnn {

enum class Activation : std::uint8_t { relu, sigmoid, tanh, identity };
enum class Loss : std::uint8_t { mae, mse, binary_cross_entropy };
enum class TrainMode : std::uint8_t { gradient, random_readout };

const char* to_string(Activation a);
const char* to_string(Loss l);
Activation activation_from_string(const std::string& s);
Loss loss_from_string(const std::string& s);

/// Feedforward network: affine maps with a fixed hidden activation and an
/// affine readout. weights[j] has shape dims[j] x dims[j+1]; biases[j] is a
/// 1 x dims[j+1] row.
struct Mlp {
  std::vector<std::size_t> layer_dims;
  std::vector<Matrix> weights;
  std::vector<Matrix> biases;
  Activation activation = Activation::relu;

  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t output_dim() const { return layer_dims.back(); }
  std::size_t n_layers() const { return weights.size(); }
};

struct TrainConfig {
  TrainMode mode = TrainMode::gradient;
  Activation activation = Activation::relu;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double ridge_lambda = 1e-6;
  std::uint64_t seed = 0;
  Loss loss = Loss::mse;
};

struct TrainStats {
  std::vector<double> epoch_loss;  // mean training loss per epoch
  double first_epoch_loss = 0.0;
  double final_epoch_loss = 0.0;
};

Matrix forward(const Mlp& model, const Matrix& inputs);
std::vector<double> forward_row(const Mlp& model, std::span<const double> x);

std::size_t parameter_count(const Mlp& model);

/// -[l*ln(p) + (1-l)*ln(1-p)] with p clamped into [1e-12, 1 - 1e-12].
double binary_cross_entropy(double pred, double label);

/// Zero-initialized network with the given shape.
Mlp make_mlp(std::vector<std::size_t> dims, Activation act);

/// Gradient-mode start: weights ~ N(0, 1/fan_in) (doubled for relu), zero biases.
Mlp init_gradient_start(const std::vector<std::size_t>& dims, Activation act, Rng& rng);

/// Random-feature start: hidden weights ~ N(0, 1)/sqrt(fan_in), hidden biases
/// uniform in [-1, 1], readout zeroed until fit_readout_ridge runs.
Mlp init_random_features(const std::vector<std::size_t>& dims, Activation act, Rng& rng);

/// Ridge-fits the affine readout on frozen hidden features.
void fit_readout_ridge(Mlp& model, const Matrix& inputs, const Matrix& targets,
                       double lambda);

/// Mean training loss over all rows (batch aggregate of the per-sample loss).
double loss_value(const Mlp& model, const Matrix& inputs, const Matrix& targets,
                  Loss loss);

/// Analytic parameter gradients of loss_value; layouts mirror weights/biases.
void loss_gradients(const Mlp& model, const Matrix& inputs, const Matrix& targets,
                    Loss loss, std::vector<Matrix>& grad_w,
                    std::vector<Matrix>& grad_b, double* loss_out = nullptr);

/// Trains on every row of `data`. Gradient mode runs mini-batch Adam on the
/// configured loss; random_readout freezes random hidden layers and ridge-fits
/// the readout. Throws on empty data or a non-finite training loss.
Mlp train_ffnn(const Dataset& data, const TrainConfig& config,
               const std::vector<std::size_t>& dims, TrainStats* stats = nullptr);

/// Max relative error between analytic gradients and central finite
/// differences (step 1e-5), over all parameters. Intended for small nets.
double gradient_check(const Mlp& model, const Matrix& inputs, const Matrix& targets,
                      Loss loss);

/// FNV-1a over the raw bytes of all hidden-layer parameters; the readout is
/// excluded so random_readout fits can be shown to leave hidden layers alone.
std::uint64_t hidden_parameter_hash(const Mlp& model);

}  // namespace pcnn
