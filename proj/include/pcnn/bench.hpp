#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcnn/datagen.hpp"
#include "pcnn/dataset.hpp"
#include "pcnn/pcnn_model.hpp"
#include "pcnn/serialize.hpp"

namespace pcnn {

double metric_mae(const Matrix& pred, const Matrix& truth);
double metric_mse(const Matrix& pred, const Matrix& truth);

/// Mean over rows of ||pred - truth|| / ||truth||; rows with zero truth norm
/// are skipped and counted. Throws when every row is skipped.
double metric_mape(const Matrix& pred, const Matrix& truth,
                   std::size_t* skipped = nullptr);

enum class BenchModel : std::uint8_t { ffnn, ffnn_rnd, ffnn_bag, ffnn_lgt, pcnn };

const char* to_string(BenchModel m);
BenchModel bench_model_from_string(const std::string& s);

/// Bagged benchmark: one FFNN per part, combined by an unconditional sum.
BagModel build_ffnn_bag(const DataPartition& partition, const Dataset& train_data,
                        const PcnnTrainConfig& config);

/// PCNN structure with the deep classifier replaced by a single affine layer
/// (a logistic model per part); same label rule and routing.
PcnnModel build_ffnn_lgt(const DataPartition& partition, const Dataset& train_data,
                         const PcnnTrainConfig& config);

struct ExperimentMeta {
  std::size_t d = 0;
  std::size_t n_data = 0;
  double sigma = 0.0;
  double nu = 0.0;
  double r = 0.0;
  std::uint64_t seed = 0;
};

struct ReportRow {
  std::string model;
  bool ok = true;
  std::string error;
  double mae = 0.0, mse = 0.0, mape = 0.0;
  std::size_t mape_skipped = 0;
  double p_time_s = 0.0;  // subpattern phase run with the configured jobs
  double l_time_s = 0.0;  // subpattern phase run sequentially
  std::size_t params_total = 0;
  double params_per_input = 0.0;
  std::size_t n_parts = 1;
  std::size_t hidden_neurons = 0;
};

struct BenchmarkReport {
  ExperimentMeta meta;
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, double>> sweep_point;  // set by ablate
};

struct BenchConfig {
  PcnnTrainConfig train;
  // When nonzero, subpattern hidden layers are a single layer splitting this
  // many neurons evenly across parts (remainder to the first parts); the FFNN
  // rows get the whole budget.
  std::size_t budget_total_hidden = 0;
};

/// Evenly splits `total` hidden neurons over n parts, remainder first.
std::vector<std::vector<std::size_t>> split_budget(std::size_t total,
                                                   std::size_t n_parts);

/// Trains every requested model on the train rows, evaluates on the test
/// rows, and measures sequential vs concurrent subpattern wall-clock. A model
/// failure is recorded in its row and the run continues.
BenchmarkReport run_experiment(const std::vector<BenchModel>& models,
                               const Dataset& data, const BenchConfig& config,
                               const ExperimentMeta& meta);

struct AblateConfig {
  std::vector<BenchModel> models;
  BenchConfig bench;
  // Data source: a synthetic spec (data params sweepable) or a fixed dataset.
  SyntheticSpec synth;
  std::optional<Dataset> fixed_data;
  double test_fraction = 0.2;
  // Cartesian sweep over {n_parts, sigma, nu, r, n_data}.
  std::vector<std::pair<std::string, std::vector<double>>> sweep;
};

std::vector<BenchmarkReport> ablate(const AblateConfig& config);

void write_report_csv(const std::vector<BenchmarkReport>& reports,
                      const std::string& path);
std::string format_report_table(const BenchmarkReport& report);

}  // namespace pcnn
