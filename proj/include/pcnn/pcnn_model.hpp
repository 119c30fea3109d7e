#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcnn/dataset.hpp"
#include "pcnn/matrix.hpp"
#include "pcnn/mlp.hpp"
#include "pcnn/partition.hpp"

namespace pcnn {

/// How the discontinuous unit combines subpattern outputs.
///
/// paper_literal sums every subpattern whose thresholded sigmoid fires, which
/// can double-count or drop inputs; argmax always routes to the single
/// highest-scoring subpattern and so partitions the input space.
enum class Routing : std::uint8_t { paper_literal, argmax };

const char* to_string(Routing r);
Routing routing_from_string(const std::string& s);

/// N subpattern networks glued over deep zero-sets of one classifier network.
struct PcnnModel {
  std::vector<Mlp> subpatterns;  // each d -> D
  Mlp classifier;                // d -> N
  double gamma = 0.5;            // in (0, 1]
  Routing routing = Routing::argmax;

  std::size_t n_parts() const { return subpatterns.size(); }
  std::size_t input_dim() const { return classifier.input_dim(); }
  std::size_t output_dim() const { return subpatterns.front().output_dim(); }

  void validate() const;
};

/// l(n, x) = 1 iff subpattern n attains the minimal per-sample loss at row x;
/// ties produce several ones per column.
struct PartLabels {
  Matrix l;  // n_parts x n_rows

  std::size_t n_parts() const { return l.rows(); }
  std::size_t n_rows() const { return l.cols(); }
};

struct PcnnTrainConfig {
  TrainConfig subpattern;  // loss doubles as the label rule's per-sample loss
  TrainConfig classifier;  // loss forced to binary_cross_entropy
  std::vector<std::size_t> subpattern_hidden = {64};
  std::vector<std::size_t> classifier_hidden = {64};
  // Overrides subpattern_hidden per part when nonempty (equal-budget sweeps).
  std::vector<std::vector<std::size_t>> per_part_hidden;
  std::size_t n_parts_hint = 0;  // 0 = take N from GET_PARTITION as-is
  double q = 0.5;
  double gamma = 0.5;
  Routing routing = Routing::argmax;
  int jobs = 1;
  std::uint64_t seed = 0;
};

/// Everything the trainer measured along the way; wall-clock covers the
/// subpattern phase only (partition and classifier are timed separately).
struct PcnnTrainInfo {
  DataPartition partition;
  PartLabels labels;
  double partition_seconds = 0.0;
  double subpattern_seconds = 0.0;
  double classifier_seconds = 0.0;
  std::vector<double> per_subpattern_seconds;
};

/// Entry n is true iff sigmoid(classifier(x)_n) > gamma.
std::vector<bool> deep_zero_set_membership(const PcnnModel& model,
                                           std::span<const double> x);

std::vector<double> predict_row(const PcnnModel& model, std::span<const double> x);
Matrix predict(const PcnnModel& model, const Matrix& inputs);

/// Argmax part index per row (ties to the lowest index); independent of gamma.
std::vector<std::size_t> route(const PcnnModel& model, const Matrix& inputs);

PartLabels compute_labels(const std::vector<Mlp>& subpatterns, const Dataset& data,
                          Loss loss);

/// Trains one subpattern per part on its data slice. Each task draws its own
/// seed derived from seed_base, so sequential (jobs = 1) and concurrent runs
/// produce bit-identical models.
std::vector<Mlp> train_subpatterns(const Dataset& data,
                                   const std::vector<std::vector<std::size_t>>& parts,
                                   const TrainConfig& config,
                                   const std::vector<std::vector<std::size_t>>& hidden,
                                   std::uint64_t seed_base, int jobs,
                                   std::vector<double>* per_task_seconds = nullptr);

/// Partition resolution used by the trainer: auto mode takes GET_PARTITION's
/// output; a nonzero hint retries with adjusted q values and keeps the draw
/// whose part count lands closest to the hint (best-effort).
PartitionResult resolve_partition(const Matrix& inputs, std::size_t n_parts_hint,
                                  double q, std::uint64_t seed);

/// Decoupled two-step trainer: partition, train subpatterns independently,
/// compute best-subpattern labels, then train the classifier on those labels
/// with binary cross-entropy. No gradient ever flows through the indicator.
/// Trains on the rows tagged train.
PcnnModel train_pcnn(const Dataset& data, const PcnnTrainConfig& config,
                     PcnnTrainInfo* info = nullptr);

/// Same, but with the partition supplied by the caller.
PcnnModel train_pcnn_with_partition(const Dataset& train_data,
                                    const DataPartition& partition,
                                    const PcnnTrainConfig& config,
                                    PcnnTrainInfo* info = nullptr);

/// Classifier parameters plus the routed subpattern's parameters (argmax), or
/// plus every member subpattern's parameters (paper_literal).
std::size_t active_parameter_count(const PcnnModel& model, std::span<const double> x);

}  // namespace pcnn
