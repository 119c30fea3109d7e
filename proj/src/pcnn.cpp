#include "pcnn/pcnn_model.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcnn/linalg.hpp"
#include "pcnn/parallel.hpp"

namespace pcnn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Stream ids for deriving per-phase seeds from the master seed.
constexpr std::uint64_t kPartitionStream = 1;
constexpr std::uint64_t kSubpatternStream = 2;
constexpr std::uint64_t kClassifierStream = 3;
constexpr std::uint64_t kHintAttemptBase = 1000;

double per_sample_loss(std::span<const double> pred, std::span<const double> target,
                       Loss loss) {
  double total = 0.0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    switch (loss) {
      case Loss::mae: total += std::abs(pred[j] - target[j]); break;
      case Loss::mse: total += (pred[j] - target[j]) * (pred[j] - target[j]); break;
      case Loss::binary_cross_entropy:
        total += binary_cross_entropy(sigmoid(pred[j]), target[j]);
        break;
    }
  }
  return total;
}

}  // namespace

const char* to_string(Routing r) {
  return r == Routing::paper_literal ? "paper_literal" : "argmax";
}

Routing routing_from_string(const std::string& s) {
  if (s == "paper_literal") return Routing::paper_literal;
  if (s == "argmax") return Routing::argmax;
  throw std::invalid_argument("unknown routing: " + s);
}

void PcnnModel::validate() const {
  if (subpatterns.empty()) throw std::invalid_argument("PcnnModel: needs >= 1 subpattern");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("PcnnModel: gamma must be in (0, 1]");
  if (classifier.output_dim() != subpatterns.size())
    throw std::invalid_argument("PcnnModel: classifier output dim != part count");
  for (const auto& s : subpatterns) {
    if (s.input_dim() != classifier.input_dim() ||
        s.output_dim() != subpatterns.front().output_dim())
      throw std::invalid_argument("PcnnModel: subpattern shape mismatch");
  }
}

std::vector<bool> deep_zero_set_membership(const PcnnModel& model,
                                           std::span<const double> x) {
  const auto logits = forward_row(model.classifier, x);
  std::vector<bool> member(logits.size());
  for (std::size_t n = 0; n < logits.size(); ++n)
    member[n] = sigmoid(logits[n]) > model.gamma;
  return member;
}

namespace {

std::size_t argmax_index(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;  // ties keep the lowest index
  return best;
}

}  // namespace

std::vector<double> predict_row(const PcnnModel& model, std::span<const double> x) {
  const auto logits = forward_row(model.classifier, x);
  if (model.routing == Routing::argmax)
    return forward_row(model.subpatterns[argmax_index(logits)], x);

  std::vector<double> out(model.output_dim(), 0.0);
  for (std::size_t n = 0; n < logits.size(); ++n) {
    if (!(sigmoid(logits[n]) > model.gamma)) continue;
    const auto fx = forward_row(model.subpatterns[n], x);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += fx[j];
  }
  return out;
}

std::vector<std::size_t> route(const PcnnModel& model, const Matrix& inputs) {
  const Matrix logits = forward(model.classifier, inputs);
  std::vector<std::size_t> parts(inputs.rows());
  for (std::size_t i = 0; i < inputs.rows(); ++i)
    parts[i] = argmax_index(logits.row(i));
  return parts;
}

Matrix predict(const PcnnModel& model, const Matrix& inputs) {
  const Matrix logits = forward(model.classifier, inputs);
  Matrix out(inputs.rows(), model.output_dim());

  // Group rows per subpattern so each network runs one batched forward.
  for (std::size_t n = 0; n < model.n_parts(); ++n) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < inputs.rows(); ++i) {
      if (model.routing == Routing::argmax) {
        if (argmax_index(logits.row(i)) == n) rows.push_back(i);
      } else if (sigmoid(logits(i, n)) > model.gamma) {
        rows.push_back(i);
      }
    }
    if (rows.empty()) continue;
    const Matrix sub_out = forward(model.subpatterns[n], inputs.select_rows(rows));
    for (std::size_t k = 0; k < rows.size(); ++k)
      for (std::size_t j = 0; j < out.cols(); ++j)
        out(rows[k], j) += sub_out(k, j);
  }
  return out;
}

PartLabels compute_labels(const std::vector<Mlp>& subpatterns, const Dataset& data,
                          Loss loss) {
  const std::size_t n_parts = subpatterns.size();
  const std::size_t n_rows = data.n_rows();
  Matrix scores(n_parts, n_rows);
  for (std::size_t n = 0; n < n_parts; ++n) {
    const Matrix pred = forward(subpatterns[n], data.inputs);
    for (std::size_t i = 0; i < n_rows; ++i)
      scores(n, i) = per_sample_loss(pred.row(i), data.targets.row(i), loss);
  }
  PartLabels labels{Matrix(n_parts, n_rows)};
  for (std::size_t i = 0; i < n_rows; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < n_parts; ++n) best = std::min(best, scores(n, i));
    for (std::size_t n = 0; n < n_parts; ++n)
      labels.l(n, i) = scores(n, i) <= best ? 1.0 : 0.0;
  }
  return labels;
}

std::vector<Mlp> train_subpatterns(const Dataset& data,
                                   const std::vector<std::vector<std::size_t>>& parts,
                                   const TrainConfig& config,
                                   const std::vector<std::vector<std::size_t>>& hidden,
                                   std::uint64_t seed_base, int jobs,
                                   std::vector<double>* per_task_seconds) {
  if (hidden.size() != parts.size())
    throw std::invalid_argument("train_subpatterns: hidden widths per part required");
  std::vector<Mlp> models(parts.size());
  std::vector<double> task_seconds(parts.size(), 0.0);
  std::vector<std::string> failures(parts.size());

  std::vector<std::function<void()>> tasks;
  tasks.reserve(parts.size());
  for (std::size_t n = 0; n < parts.size(); ++n) {
    tasks.push_back([&, n] {
      const auto start = Clock::now();
      try {
        const Dataset slice = data.subset(parts[n]);
        std::vector<std::size_t> dims;
        dims.push_back(data.input_dim());
        dims.insert(dims.end(), hidden[n].begin(), hidden[n].end());
        dims.push_back(data.target_dim());
        TrainConfig cfg = config;
        cfg.seed = derive_seed(seed_base, n);
        cfg.batch_size = std::min(cfg.batch_size, std::max<std::size_t>(slice.n_rows(), 1));
        models[n] = train_ffnn(slice, cfg, dims);
      } catch (const std::exception& e) {
        failures[n] = e.what();
      }
      task_seconds[n] = seconds_since(start);
    });
  }
  run_tasks(tasks, jobs);

  for (std::size_t n = 0; n < parts.size(); ++n)
    if (!failures[n].empty())
      throw std::runtime_error("subpattern " + std::to_string(n) +
                               " training failed: " + failures[n]);
  if (per_task_seconds) *per_task_seconds = std::move(task_seconds);
  return models;
}

PartitionResult resolve_partition(const Matrix& inputs, std::size_t n_parts_hint,
                                  double q, std::uint64_t seed) {
  if (n_parts_hint == 1) {
    // Degenerate single-part split; used when a plain FFNN path is wanted.
    PartitionResult result;
    std::vector<std::size_t> all(inputs.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    result.partition.centers_order = all;
    result.partition.parts.push_back(all);
    result.partition.q = q;
    result.partition.iterations = 1;
    const PairStats stats = compute_pair_stats(inputs);
    result.partition.delta_min = stats.delta_min;
    result.partition.delta_bar = stats.delta_bar;
    GeometricPart g;
    g.anchor_points = inputs;
    g.ball_radius = stats.delta_min;
    result.geo_parts.push_back(std::move(g));
    return result;
  }

  if (n_parts_hint == 0) {
    Rng rng(seed);
    return get_partition(inputs, q, rng);
  }

  // Best-effort: retry with a ladder of q values (fresh alpha and shuffle per
  // attempt) and keep the draw closest to the requested part count.
  const PairStats stats = compute_pair_stats(inputs);
  const double ladder[] = {q, 0.95, 0.9, 0.75, 0.5, 0.3, 0.2, 0.1, 0.05, 0.02, 0.01};
  PartitionResult best;
  std::size_t best_gap = std::numeric_limits<std::size_t>::max();
  for (std::size_t attempt = 0; attempt < 32; ++attempt) {
    const double q_try = ladder[attempt % std::size(ladder)];
    Rng rng(derive_seed(seed, kHintAttemptBase + attempt));
    const double alpha = sample_uniform(rng, 0.25, 0.5);
    std::vector<std::size_t> perm(inputs.rows());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    shuffle_indices(perm, rng);
    PartitionResult candidate =
        partition_with_alpha(inputs, stats, q_try, alpha, std::move(perm));
    const std::size_t n = candidate.partition.n_parts();
    const std::size_t gap = n > n_parts_hint ? n - n_parts_hint : n_parts_hint - n;
    if (gap < best_gap) {
      best_gap = gap;
      best = std::move(candidate);
      if (best_gap == 0) break;
    }
  }
  return best;
}

PcnnModel train_pcnn_with_partition(const Dataset& train_data,
                                    const DataPartition& partition,
                                    const PcnnTrainConfig& config,
                                    PcnnTrainInfo* info) {
  train_data.validate();
  if (train_data.n_rows() == 0)
    throw std::invalid_argument("train_pcnn: no training rows");
  if (!(config.gamma > 0.0 && config.gamma <= 1.0))
    throw std::invalid_argument("train_pcnn: gamma must be in (0, 1]");

  const std::size_t n_parts = partition.n_parts();
  std::vector<std::vector<std::size_t>> hidden = config.per_part_hidden;
  if (hidden.empty()) hidden.assign(n_parts, config.subpattern_hidden);
  if (hidden.size() != n_parts)
    throw std::invalid_argument("train_pcnn: per_part_hidden length != part count");

  auto t0 = Clock::now();
  std::vector<double> per_task;
  std::vector<Mlp> subs =
      train_subpatterns(train_data, partition.parts, config.subpattern, hidden,
                        derive_seed(config.seed, kSubpatternStream), config.jobs,
                        &per_task);
  const double sub_seconds = seconds_since(t0);

  PartLabels labels = compute_labels(subs, train_data, config.subpattern.loss);

  t0 = Clock::now();
  Dataset classifier_data;
  classifier_data.inputs = train_data.inputs;
  classifier_data.targets = transpose(labels.l);
  TrainConfig cls_cfg = config.classifier;
  cls_cfg.loss = Loss::binary_cross_entropy;
  cls_cfg.seed = derive_seed(config.seed, kClassifierStream);
  std::vector<std::size_t> cls_dims;
  cls_dims.push_back(train_data.input_dim());
  cls_dims.insert(cls_dims.end(), config.classifier_hidden.begin(),
                  config.classifier_hidden.end());
  cls_dims.push_back(n_parts);
  Mlp classifier = train_ffnn(classifier_data, cls_cfg, cls_dims);
  const double cls_seconds = seconds_since(t0);

  PcnnModel model;
  model.subpatterns = std::move(subs);
  model.classifier = std::move(classifier);
  model.gamma = config.gamma;
  model.routing = config.routing;
  model.validate();

  if (info) {
    info->partition = partition;
    info->labels = std::move(labels);
    info->subpattern_seconds = sub_seconds;
    info->classifier_seconds = cls_seconds;
    info->per_subpattern_seconds = std::move(per_task);
  }
  return model;
}

PcnnModel train_pcnn(const Dataset& data, const PcnnTrainConfig& config,
                     PcnnTrainInfo* info) {
  const Dataset train_data = data.train_subset();
  if (train_data.n_rows() < 2)
    throw std::invalid_argument("train_pcnn: need >= 2 training rows");

  const auto t0 = Clock::now();
  const PartitionResult part = resolve_partition(
      train_data.inputs, config.n_parts_hint, config.q,
      derive_seed(config.seed, kPartitionStream));
  const double part_seconds = seconds_since(t0);

  PcnnModel model = train_pcnn_with_partition(train_data, part.partition, config, info);
  if (info) info->partition_seconds = part_seconds;
  return model;
}

std::size_t active_parameter_count(const PcnnModel& model, std::span<const double> x) {
  const std::size_t cls = parameter_count(model.classifier);
  if (model.routing == Routing::argmax) {
    const auto logits = forward_row(model.classifier, x);
    return cls + parameter_count(model.subpatterns[argmax_index(logits)]);
  }
  std::size_t total = cls;
  const auto member = deep_zero_set_membership(model, x);
  for (std::size_t n = 0; n < member.size(); ++n)
    if (member[n]) total += parameter_count(model.subpatterns[n]);
  return total;
}

}  // namespace pcnn
