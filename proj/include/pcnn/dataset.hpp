#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pcnn/matrix.hpp"

namespace pcnn {

enum class Split : std::uint8_t { train, test };

/// Input rows paired with target rows, an optional per-row part label, and a
/// per-row train/test tag (all rows default to train).
struct Dataset {
  Matrix inputs;                 // n x d
  Matrix targets;                // n x D
  std::vector<int> part_labels;  // empty, or one label per row
  std::vector<Split> split;      // empty means all-train

  std::size_t n_rows() const { return inputs.rows(); }
  std::size_t input_dim() const { return inputs.cols(); }
  std::size_t target_dim() const { return targets.cols(); }

  void validate() const {
    if (inputs.rows() != targets.rows())
      throw std::invalid_argument("Dataset: inputs/targets row counts disagree");
    if (!part_labels.empty() && part_labels.size() != inputs.rows())
      throw std::invalid_argument("Dataset: part_labels length mismatch");
    if (!split.empty() && split.size() != inputs.rows())
      throw std::invalid_argument("Dataset: split length mismatch");
  }

  Split row_split(std::size_t i) const {
    return split.empty() ? Split::train : split[i];
  }

  std::vector<std::size_t> indices_of(Split s) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n_rows(); ++i)
      if (row_split(i) == s) idx.push_back(i);
    return idx;
  }

  Dataset subset(std::span<const std::size_t> idx) const {
    Dataset out;
    out.inputs = inputs.select_rows(idx);
    out.targets = targets.select_rows(idx);
    if (!part_labels.empty()) {
      out.part_labels.reserve(idx.size());
      for (auto i : idx) out.part_labels.push_back(part_labels[i]);
    }
    return out;
  }

  Dataset train_subset() const { auto idx = indices_of(Split::train); return subset(idx); }
  Dataset test_subset() const { auto idx = indices_of(Split::test); return subset(idx); }

  /// Tags the last k rows as test, the rest as train.
  void split_last_k(std::size_t k) {
    if (k > n_rows()) throw std::invalid_argument("split_last_k: k exceeds row count");
    split.assign(n_rows(), Split::train);
    for (std::size_t i = n_rows() - k; i < n_rows(); ++i) split[i] = Split::test;
  }
};

}  // namespace pcnn
