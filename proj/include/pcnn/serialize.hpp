#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "pcnn/mlp.hpp"
#include "pcnn/pcnn_model.hpp"

namespace pcnn {

/// Unconditional sum of per-part networks (no routing).
struct BagModel {
  std::vector<Mlp> subpatterns;
};

Matrix predict(const BagModel& model, const Matrix& inputs);

using AnyModel = std::variant<Mlp, PcnnModel, BagModel>;

/// Versioned little-endian binary format; parameters are stored bit-exactly
/// so a save/load round trip reproduces predictions to the last bit.
void save_model(const Mlp& model, const std::string& path);
void save_model(const PcnnModel& model, const std::string& path);
void save_model(const BagModel& model, const std::string& path);
void save_model(const AnyModel& model, const std::string& path);

AnyModel load_model(const std::string& path);

Matrix predict_any(const AnyModel& model, const Matrix& inputs);

/// Part assignment per row: argmax route for PCNN-shaped models, 0 for a
/// plain Mlp, -1 for a bag (a bag has no routing).
std::vector<long> routed_parts(const AnyModel& model, const Matrix& inputs);

std::size_t total_parameter_count(const AnyModel& model);

}  // namespace pcnn
