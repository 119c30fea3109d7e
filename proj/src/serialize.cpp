#include "pcnn/serialize.hpp"

#include "pcnn/errors.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace pcnn {

Matrix predict(const BagModel& model, const Matrix& inputs) {
  if (model.subpatterns.empty())
    throw std::invalid_argument("BagModel: no subpatterns");
  Matrix out(inputs.rows(), model.subpatterns.front().output_dim());
  for (const auto& sub : model.subpatterns) {
    const Matrix p = forward(sub, inputs);
    for (std::size_t i = 0; i < out.rows(); ++i)
      for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += p(i, j);
  }
  return out;
}

namespace {

constexpr std::uint32_t kMagicMlp = 0x4D4C5031;   // "MLP1"
constexpr std::uint32_t kMagicPcnn = 0x50434E31;  // "PCN1"
constexpr std::uint32_t kMagicBag = 0x42414731;   // "BAG1"
constexpr std::uint32_t kFormatVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double v) {
  write_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("model file truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("model file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

void write_mlp_body(std::ostream& out, const Mlp& m) {
  write_u32(out, static_cast<std::uint32_t>(m.activation));
  write_u32(out, static_cast<std::uint32_t>(m.layer_dims.size()));
  for (auto d : m.layer_dims) write_u64(out, d);
  for (std::size_t j = 0; j < m.n_layers(); ++j) {
    for (std::size_t i = 0; i < m.weights[j].size(); ++i)
      write_f64(out, m.weights[j].data()[i]);
    for (std::size_t i = 0; i < m.biases[j].size(); ++i)
      write_f64(out, m.biases[j].data()[i]);
  }
}

Mlp read_mlp_body(std::istream& in) {
  const auto act = static_cast<Activation>(read_u32(in));
  const std::uint32_t n_dims = read_u32(in);
  if (n_dims < 2 || n_dims > 64) throw std::runtime_error("model file corrupt: dims");
  std::vector<std::size_t> dims(n_dims);
  for (auto& d : dims) d = static_cast<std::size_t>(read_u64(in));
  Mlp m = make_mlp(dims, act);
  for (std::size_t j = 0; j < m.n_layers(); ++j) {
    for (std::size_t i = 0; i < m.weights[j].size(); ++i)
      m.weights[j].data()[i] = read_f64(in);
    for (std::size_t i = 0; i < m.biases[j].size(); ++i)
      m.biases[j].data()[i] = read_f64(in);
  }
  return m;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot open for writing: " + path);
  return out;
}

}  // namespace

void save_model(const Mlp& model, const std::string& path) {
  auto out = open_out(path);
  write_u32(out, kMagicMlp);
  write_u32(out, kFormatVersion);
  write_mlp_body(out, model);
  if (!out) throw std::runtime_error("write failed: " + path);
}

void save_model(const PcnnModel& model, const std::string& path) {
  auto out = open_out(path);
  write_u32(out, kMagicPcnn);
  write_u32(out, kFormatVersion);
  write_f64(out, model.gamma);
  write_u32(out, static_cast<std::uint32_t>(model.routing));
  write_u32(out, static_cast<std::uint32_t>(model.n_parts()));
  write_mlp_body(out, model.classifier);
  for (const auto& sub : model.subpatterns) write_mlp_body(out, sub);
  if (!out) throw std::runtime_error("write failed: " + path);
}

void save_model(const BagModel& model, const std::string& path) {
  auto out = open_out(path);
  write_u32(out, kMagicBag);
  write_u32(out, kFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(model.subpatterns.size()));
  for (const auto& sub : model.subpatterns) write_mlp_body(out, sub);
  if (!out) throw std::runtime_error("write failed: " + path);
}

void save_model(const AnyModel& model, const std::string& path) {
  std::visit([&](const auto& m) { save_model(m, path); }, model);
}

AnyModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open: " + path);
  const std::uint32_t magic = read_u32(in);
  const std::uint32_t version = read_u32(in);
  if (version != kFormatVersion)
    throw std::runtime_error("unsupported model format version " +
                             std::to_string(version));
  if (magic == kMagicMlp) return read_mlp_body(in);
  if (magic == kMagicPcnn) {
    PcnnModel m;
    m.gamma = read_f64(in);
    m.routing = static_cast<Routing>(read_u32(in));
    const std::uint32_t n = read_u32(in);
    m.classifier = read_mlp_body(in);
    m.subpatterns.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) m.subpatterns.push_back(read_mlp_body(in));
    m.validate();
    return m;
  }
  if (magic == kMagicBag) {
    BagModel m;
    const std::uint32_t n = read_u32(in);
    m.subpatterns.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) m.subpatterns.push_back(read_mlp_body(in));
    return m;
  }
  throw std::runtime_error("not a model file: " + path);
}

Matrix predict_any(const AnyModel& model, const Matrix& inputs) {
  return std::visit(
      [&](const auto& m) -> Matrix {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Mlp>)
          return forward(m, inputs);
        else
          return predict(m, inputs);
      },
      model);
}

std::vector<long> routed_parts(const AnyModel& model, const Matrix& inputs) {
  std::vector<long> parts(inputs.rows(), 0);
  if (const auto* pc = std::get_if<PcnnModel>(&model)) {
    const auto r = route(*pc, inputs);
    for (std::size_t i = 0; i < r.size(); ++i) parts[i] = static_cast<long>(r[i]);
  } else if (std::holds_alternative<BagModel>(model)) {
    parts.assign(inputs.rows(), -1);
  }
  return parts;
}

std::size_t total_parameter_count(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Mlp>) {
          return parameter_count(m);
        } else if constexpr (std::is_same_v<T, PcnnModel>) {
          std::size_t total = parameter_count(m.classifier);
          for (const auto& s : m.subpatterns) total += parameter_count(s);
          return total;
        } else {
          std::size_t total = 0;
          for (const auto& s : m.subpatterns) total += parameter_count(s);
          return total;
        }
      },
      model);
}

}  // namespace pcnn
