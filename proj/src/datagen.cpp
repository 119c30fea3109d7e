#include "pcnn/datagen.hpp"

#include "pcnn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pcnn {

const char* to_string(SubpatternFn f) {
  switch (f) {
    case SubpatternFn::exp_cos: return "exp_cos";
    case SubpatternFn::neg_quad_cos: return "neg_quad_cos";
    case SubpatternFn::sin10: return "sin10";
    case SubpatternFn::neg_shift_quad: return "neg_shift_quad";
    case SubpatternFn::linear: return "linear";
    case SubpatternFn::square: return "square";
  }
  return "?";
}

SubpatternFn subpattern_fn_from_string(const std::string& s) {
  if (s == "exp_cos") return SubpatternFn::exp_cos;
  if (s == "neg_quad_cos") return SubpatternFn::neg_quad_cos;
  if (s == "sin10") return SubpatternFn::sin10;
  if (s == "neg_shift_quad") return SubpatternFn::neg_shift_quad;
  if (s == "linear") return SubpatternFn::linear;
  if (s == "square") return SubpatternFn::square;
  throw std::invalid_argument("unknown subpattern function: " + s);
}

double eval_subpattern(SubpatternFn f, double u) {
  switch (f) {
    case SubpatternFn::exp_cos: return 1.0 + std::exp(u) * std::cos(u);
    case SubpatternFn::neg_quad_cos: return -1.0 - u * u * std::cos(u);
    case SubpatternFn::sin10: return 1.0 + std::sin(10.0 * u);
    case SubpatternFn::neg_shift_quad: return -2.0 - u * u;
    case SubpatternFn::linear: return u;
    case SubpatternFn::square: return u * u;
  }
  return 0.0;
}

std::pair<double, int> synth_target(const SyntheticSpec& spec, const Matrix& a,
                                    std::span<const double> x) {
  if (!(spec.r > 0.0)) throw std::invalid_argument("synth_target: r must be > 0");
  if (a.rows() != 1 || a.cols() != x.size())
    throw std::invalid_argument("synth_target: projection must be 1 x d");
  double u = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) u += a(0, j) * x[j];
  double m = std::fmod(u, spec.r);
  if (m < 0.0) m += spec.r;  // nonnegative representative
  const bool first = m < 0.5 * spec.r;
  return {eval_subpattern(first ? spec.f1 : spec.f2, u), first ? 0 : 1};
}

Dataset generate_with_projection(const SyntheticSpec& spec, const Matrix& a, Rng& rng) {
  Dataset data;
  data.inputs = Matrix(spec.n, spec.d);
  data.targets = Matrix(spec.n, 1);
  data.part_labels.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i)
    for (std::size_t j = 0; j < spec.d; ++j) data.inputs(i, j) = rng.next_double();
  for (std::size_t i = 0; i < spec.n; ++i) {
    const auto [value, part] = synth_target(spec, a, data.inputs.row(i));
    double noise = 0.0;
    if (spec.sigma > 0.0) noise = spec.sigma * sample_student_t_scalar(rng, spec.nu);
    data.targets(i, 0) = value + noise;
    data.part_labels[i] = part;
  }
  data.split.assign(spec.n, Split::train);
  return data;
}

Dataset generate(const SyntheticSpec& spec, Rng& rng) {
  Matrix a(1, spec.d);
  for (std::size_t j = 0; j < spec.d; ++j) a(0, j) = sample_gaussian_scalar(rng);
  return generate_with_projection(spec, a, rng);
}

void apply_split(Dataset& data, const SplitSpec& split) {
  switch (split.kind) {
    case SplitSpec::Kind::none:
      data.split.assign(data.n_rows(), Split::train);
      return;
    case SplitSpec::Kind::last_k:
      data.split_last_k(split.last_k);
      return;
    case SplitSpec::Kind::random_fraction: {
      if (!(split.test_fraction >= 0.0 && split.test_fraction <= 1.0))
        throw std::invalid_argument("apply_split: test fraction must be in [0, 1]");
      const std::size_t n = data.n_rows();
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      Rng rng(split.seed);
      shuffle_indices(idx, rng);
      const auto n_test =
          static_cast<std::size_t>(std::llround(split.test_fraction * static_cast<double>(n)));
      data.split.assign(n, Split::train);
      for (std::size_t i = 0; i < n_test; ++i) data.split[idx[i]] = Split::test;
      return;
    }
  }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
      ++used;
    if (used != cell.size()) throw std::invalid_argument("trailing garbage");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("non-numeric cell at row " + std::to_string(row) +
                             ", column '" + col + "': '" + cell + "'");
  }
}

}  // namespace

Dataset load_csv(const std::string& path, const std::vector<std::string>& input_cols,
                 const std::vector<std::string>& target_cols,
                 const std::optional<std::string>& part_col, const SplitSpec& split) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open: " + path);

  std::string header;
  if (!std::getline(in, header) || header.empty())
    throw std::runtime_error("empty file: " + path);
  const auto names = split_line(header);
  auto col_index = [&](const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
      throw std::runtime_error("missing column '" + name + "' in " + path);
    return static_cast<std::size_t>(it - names.begin());
  };

  std::vector<std::size_t> in_idx, tgt_idx;
  for (const auto& c : input_cols) in_idx.push_back(col_index(c));
  for (const auto& c : target_cols) tgt_idx.push_back(col_index(c));
  std::optional<std::size_t> part_idx;
  if (part_col) part_idx = col_index(*part_col);

  std::vector<double> xs, ys;
  std::vector<int> parts;
  std::size_t n = 0;
  std::string line;
  // Data rows are 1-based in error messages; the header is row 0.
  for (std::size_t row = 1; std::getline(in, line); ++row) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != names.size())
      throw std::runtime_error("row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(names.size()));
    for (auto idx : in_idx) xs.push_back(parse_cell(cells[idx], row, names[idx]));
    for (auto idx : tgt_idx) ys.push_back(parse_cell(cells[idx], row, names[idx]));
    if (part_idx)
      parts.push_back(
          static_cast<int>(parse_cell(cells[*part_idx], row, names[*part_idx])));
    ++n;
  }
  if (n == 0) throw std::runtime_error("no data rows in " + path);

  Dataset data;
  data.inputs = Matrix::from_data(n, in_idx.size(), std::move(xs));
  data.targets = Matrix::from_data(n, tgt_idx.size(), std::move(ys));
  data.part_labels = std::move(parts);
  apply_split(data, split);
  data.validate();
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open for writing: " + path);
  for (std::size_t j = 0; j < data.input_dim(); ++j) out << (j ? "," : "") << "x" << j;
  for (std::size_t j = 0; j < data.target_dim(); ++j) out << ",y" << j;
  if (!data.part_labels.empty()) out << ",part";
  out << "\n";
  char buf[64];
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t j = 0; j < data.input_dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.inputs(i, j));
      out << (j ? "," : "") << buf;
    }
    for (std::size_t j = 0; j < data.target_dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.targets(i, j));
      out << "," << buf;
    }
    if (!data.part_labels.empty()) out << "," << data.part_labels[i];
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

CsvLayout infer_csv_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open: " + path);
  std::string header;
  if (!std::getline(in, header) || header.empty())
    throw std::runtime_error("empty file: " + path);
  CsvLayout layout;
  for (const auto& name : split_line(header)) {
    if (name == "part")
      layout.part_col = name;
    else if (!name.empty() && name[0] == 'x')
      layout.input_cols.push_back(name);
    else if (!name.empty() && name[0] == 'y')
      layout.target_cols.push_back(name);
  }
  if (layout.input_cols.empty() || layout.target_cols.empty())
    throw std::runtime_error("cannot infer x*/y* columns from header of " + path);
  return layout;
}

}  // namespace pcnn
