#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace pcnn {

/// Dense row-major matrix of doubles.
///
/// Public constructors validate that every entry is finite; results of
/// arithmetic helpers are not re-validated.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static Matrix from_data(std::size_t rows, std::size_t cols,
                          std::vector<double> data) {
    if (data.size() != rows * cols)
      throw std::invalid_argument("Matrix::from_data: data length " +
                                  std::to_string(data.size()) +
                                  " != rows*cols");
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    m.require_finite();
    return m;
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m;
    m.rows_ = rows.size();
    m.cols_ = rows.size() ? rows.begin()->size() : 0;
    m.data_.reserve(m.rows_ * m.cols_);
    for (const auto& r : rows) {
      if (r.size() != m.cols_)
        throw std::invalid_argument("Matrix::from_rows: ragged rows");
      m.data_.insert(m.data_.end(), r.begin(), r.end());
    }
    m.require_finite();
    return m;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix column(std::vector<double> values) {
    const std::size_t n = values.size();
    return from_data(n, 1, std::move(values));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& values() const { return data_; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  Matrix select_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto src = row(idx[k]);
      auto dst = out.row(k);
      for (std::size_t j = 0; j < cols_; ++j) dst[j] = src[j];
    }
    return out;
  }

 private:
  void require_finite() const {
    if (!all_finite())
      throw std::invalid_argument("Matrix: non-finite entry");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions disagree");
  Matrix c(a.rows(), b.cols());
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c.data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      const double* bp = b.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += aip * bp[j];
    }
  }
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

/// AᵀB without forming Aᵀ.
inline Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("matmul_at_b: row counts disagree");
  Matrix c(a.cols(), b.cols());
  const std::size_t n = a.rows(), p = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a.data() + i * p;
    const double* bi = b.data() + i * m;
    for (std::size_t r = 0; r < p; ++r) {
      const double air = ai[r];
      if (air == 0.0) continue;
      double* cr = c.data() + r * m;
      for (std::size_t j = 0; j < m; ++j) cr[j] += air * bi[j];
    }
  }
  return c;
}

/// ABᵀ without forming Bᵀ.
inline Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("matmul_a_bt: column counts disagree");
  Matrix c(a.rows(), b.rows());
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a.data() + i * k;
    for (std::size_t j = 0; j < m; ++j) {
      const double* bj = b.data() + j * k;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
      c(i, j) = s;
    }
  }
  return c;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

inline double euclidean_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace pcnn
