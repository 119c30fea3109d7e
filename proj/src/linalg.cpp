#include "pcnn/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pcnn {

namespace {

// In-place lower Cholesky of symmetric A; false on a non-positive pivot.
bool cholesky(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / ljj;
    }
  }
  return true;
}

// Solves L Lᵀ X = B for X given the Cholesky factor in the lower triangle.
Matrix cholesky_solve(const Matrix& l, const Matrix& b) {
  const std::size_t n = l.rows(), m = b.cols();
  Matrix x = b;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, j);
      x(i, j) = s / l(i, i);
    }
    for (std::size_t ii = n; ii > 0; --ii) {
      const std::size_t i = ii - 1;
      double s = x(i, j);
      for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x(k, j);
      x(i, j) = s / l(i, i);
    }
  }
  return x;
}

// Partially pivoted LU solve; throws on a (near-)singular pivot.
Matrix lu_solve(Matrix a, Matrix b) {
  const std::size_t n = a.rows(), m = b.cols();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
  const double tol = scale * 1e-13 + 1e-300;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(pivot, k))) pivot = i;
    if (std::abs(a(pivot, k)) <= tol)
      throw std::runtime_error(
          "ridge_solve: singular system (rank-deficient features with lambda = 0)");
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pivot, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(b(k, j), b(pivot, j));
    }
    const double inv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) * inv;
      if (f == 0.0) continue;
      a(i, k) = f;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < m; ++j) b(i, j) -= f * b(k, j);
    }
  }
  for (std::size_t jj = 0; jj < m; ++jj) {
    for (std::size_t ii = n; ii > 0; --ii) {
      const std::size_t i = ii - 1;
      double s = b(i, jj);
      for (std::size_t k = i + 1; k < n; ++k) s -= a(i, k) * b(k, jj);
      b(i, jj) = s / a(i, i);
    }
  }
  return b;
}

}  // namespace

Matrix ridge_solve(const Matrix& features, const Matrix& targets, double lambda) {
  if (features.rows() != targets.rows())
    throw std::invalid_argument("ridge_solve: features and targets row counts disagree");
  if (lambda < 0.0)
    throw std::invalid_argument("ridge_solve: lambda must be >= 0");

  Matrix gram = matmul_at_b(features, features);
  for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) += lambda;
  const Matrix rhs = matmul_at_b(features, targets);

  Matrix chol = gram;
  if (cholesky(chol)) return cholesky_solve(chol, rhs);
  return lu_solve(std::move(gram), rhs);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace pcnn
