#pragma once

#include "pcnn/matrix.hpp"

namespace pcnn {

/// Ridge regression: returns W minimizing ||features*W - targets||^2 + lambda*||W||^2,
/// solved through the normal equations (XᵀX + lambda*I) W = XᵀY.
///
/// Cholesky on the regularized Gram matrix; falls back to partially pivoted
/// LU when a pivot is non-positive. Throws std::runtime_error when the system
/// is singular (possible only for lambda == 0 with rank-deficient features).
Matrix ridge_solve(const Matrix& features, const Matrix& targets, double lambda);

/// Numerically stable logistic function e^x / (1 + e^x); never overflows.
double sigmoid(double x);

}  // namespace pcnn
