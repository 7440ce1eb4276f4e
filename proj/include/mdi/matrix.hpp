#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mdi {

// Dense row-major matrix. Everything here deals with regression designs of
// at most a few columns, so there is no attempt at being clever.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// (a + a^T) / 2. Guards against floating-point asymmetry before factoring.
Matrix symmetrized(const Matrix& a);

// Lower-triangular L with L L^T == a (input symmetrized first). Throws
// NotPositiveDefinite unless every pivot clears a relative tolerance.
Matrix cholesky(const Matrix& a);

// Semidefinite variant: pivots within tolerance of zero yield a zero column
// instead of an error, so rank-deficient covariances (e.g. the zero matrix)
// factor cleanly. Clearly negative pivots still throw.
Matrix cholesky_psd(const Matrix& a);

// Solve (L L^T) x = rhs given the lower factor L.
std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> rhs);

// Inverse of (L L^T) given the lower factor L. Result is symmetrized.
Matrix cholesky_inverse(const Matrix& l);

namespace detail {

// Neumaier compensated accumulator. Keeps long reductions accurate while
// staying an ordinary double computation (deterministic for a fixed order).
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    const double abs_sum = sum < 0 ? -sum : sum;
    const double abs_v = v < 0 ? -v : v;
    comp += abs_sum >= abs_v ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }

  double value() const { return sum + comp; }
};

// Factorization core shared by the strict and semidefinite fronts. Reports
// the smallest pivot and largest diagonal so callers can form a condition
// indicator.
Matrix cholesky_impl(const Matrix& a, bool allow_psd, double* min_pivot, double* max_diag);

}  // namespace detail

}  // namespace mdi
