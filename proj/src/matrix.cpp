#include "mdi/matrix.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mdi/error.hpp"

namespace mdi {

Matrix symmetrized(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("symmetrized: matrix must be square");
  Matrix s(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

namespace detail {

Matrix cholesky_impl(const Matrix& a, bool allow_psd, double* min_pivot, double* max_diag) {
  if (a.rows() != a.cols()) throw DimensionMismatch("cholesky: matrix must be square");
  const std::size_t n = a.rows();
  for (double v : a.data())
    if (!std::isfinite(v)) throw InvalidParameter("cholesky: non-finite entry");

  const Matrix m = symmetrized(a);
  double diag_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(m(i, i)));
  // Relative pivot tolerance; a zero matrix factors to zero in PSD mode.
  const double tol = 1e-12 * diag_scale;

  Matrix l(n, n);
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    smallest = std::min(smallest, d);
    if (d <= tol) {
      if (!allow_psd || d < -1e-8 * std::max(1.0, diag_scale)) {
        throw NotPositiveDefinite("cholesky: pivot " + std::to_string(d) +
                                  " at column " + std::to_string(j) +
                                  " is not positive definite above tolerance");
      }
      // Semidefinite direction: contribute nothing.
      continue;
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  if (min_pivot) *min_pivot = smallest;
  if (max_diag) *max_diag = diag_scale;
  return l;
}

}  // namespace detail

Matrix cholesky(const Matrix& a) { return detail::cholesky_impl(a, false, nullptr, nullptr); }

Matrix cholesky_psd(const Matrix& a) { return detail::cholesky_impl(a, true, nullptr, nullptr); }

std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> rhs) {
  const std::size_t n = l.rows();
  if (rhs.size() != n) throw DimensionMismatch("cholesky_solve: rhs length mismatch");
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (l(i, i) == 0.0) continue;  // null direction from a PSD factor
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    if (l(ii, ii) == 0.0) continue;
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

Matrix cholesky_inverse(const Matrix& l) {
  const std::size_t n = l.rows();
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const auto col = cholesky_solve(l, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  return symmetrized(inv);
}

}  // namespace mdi
