#include "mdi/linreg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdi/error.hpp"

namespace mdi {

using detail::CompensatedSum;

FittedLinearModel fit_ols(const Matrix& design, std::span<const double> response) {
  const std::size_t n = design.rows();
  const std::size_t p = design.cols();
  if (p == 0) throw InvalidParameter("fit_ols: design has no columns");
  if (response.size() != n) throw DimensionMismatch("fit_ols: response length mismatch");
  if (n <= p) {
    throw InsufficientData("fit_ols: need n > p, got n=" + std::to_string(n) +
                           ", p=" + std::to_string(p));
  }
  for (double v : design.data())
    if (!std::isfinite(v)) throw InvalidParameter("fit_ols: non-finite design entry");
  for (double v : response)
    if (!std::isfinite(v)) throw InvalidParameter("fit_ols: non-finite response entry");

  Matrix xtx(p, p);
  std::vector<double> xty(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = j; k < p; ++k) {
      CompensatedSum s;
      for (std::size_t i = 0; i < n; ++i) s.add(design(i, j) * design(i, k));
      xtx(j, k) = xtx(k, j) = s.value();
    }
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) s.add(design(i, j) * response[i]);
    xty[j] = s.value();
  }

  double min_pivot = 0.0, max_diag = 0.0;
  Matrix l;
  try {
    l = detail::cholesky_impl(xtx, false, &min_pivot, &max_diag);
  } catch (const NotPositiveDefinite&) {
    throw RankDeficient("fit_ols: design is rank deficient (collinear columns)");
  }
  if (!(min_pivot > 0.0) || max_diag / min_pivot > 1e12)
    throw RankDeficient("fit_ols: W^T W condition indicator exceeds 1e12");

  FittedLinearModel m;
  m.coefficients = cholesky_solve(l, xty);
  m.df_residual = n - p;
  m.xtx_inv = cholesky_inverse(l);

  m.residuals.resize(n);
  CompensatedSum ssr;
  for (std::size_t i = 0; i < n; ++i) {
    double fitted = 0.0;
    for (std::size_t j = 0; j < p; ++j) fitted += design(i, j) * m.coefficients[j];
    const double r = response[i] - fitted;
    m.residuals[i] = r;
    ssr.add(r * r);
  }
  m.sigma2_hat = std::max(ssr.value(), 0.0) / static_cast<double>(n - p);

  m.coef_cov = Matrix(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) m.coef_cov(i, j) = m.sigma2_hat * m.xtx_inv(i, j);

  const double mean_y = sample_mean(response);
  CompensatedSum tss;
  for (double v : response) tss.add((v - mean_y) * (v - mean_y));
  // TSS == 0 (constant response): define R^2 = 0 so the fit stays usable.
  m.r_squared = tss.value() > 0.0 ? std::clamp(1.0 - ssr.value() / tss.value(), 0.0, 1.0) : 0.0;
  return m;
}

std::vector<double> predict(const FittedLinearModel& model, const Matrix& design) {
  if (design.cols() != model.coefficients.size())
    throw DimensionMismatch("predict: design has " + std::to_string(design.cols()) +
                            " columns, model has " + std::to_string(model.coefficients.size()) +
                            " coefficients");
  std::vector<double> out(design.rows(), 0.0);
  for (std::size_t i = 0; i < design.rows(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < design.cols(); ++j) v += design(i, j) * model.coefficients[j];
    out[i] = v;
  }
  return out;
}

double sample_mean(std::span<const double> values) {
  if (values.empty()) throw InsufficientData("sample_mean: empty input");
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value() / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw InsufficientData("sample_variance: need at least 2 values");
  const double m = sample_mean(values);
  CompensatedSum s;
  for (double v : values) s.add((v - m) * (v - m));
  return s.value() / static_cast<double>(values.size() - 1);
}

double sample_covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("sample_covariance: length mismatch");
  if (a.size() < 2) throw InsufficientData("sample_covariance: need at least 2 values");
  const double ma = sample_mean(a);
  const double mb = sample_mean(b);
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add((a[i] - ma) * (b[i] - mb));
  return s.value() / static_cast<double>(a.size() - 1);
}

}  // namespace mdi
