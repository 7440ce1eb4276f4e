#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mdi/matrix.hpp"

namespace mdi {

// Least-squares fit artifacts for a design with p columns (intercept first
// whenever the caller put one there).
struct FittedLinearModel {
  std::vector<double> coefficients;
  double sigma2_hat = 0.0;    // SSR / (n - p)
  Matrix coef_cov;            // sigma2_hat * (W^T W)^-1
  Matrix xtx_inv;             // (W^T W)^-1, kept for posterior coefficient draws
  double r_squared = 0.0;     // 1 - SSR/TSS, 0 when TSS == 0
  std::size_t df_residual = 0;
  std::vector<double> residuals;
};

// OLS via Cholesky of the normal equations (p is at most 3 here, so no QR).
// Throws RankDeficient when the condition indicator of W^T W exceeds 1e12,
// InsufficientData when n <= p.
FittedLinearModel fit_ols(const Matrix& design, std::span<const double> response);

// Linear predictor, one value per design row.
std::vector<double> predict(const FittedLinearModel& model, const Matrix& design);

double sample_mean(std::span<const double> values);

// n-1 denominators throughout.
double sample_variance(std::span<const double> values);
double sample_covariance(std::span<const double> a, std::span<const double> b);

}  // namespace mdi
