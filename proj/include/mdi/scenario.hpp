#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mdi/rng.hpp"

namespace mdi {

// Generative world: Z ~ Bern(p_z); X = alpha0 + alpha1 Z + N(0, sigma_x^2);
// Y = beta0 + beta1 X + N(0, sigma_y^2); X is masked with probability
// p_miss_0 when Z = 0 and p_miss_1 when Z = 1 (missing at random given Z).
// Defaults are the running example used throughout the tests.
struct ScenarioParams {
  double p_z = 0.5;
  double alpha0 = 0.0;
  double alpha1 = 1.0;
  double sigma_x = 1.0;
  double beta0 = 0.0;
  double beta1 = 2.0;
  double sigma_y = 1.0;
  double p_miss_0 = 0.25;
  double p_miss_1 = 0.50;

  void validate() const;  // throws InvalidParameter
};

// Column-oriented observations. x_obs holds NaN exactly where r_x == 1.
// x_full is the generation oracle (the unmasked covariate); it is empty when
// the data came from a file without oracle columns.
struct Dataset {
  std::size_t n = 0;
  std::vector<std::uint8_t> z;
  std::vector<double> y;
  std::vector<double> x_obs;
  std::vector<std::uint8_t> r_x;  // 1 = missing
  std::vector<double> x_full;

  bool has_oracle() const { return !x_full.empty(); }
  std::size_t n_missing() const;
  std::size_t n_observed() const { return n - n_missing(); }
  void validate() const;  // throws InvalidParameter on a broken invariant
};

Dataset generate(const ScenarioParams& params, std::size_t n, RngStream& rng);

struct ExpectedBeta {
  double det = 0.0;     // always beta1
  double det_y = 0.0;   // Cov(X_imp,Y) / Var(X_imp) with the outcome in the model
  double stoc = 0.0;    // attenuated: omega * beta1
  double stoc_y = 0.0;  // always beta1
};

// Population quantities for the scenario, all in closed form: conditional
// moments given the missingness indicator, the attenuation factor omega that
// scales both Var(X_imp) and Cov(X_imp, Y) under deterministic imputation,
// the four expected slope estimates, and the coefficient-variance constants.
struct TheoreticalQuantities {
  double pr_r1 = 0.0;
  double pr_z1_given_r0 = 0.0, pr_z1_given_r1 = 0.0;
  double e_x_given_r0 = 0.0, e_x_given_r1 = 0.0;
  double var_x = 0.0;
  double var_x_given_r0 = 0.0, var_x_given_r1 = 0.0;
  double var_xhat_given_r1 = 0.0;  // variance of the point predictions among missing rows
  double cov_xy = 0.0, cov_xy_given_r0 = 0.0;
  double e_y_given_r0 = 0.0, e_y_given_r1 = 0.0;
  double r2_imp = 0.0;  // population R^2 of the imputation model on observed rows
  double omega = 0.0;
  double var_x_imp_det = 0.0, cov_x_imp_det_y = 0.0;
  double var_x_imp_det_y = 0.0, cov_x_imp_det_y_y = 0.0;
  double gamma0 = 0.0, gamma1 = 0.0, gamma2 = 0.0;  // population X ~ (1, Z, Y) coefficients
  ExpectedBeta expected_beta;
  // Numerators of the expected slope variances: coef_var_full and
  // coef_var_model_det divide by (n - 2), coef_var_complete_case by
  // (n_obs - 2).
  double coef_var_full = 0.0;
  double coef_var_model_det = 0.0;
  double coef_var_complete_case = 0.0;
};

// Closed-form evaluation via Bayes rule and the laws of total variance and
// covariance, with fitted coefficients taken at their expected values.
// Throws DegenerateScenario when (almost) everything is missing, when X has
// (near) zero variance marginally or among observed rows, or when the
// with-outcome regression is ill-posed. A missingness-free scenario is fine
// and returns the obvious limits (omega = 1, no attenuation).
TheoreticalQuantities theory_quantities(const ScenarioParams& params);

struct ExpectedCoefficientVariances {
  double full_cohort = 0.0;
  double model_based_det = 0.0;
  double complete_case = 0.0;
};

// The three variance benchmarks evaluated at a concrete n; the complete-case
// entry uses n_obs = n * Pr(R_X = 0).
ExpectedCoefficientVariances expected_coefficient_variances(const ScenarioParams& params,
                                                            std::size_t n);

}  // namespace mdi
