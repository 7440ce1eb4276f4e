#include "mdi/scenario.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mdi/error.hpp"

namespace mdi {

namespace {

void check_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw InvalidParameter(std::string(name) + " must be a probability in [0, 1]");
}

void check_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw InvalidParameter(std::string(name) + " must be finite");
}

void check_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0)
    throw InvalidParameter(std::string(name) + " must be finite and >= 0");
}

constexpr double kMissingnessEps = 1e-9;
constexpr double kVarianceEps = 1e-12;

}  // namespace

void ScenarioParams::validate() const {
  check_probability(p_z, "p_z");
  check_probability(p_miss_0, "p_miss_0");
  check_probability(p_miss_1, "p_miss_1");
  check_finite(alpha0, "alpha0");
  check_finite(alpha1, "alpha1");
  check_finite(beta0, "beta0");
  check_finite(beta1, "beta1");
  check_nonneg(sigma_x, "sigma_x");
  check_nonneg(sigma_y, "sigma_y");
}

std::size_t Dataset::n_missing() const {
  std::size_t count = 0;
  for (auto r : r_x) count += r;
  return count;
}

void Dataset::validate() const {
  if (z.size() != n || y.size() != n || x_obs.size() != n || r_x.size() != n)
    throw InvalidParameter("dataset: column lengths disagree with n");
  if (!x_full.empty() && x_full.size() != n)
    throw InvalidParameter("dataset: oracle column length disagrees with n");
  for (std::size_t i = 0; i < n; ++i) {
    if (z[i] > 1) throw InvalidParameter("dataset: z must be 0/1 at row " + std::to_string(i));
    if (r_x[i] > 1)
      throw InvalidParameter("dataset: r_x must be 0/1 at row " + std::to_string(i));
    if (!std::isfinite(y[i]))
      throw InvalidParameter("dataset: non-finite y at row " + std::to_string(i));
    if (r_x[i] == 0) {
      if (!std::isfinite(x_obs[i]))
        throw InvalidParameter("dataset: x_obs absent on an observed row " + std::to_string(i));
      if (!x_full.empty() && x_obs[i] != x_full[i])
        throw InvalidParameter("dataset: x_obs disagrees with x_full at observed row " +
                               std::to_string(i));
    } else if (!std::isnan(x_obs[i])) {
      throw InvalidParameter("dataset: x_obs present on a missing row " + std::to_string(i));
    }
    if (!x_full.empty() && !std::isfinite(x_full[i]))
      throw InvalidParameter("dataset: non-finite x_full at row " + std::to_string(i));
  }
}

Dataset generate(const ScenarioParams& params, std::size_t n, RngStream& rng) {
  params.validate();
  if (n < 1) throw InvalidParameter("generate: n must be >= 1");
  Dataset d;
  d.n = n;
  d.z.resize(n);
  d.y.resize(n);
  d.x_obs.resize(n);
  d.r_x.resize(n);
  d.x_full.resize(n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    const int z = draw_bernoulli(rng, params.p_z);
    const double x = params.alpha0 + params.alpha1 * z + draw_normal(rng, 0.0, params.sigma_x);
    const double y = params.beta0 + params.beta1 * x + draw_normal(rng, 0.0, params.sigma_y);
    const int r = draw_bernoulli(rng, z ? params.p_miss_1 : params.p_miss_0);
    d.z[i] = static_cast<std::uint8_t>(z);
    d.y[i] = y;
    d.x_full[i] = x;
    d.r_x[i] = static_cast<std::uint8_t>(r);
    d.x_obs[i] = r ? nan : x;
  }
  return d;
}

TheoreticalQuantities theory_quantities(const ScenarioParams& params) {
  params.validate();
  TheoreticalQuantities t;

  const double pz = params.p_z;
  const double a0 = params.alpha0, a1 = params.alpha1;
  const double b0 = params.beta0, b1 = params.beta1;
  const double sx2 = params.sigma_x * params.sigma_x;
  const double sy2 = params.sigma_y * params.sigma_y;

  const double pr1 = params.p_miss_0 * (1.0 - pz) + params.p_miss_1 * pz;
  const double pr0 = 1.0 - pr1;
  if (pr1 > 1.0 - kMissingnessEps)
    throw DegenerateScenario("theory_quantities: (almost) every row is missing");

  t.var_x = sx2 + a1 * a1 * pz * (1.0 - pz);
  if (t.var_x < kVarianceEps)
    throw DegenerateScenario("theory_quantities: X has (near) zero variance");

  // Pr(Z=1 | R_X = r) by Bayes rule. With no missingness the R=1 stratum is
  // empty; use the marginal as its limit so every weighted-by-pr1 term below
  // contributes exactly zero.
  const bool none_missing = pr1 <= kMissingnessEps;
  const double q0 = none_missing ? pz : (1.0 - params.p_miss_1) * pz / pr0;
  const double q1 = none_missing ? pz : params.p_miss_1 * pz / pr1;
  const double vz0 = q0 * (1.0 - q0);
  const double vz1 = q1 * (1.0 - q1);

  t.pr_r1 = pr1;
  t.pr_z1_given_r0 = q0;
  t.pr_z1_given_r1 = q1;
  t.e_x_given_r0 = a0 + a1 * q0;
  t.e_x_given_r1 = a0 + a1 * q1;
  t.var_x_given_r0 = sx2 + a1 * a1 * vz0;
  t.var_x_given_r1 = sx2 + a1 * a1 * vz1;
  t.var_xhat_given_r1 = a1 * a1 * vz1;
  t.cov_xy = b1 * t.var_x;
  t.cov_xy_given_r0 = b1 * t.var_x_given_r0;
  t.e_y_given_r0 = b0 + b1 * t.e_x_given_r0;
  t.e_y_given_r1 = b0 + b1 * t.e_x_given_r1;

  if (t.var_x_given_r0 < kVarianceEps)
    throw DegenerateScenario("theory_quantities: observed X has (near) zero variance");
  t.r2_imp = a1 * a1 * vz0 / t.var_x_given_r0;

  // omega = 1 + Pr(R=1) { R^2 delta_0 Var(Z|R=1)/Var(Z|R=0) - delta_1 } with
  // delta_r = Var(X|R=r)/Var(X); the first product telescopes to
  // alpha1^2 Var(Z|R=1) / Var(X), which stays finite when Var(Z|R=0) = 0.
  const double delta1 = t.var_x_given_r1 / t.var_x;
  t.omega = 1.0 + pr1 * (a1 * a1 * vz1 / t.var_x - delta1);

  // Law of total variance: weighted conditional variances plus the squared
  // gap between the observed and imputed means.
  const double mean_gap = t.e_x_given_r0 - t.e_x_given_r1;
  t.var_x_imp_det = t.var_x_given_r0 * pr0 + t.var_xhat_given_r1 * pr1 +
                    mean_gap * mean_gap * pr0 * pr1;

  // Law of total covariance: weighted conditional covariances plus the
  // covariance of the conditional means.
  const double e_y = b0 + b1 * (a0 + a1 * pz);
  const double cov_xhat_y_r1 = a1 * a1 * b1 * vz1;
  const double e_x_imp = pr0 * t.e_x_given_r0 + pr1 * t.e_x_given_r1;
  t.cov_x_imp_det_y = t.cov_xy_given_r0 * pr0 + cov_xhat_y_r1 * pr1 +
                      t.e_y_given_r0 * t.e_x_given_r0 * pr0 +
                      t.e_y_given_r1 * t.e_x_given_r1 * pr1 - e_y * e_x_imp;

  // Population coefficients of X on (1, Z, Y); identical whether computed
  // marginally or conditional on R=0, since they depend only on the noise
  // scales and slopes.
  const double denom = b1 * b1 * sx2 + sy2;
  if (denom < kVarianceEps)
    throw DegenerateScenario("theory_quantities: X ~ (Z, Y) regression is ill-posed "
                             "(both noise scales are zero)");
  t.gamma1 = a1 * sy2 / denom;
  t.gamma2 = b1 * sx2 / denom;
  t.gamma0 = a0 * (1.0 - t.gamma2 * b1) - t.gamma2 * b0;

  const double var_y_r1 = b1 * b1 * t.var_x_given_r1 + sy2;
  const double cov_zy_r1 = b1 * a1 * vz1;
  const double var_xhat_y_r1 = t.gamma1 * t.gamma1 * vz1 + t.gamma2 * t.gamma2 * var_y_r1 +
                               2.0 * t.gamma1 * t.gamma2 * cov_zy_r1;
  const double e_xhat_y_r1 = t.gamma0 + t.gamma1 * q1 + t.gamma2 * t.e_y_given_r1;
  const double cov_xhat_y_y_r1 = t.gamma1 * cov_zy_r1 + t.gamma2 * var_y_r1;

  const double mean_gap_y = t.e_x_given_r0 - e_xhat_y_r1;
  t.var_x_imp_det_y = t.var_x_given_r0 * pr0 + var_xhat_y_r1 * pr1 +
                      mean_gap_y * mean_gap_y * pr0 * pr1;
  const double e_x_imp_y = pr0 * t.e_x_given_r0 + pr1 * e_xhat_y_r1;
  t.cov_x_imp_det_y_y = t.cov_xy_given_r0 * pr0 + cov_xhat_y_y_r1 * pr1 +
                        t.e_y_given_r0 * t.e_x_given_r0 * pr0 +
                        t.e_y_given_r1 * e_xhat_y_r1 * pr1 - e_y * e_x_imp_y;

  // Deterministic imputation attenuates variance and covariance by the same
  // factor, so the slope survives; the stochastic variant restores the
  // variance but keeps the attenuated covariance.
  t.expected_beta.det = b1;
  t.expected_beta.det_y = t.cov_x_imp_det_y_y / t.var_x_imp_det_y;
  t.expected_beta.stoc = t.cov_x_imp_det_y / t.var_x;
  t.expected_beta.stoc_y = b1;

  const double var_y = b1 * b1 * t.var_x + sy2;
  const double ratio = t.cov_xy / t.var_x;
  t.coef_var_full = var_y / t.var_x - ratio * ratio;
  t.coef_var_model_det = var_y / (t.var_x * t.omega) - ratio * ratio;
  const double var_y_r0 = b1 * b1 * t.var_x_given_r0 + sy2;
  const double ratio_r0 = t.cov_xy_given_r0 / t.var_x_given_r0;
  t.coef_var_complete_case = var_y_r0 / t.var_x_given_r0 - ratio_r0 * ratio_r0;

  return t;
}

ExpectedCoefficientVariances expected_coefficient_variances(const ScenarioParams& params,
                                                            std::size_t n) {
  const TheoreticalQuantities t = theory_quantities(params);
  if (n <= 2) throw InsufficientData("expected_coefficient_variances: need n > 2");
  const double n_obs = static_cast<double>(n) * (1.0 - t.pr_r1);
  if (n_obs <= 2.0)
    throw InsufficientData("expected_coefficient_variances: expected observed count <= 2");
  ExpectedCoefficientVariances v;
  v.full_cohort = t.coef_var_full / static_cast<double>(n - 2);
  v.model_based_det = t.coef_var_model_det / static_cast<double>(n - 2);
  v.complete_case = t.coef_var_complete_case / (n_obs - 2.0);
  return v;
}

}  // namespace mdi
