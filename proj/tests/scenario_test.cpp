#include <cmath>
#include <vector>

#include <doctest.h>

#include "mdi/error.hpp"
#include "mdi/imputer.hpp"
#include "mdi/linreg.hpp"
#include "mdi/rng.hpp"
#include "mdi/scenario.hpp"
#include "support/fixtures.hpp"

using mdi::ScenarioParams;

namespace {

ScenarioParams random_params(mdi::RngStream& rng) {
  auto unif = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); };
  ScenarioParams p;
  p.p_z = unif(0.2, 0.8);
  p.alpha0 = unif(-1.0, 1.0);
  p.alpha1 = unif(0.5, 2.0);
  p.sigma_x = unif(0.5, 1.5);
  p.beta0 = unif(-1.0, 1.0);
  p.beta1 = unif(-2.0, 2.0);
  p.sigma_y = unif(0.5, 1.5);
  p.p_miss_0 = unif(0.05, 0.7);
  p.p_miss_1 = unif(0.05, 0.7);
  return p;
}

}  // namespace

TEST_CASE("noiseless generation is exact") {
  ScenarioParams p;
  p.sigma_x = 0.0;
  p.sigma_y = 0.0;
  mdi::RngStream rng(7, 0);
  const auto d = mdi::generate(p, 500, rng);
  for (std::size_t i = 0; i < d.n; ++i) {
    CHECK(d.x_full[i] == static_cast<double>(d.z[i]));
    CHECK(d.y[i] == 2.0 * static_cast<double>(d.z[i]));
  }
}

TEST_CASE("default-scenario sample moments at n = 1e6") {
  const auto& d = testsupport::default_scenario_1m();
  CHECK(std::abs(mdi::sample_mean(d.x_full) - 0.5) < 0.005);
  CHECK(std::abs(mdi::sample_variance(d.x_full) - 1.25) < 0.01);
  const double frac_missing = static_cast<double>(d.n_missing()) / static_cast<double>(d.n);
  CHECK(std::abs(frac_missing - 0.375) < 0.002);
}

TEST_CASE("fitted imputation model predicts 1 for the z = 1 stratum") {
  const auto& d = testsupport::default_scenario_1m();
  mdi::Matrix design(d.n_observed(), 2);
  std::vector<double> response;
  response.reserve(d.n_observed());
  for (std::size_t i = 0; i < d.n; ++i) {
    if (d.r_x[i]) continue;
    design(response.size(), 0) = 1.0;
    design(response.size(), 1) = static_cast<double>(d.z[i]);
    response.push_back(d.x_obs[i]);
  }
  const auto fit = mdi::fit_ols(design, response);
  mdi::Matrix one_row(1, 2);
  one_row(0, 0) = 1.0;
  one_row(0, 1) = 1.0;
  CHECK(std::abs(mdi::predict(fit, one_row)[0] - 1.0) < 0.01);
}

TEST_CASE("generate rejects invalid inputs") {
  mdi::RngStream rng(1, 0);
  ScenarioParams bad;
  bad.p_z = 1.2;
  CHECK_THROWS_AS(mdi::generate(bad, 10, rng), mdi::InvalidParameter);
  ScenarioParams neg;
  neg.sigma_x = -1.0;
  CHECK_THROWS_AS(mdi::generate(neg, 10, rng), mdi::InvalidParameter);
  CHECK_THROWS_AS(mdi::generate(ScenarioParams{}, 0, rng), mdi::InvalidParameter);
}

TEST_CASE("theory oracle reproduces the default-scenario constants") {
  const auto t = mdi::theory_quantities(ScenarioParams{});
  CHECK(std::abs(t.pr_r1 - 0.375) < 1e-12);
  CHECK(std::abs(t.pr_z1_given_r0 - 0.4) < 1e-12);
  CHECK(std::abs(t.pr_z1_given_r1 - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(t.e_x_given_r0 - 0.4) < 1e-12);
  CHECK(std::abs(t.e_x_given_r1 - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(t.var_x - 1.25) < 1e-12);
  CHECK(std::abs(t.var_x_given_r0 - 1.24) < 1e-12);
  CHECK(std::abs(t.var_x_given_r1 - 11.0 / 9.0) < 1e-12);
  CHECK(std::abs(t.var_xhat_given_r1 - 2.0 / 9.0) < 1e-12);
  CHECK(std::abs(t.cov_xy - 2.5) < 1e-12);
  CHECK(std::abs(t.cov_xy_given_r0 - 2.48) < 1e-12);
  CHECK(std::abs(t.e_y_given_r0 - 0.8) < 1e-12);
  CHECK(std::abs(t.e_y_given_r1 - 4.0 / 3.0) < 1e-12);
  CHECK(std::abs(t.r2_imp - 0.24 / 1.24) < 1e-12);
  CHECK(std::abs(t.omega - 0.7) < 1e-12);
  CHECK(std::abs(t.var_x_imp_det - 0.875) < 1e-12);
  CHECK(std::abs(t.cov_x_imp_det_y - 1.75) < 1e-12);
  CHECK(std::abs(t.var_x_imp_det_y - 1.175) < 1e-12);
  CHECK(std::abs(t.cov_x_imp_det_y_y - 2.5) < 1e-12);
  CHECK(std::abs(t.gamma0 - 0.0) < 1e-12);
  CHECK(std::abs(t.gamma1 - 0.2) < 1e-12);
  CHECK(std::abs(t.gamma2 - 0.4) < 1e-12);
  CHECK(t.expected_beta.det == 2.0);
  CHECK(std::abs(t.expected_beta.det_y - 2.5 / 1.175) < 1e-12);
  CHECK(std::abs(t.expected_beta.stoc - 1.4) < 1e-12);
  CHECK(t.expected_beta.stoc_y == 2.0);
}

TEST_CASE("no missingness collapses the oracle to the obvious limits") {
  ScenarioParams p;
  p.p_miss_0 = 0.0;
  p.p_miss_1 = 0.0;
  const auto t = mdi::theory_quantities(p);
  CHECK(t.omega == doctest::Approx(1.0));
  CHECK(t.var_x_imp_det == doctest::Approx(1.25));
  CHECK(t.cov_x_imp_det_y == doctest::Approx(2.5));
  CHECK(t.expected_beta.det == 2.0);
  CHECK(t.expected_beta.det_y == doctest::Approx(2.0));
  CHECK(t.expected_beta.stoc == doctest::Approx(2.0));
  CHECK(t.expected_beta.stoc_y == 2.0);

  const auto v = mdi::expected_coefficient_variances(p, 102);
  CHECK(v.full_cohort == doctest::Approx(v.model_based_det));
  CHECK(v.full_cohort == doctest::Approx(v.complete_case));
}

TEST_CASE("completely-at-random missingness attenuates by 1 + p (R2 - 1)") {
  ScenarioParams p;
  p.p_miss_0 = 0.25;
  p.p_miss_1 = 0.25;
  const auto t = mdi::theory_quantities(p);
  // R2 = 0.2 here, so omega = 1 + 0.25 (0.2 - 1) = 0.8; the between-group
  // term of the variance decomposition is exactly zero.
  CHECK(std::abs(t.omega - 0.8) < 1e-12);
  CHECK(std::abs(t.expected_beta.stoc - 1.6) < 1e-12);
  CHECK(std::abs(t.e_x_given_r0 - t.e_x_given_r1) < 1e-12);
}

TEST_CASE("expected coefficient variances at n = 102") {
  const auto v = mdi::expected_coefficient_variances(ScenarioParams{}, 102);
  CHECK(std::abs(v.full_cohort - 0.008) < 1e-12);
  CHECK(std::abs(v.model_based_det * 100.0 - 2.857142857142857) < 1e-9);
  CHECK(std::abs(v.complete_case - 0.8064516129032258 / 61.75) < 1e-12);
  CHECK(std::abs(v.model_based_det - 0.029) < 0.001);
  CHECK(std::abs(v.complete_case - 0.013) < 0.001);

  CHECK_THROWS_AS(mdi::expected_coefficient_variances(ScenarioParams{}, 2),
                  mdi::InsufficientData);
  ScenarioParams nearly_all_missing;
  nearly_all_missing.p_miss_0 = 0.99;
  nearly_all_missing.p_miss_1 = 0.99;
  CHECK_THROWS_AS(mdi::expected_coefficient_variances(nearly_all_missing, 102),
                  mdi::InsufficientData);
}

TEST_CASE("degenerate scenarios are rejected") {
  ScenarioParams all_missing;
  all_missing.p_miss_0 = 1.0;
  all_missing.p_miss_1 = 1.0;
  CHECK_THROWS_AS(mdi::theory_quantities(all_missing), mdi::DegenerateScenario);

  ScenarioParams flat_x;
  flat_x.alpha1 = 0.0;
  flat_x.sigma_x = 0.0;
  CHECK_THROWS_AS(mdi::theory_quantities(flat_x), mdi::DegenerateScenario);

  ScenarioParams no_noise;
  no_noise.sigma_x = 0.0;
  no_noise.sigma_y = 0.0;
  CHECK_THROWS_AS(mdi::theory_quantities(no_noise), mdi::DegenerateScenario);
}

TEST_CASE("oracle invariants hold over randomized scenarios") {
  mdi::RngStream rng(301, 0);
  for (int round = 0; round < 300; ++round) {
    const auto p = random_params(rng);
    const auto t = mdi::theory_quantities(p);

    // law of total expectation closure
    const double closure =
        t.pr_z1_given_r0 * (1.0 - t.pr_r1) + t.pr_z1_given_r1 * t.pr_r1;
    CHECK(std::abs(closure - p.p_z) < 1e-12);

    // both attenuation routes agree
    CHECK(std::abs(t.var_x_imp_det / t.var_x - t.omega) < 1e-12);
    if (std::abs(t.cov_xy) > 1e-9)
      CHECK(std::abs(t.cov_x_imp_det_y / t.cov_xy - t.omega) < 1e-10);

    // the with-outcome model keeps the marginal covariance
    CHECK(std::abs(t.cov_x_imp_det_y_y - t.cov_xy) < 1e-12);

    CHECK(t.expected_beta.det == p.beta1);
    CHECK(t.expected_beta.stoc_y == p.beta1);
    CHECK(std::abs(t.expected_beta.stoc - t.omega * p.beta1) < 1e-10);
  }
}

TEST_CASE("empirical moments track the oracle over randomized scenarios") {
  mdi::RngStream rng(302, 0);
  for (int round = 0; round < 4; ++round) {
    const auto p = random_params(rng);
    const auto t = mdi::theory_quantities(p);
    mdi::RngStream gen = rng.substream(100 + round);
    const auto data = mdi::generate(p, 1000000, gen);
    const auto imp = mdi::impute(data, {mdi::ImputationKind::deterministic, false}, nullptr);

    const double var = mdi::sample_variance(imp.x_imp);
    const double cov = mdi::sample_covariance(imp.x_imp, data.y);

    // Monte Carlo standard errors from the realized fourth moments.
    const double mx = mdi::sample_mean(imp.x_imp);
    const double my = mdi::sample_mean(data.y);
    double m4 = 0.0, mxy2 = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
      const double dx = imp.x_imp[i] - mx;
      const double dy = data.y[i] - my;
      m4 += dx * dx * dx * dx;
      mxy2 += dx * dx * dy * dy;
    }
    m4 /= static_cast<double>(data.n);
    mxy2 /= static_cast<double>(data.n);
    const double se_var = std::sqrt((m4 - var * var) / static_cast<double>(data.n));
    const double se_cov = std::sqrt((mxy2 - cov * cov) / static_cast<double>(data.n));

    CHECK(std::abs(var - t.var_x_imp_det) < 5.0 * se_var);
    CHECK(std::abs(cov - t.cov_x_imp_det_y) < 5.0 * se_cov);
  }
}
