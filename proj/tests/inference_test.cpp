#include <cmath>
#include <vector>

#include <doctest.h>

#include "mdi/error.hpp"
#include "mdi/imputer.hpp"
#include "mdi/inference.hpp"
#include "mdi/linreg.hpp"
#include "mdi/rng.hpp"
#include "mdi/scenario.hpp"
#include "support/fixtures.hpp"

using mdi::ImputationKind;
using mdi::ImputationMethod;

namespace {

constexpr ImputationMethod kDet{ImputationKind::deterministic, false};
constexpr ImputationMethod kDetY{ImputationKind::deterministic, true};
constexpr ImputationMethod kStoc{ImputationKind::stochastic, false};
constexpr ImputationMethod kStocY{ImputationKind::stochastic, true};

mdi::OutcomeFit synthetic_fit(double beta1, double se) {
  mdi::OutcomeFit f;
  f.beta1_hat = beta1;
  f.se_beta1_model = se;
  f.n_used = 100;
  f.source = {mdi::FitSource::Kind::imputed, kStocY, 1};
  return f;
}

}  // namespace

TEST_CASE("noiseless outcome gives an exact slope and zero SE") {
  mdi::ScenarioParams p;
  p.sigma_y = 0.0;
  p.p_miss_0 = 0.0;
  p.p_miss_1 = 0.0;
  mdi::RngStream rng(31, 0);
  const auto d = mdi::generate(p, 100, rng);
  const auto fit = mdi::fit_outcome(mdi::impute(d, kDet));
  CHECK(std::abs(fit.beta1_hat - 2.0) < 1e-10);
  CHECK(fit.se_beta1_model < 1e-8);
}

TEST_CASE("slope equals cov/var for every fit") {
  mdi::RngStream rng(32, 0);
  const auto d = mdi::generate(mdi::ScenarioParams{}, 5000, rng);
  for (const auto method : {kDet, kDetY, kStoc, kStocY}) {
    mdi::RngStream draw = rng.substream(method.include_outcome ? 1 : 2);
    const auto imp = mdi::impute(d, method, &draw);
    const auto fit = mdi::fit_outcome(imp);
    const double cov = mdi::sample_covariance(imp.x_imp, d.y);
    const double var = mdi::sample_variance(imp.x_imp);
    CHECK(std::abs(fit.beta1_hat * var - cov) < 1e-9);
  }
}

TEST_CASE("large-sample slopes for the four methods") {
  const auto& d = testsupport::default_scenario_1m();
  mdi::RngStream rng(33, 0);
  CHECK(std::abs(mdi::fit_outcome(mdi::impute(d, kDet)).beta1_hat - 2.0) < 0.01);
  CHECK(std::abs(mdi::fit_outcome(mdi::impute(d, kDetY)).beta1_hat - 2.128) < 0.02);
  mdi::RngStream s1 = rng.substream(1), s2 = rng.substream(2);
  CHECK(std::abs(mdi::fit_outcome(mdi::impute(d, kStoc, &s1)).beta1_hat - 1.4) < 0.01);
  CHECK(std::abs(mdi::fit_outcome(mdi::impute(d, kStocY, &s2)).beta1_hat - 2.0) < 0.01);
}

TEST_CASE("complete-case fit") {
  mdi::ScenarioParams none;
  none.p_miss_0 = 0.0;
  none.p_miss_1 = 0.0;
  mdi::RngStream rng(34, 0);
  const auto d = mdi::generate(none, 500, rng);
  const auto cc = mdi::fit_complete_case(d);
  const auto full = mdi::fit_full_cohort(d);
  CHECK(cc.beta1_hat == doctest::Approx(full.beta1_hat).epsilon(1e-12));
  CHECK(cc.n_used == d.n);

  const auto& big = testsupport::default_scenario_1m();
  const auto cc_big = mdi::fit_complete_case(big);
  CHECK(std::abs(cc_big.beta1_hat - 2.0) < 0.01);
  CHECK(cc_big.n_used == big.n_observed());

  mdi::Dataset tiny;
  tiny.n = 3;
  tiny.z = {0, 1, 1};
  tiny.y = {0.0, 1.0, 2.0};
  tiny.x_obs = {0.5, std::nan(""), std::nan("")};
  tiny.r_x = {0, 1, 1};
  CHECK_THROWS_AS(mdi::fit_complete_case(tiny), mdi::InsufficientData);
}

TEST_CASE("model-based variances average near their expected constants") {
  // at n = 102: ~2.857/(n-2) after deterministic imputation and
  // ~0.806/(n_obs-2) for the complete-case fit
  const std::size_t n = 102;
  const int reps = 4000;
  std::vector<double> model_var(reps), cc_var(reps);
  for (int r = 0; r < reps; ++r) {
    mdi::RngStream rng(500, static_cast<std::uint64_t>(r));
    const auto d = mdi::generate(mdi::ScenarioParams{}, n, rng);
    const auto fit = mdi::fit_outcome(mdi::impute(d, kDet));
    model_var[r] = fit.se_beta1_model * fit.se_beta1_model;
    const auto cc = mdi::fit_complete_case(d);
    cc_var[r] = cc.se_beta1_model * cc.se_beta1_model;
  }
  CHECK(std::abs(mdi::sample_mean(model_var) - 0.029) < 0.0029);
  CHECK(std::abs(mdi::sample_mean(cc_var) - 0.013) < 0.0013);
}

TEST_CASE("bootstrap tracks the true sampling variance at n = 102") {
  // averaged over independent datasets, se^2 from the resampling pipeline
  // estimates the generate-impute-fit sampling variance (~0.0207)
  const int datasets = 50;
  std::vector<double> boot_var(datasets);
  for (int r = 0; r < datasets; ++r) {
    mdi::RngStream rng(600, static_cast<std::uint64_t>(r));
    const auto d = mdi::generate(mdi::ScenarioParams{}, 102, rng);
    const auto boot = mdi::bootstrap_se(d, kDet, 200, rng);
    boot_var[r] = boot.se * boot.se;
  }
  const double mean = mdi::sample_mean(boot_var);
  CHECK(std::abs(mean - 0.0207) < 0.25 * 0.0207);
}

TEST_CASE("rubin pooling") {
  SUBCASE("identical fits collapse to zero between-variance") {
    std::vector<mdi::OutcomeFit> fits(5, synthetic_fit(1.7, 0.2));
    const auto p = mdi::pool_rubin(fits);
    CHECK(p.q_bar == doctest::Approx(1.7));
    CHECK(p.b == doctest::Approx(0.0));
    CHECK(p.t == doctest::Approx(p.w_bar));
    CHECK(std::isinf(p.df));
  }

  SUBCASE("hand-computed two-fit case") {
    std::vector<mdi::OutcomeFit> fits = {synthetic_fit(1.0, 0.0), synthetic_fit(3.0, 0.0)};
    const auto p = mdi::pool_rubin(fits);
    CHECK(p.q_bar == doctest::Approx(2.0));
    CHECK(p.b == doctest::Approx(2.0));
    CHECK(p.t == doctest::Approx(3.0));  // 0 + (1 + 1/2) 2
  }

  SUBCASE("total variance is nondecreasing in the between component") {
    double last_t = -1.0;
    for (double spread : {0.0, 0.1, 0.5, 1.0, 2.0}) {
      std::vector<mdi::OutcomeFit> fits = {synthetic_fit(2.0 - spread, 0.3),
                                           synthetic_fit(2.0 + spread, 0.3)};
      const auto p = mdi::pool_rubin(fits);
      CHECK(p.t >= last_t);
      CHECK(p.t >= p.w_bar);
      CHECK(p.b >= 0.0);
      if (p.b > 0.0) CHECK(p.df > 0.0);
      last_t = p.t;
    }
  }

  SUBCASE("guards") {
    std::vector<mdi::OutcomeFit> one = {synthetic_fit(2.0, 0.1)};
    CHECK_THROWS_AS(mdi::pool_rubin(one), mdi::InsufficientImputations);
    std::vector<mdi::OutcomeFit> det_fits(3, synthetic_fit(2.0, 0.1));
    for (auto& f : det_fits) f.source.method = kDet;
    CHECK_THROWS_AS(mdi::pool_rubin(det_fits), mdi::InvalidMethod);
  }
}

TEST_CASE("pooled estimate on the applied-scale dataset") {
  mdi::RngStream rng(36, 0);
  const auto d = mdi::generate(mdi::ScenarioParams{}, 1000, rng);
  mdi::RngStream draws(36, 1);
  const auto imps = mdi::impute_multiple(d, kStocY, 40, draws);
  std::vector<mdi::OutcomeFit> fits;
  for (const auto& imp : imps) fits.push_back(mdi::fit_outcome(imp));
  const auto p = mdi::pool_rubin(fits);
  CHECK(std::abs(p.q_bar - 2.0) < 0.1);
  CHECK(p.se() > 0.025);
  CHECK(p.se() < 0.05);
  CHECK(p.m == 40);
}

TEST_CASE("bootstrap determinism and degenerate data") {
  mdi::ScenarioParams clean;
  clean.p_miss_0 = 0.0;
  clean.p_miss_1 = 0.0;
  clean.sigma_y = 0.0;
  mdi::RngStream gen(37, 0);
  const auto exact = mdi::generate(clean, 60, gen);
  mdi::RngStream boot_rng(38, 0);
  const auto result = mdi::bootstrap_se(exact, kDet, 50, boot_rng);
  CHECK(result.se < 1e-10);  // every resample refits the same exact line
  CHECK(result.b_count == 50);

  const auto d = mdi::generate(mdi::ScenarioParams{}, 300, gen);
  mdi::RngStream r1(39, 0), r2(39, 0), r3(39, 0);
  const auto a = mdi::bootstrap_se(d, kStoc, 60, r1, 1);
  const auto b = mdi::bootstrap_se(d, kStoc, 60, r2, 1);
  const auto c = mdi::bootstrap_se(d, kStoc, 60, r3, 4);
  CHECK(a.replicates == b.replicates);
  CHECK(a.replicates == c.replicates);  // thread count must not matter

  CHECK_THROWS_AS(mdi::bootstrap_se(d, kDet, 1, r1), mdi::InsufficientData);
}

TEST_CASE("bootstrap skips degenerate resamples and counts them") {
  // 6 rows with only 4 observed: resamples often lose too many observed rows
  // or end up with a constant z column.
  mdi::Dataset d;
  d.n = 6;
  d.z = {0, 0, 0, 1, 1, 1};
  d.y = {0.1, 0.8, 1.7, 2.2, 3.1, 4.0};
  d.x_obs = {0.2, 0.5, std::nan(""), 1.3, 0.9, std::nan("")};
  d.r_x = {0, 0, 1, 0, 0, 1};
  mdi::RngStream rng(40, 0);
  const auto result = mdi::bootstrap_se(d, kDet, 300, rng);
  CHECK(result.n_skipped > 0);
  CHECK(result.b_count + result.n_skipped == 300);
  CHECK(result.replicates.size() == result.b_count);
  CHECK(result.se >= 0.0);
}
