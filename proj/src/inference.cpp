#include "mdi/inference.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mdi/error.hpp"
#include "mdi/parallel.hpp"

namespace mdi {

namespace {

OutcomeFit simple_slope_fit(std::span<const double> x, std::span<const double> y,
                            FitSource source) {
  const std::size_t n = x.size();
  if (n < 3) throw InsufficientData("outcome fit: need at least 3 rows");
  Matrix design(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = x[i];
  }
  const FittedLinearModel fit = fit_ols(design, y);

  const double var_x = sample_variance(x);
  const double var_y = sample_variance(y);
  const double cov = sample_covariance(x, y);
  const double v =
      (var_y / var_x - cov * cov / (var_x * var_x)) / static_cast<double>(n - 2);

  OutcomeFit f;
  f.beta0_hat = fit.coefficients[0];
  f.beta1_hat = fit.coefficients[1];
  f.se_beta1_model = std::sqrt(std::max(v, 0.0));
  f.n_used = n;
  f.source = source;
  return f;
}

}  // namespace

OutcomeFit fit_outcome(const ImputedDataset& imputed) {
  if (imputed.base == nullptr) throw InvalidParameter("fit_outcome: dangling imputed dataset");
  FitSource source{FitSource::Kind::imputed, imputed.method, imputed.draw_index};
  return simple_slope_fit(imputed.x_imp, imputed.base->y, source);
}

OutcomeFit fit_complete_case(const Dataset& data) {
  data.validate();
  std::vector<double> x, y;
  x.reserve(data.n);
  y.reserve(data.n);
  for (std::size_t i = 0; i < data.n; ++i) {
    if (data.r_x[i]) continue;
    x.push_back(data.x_obs[i]);
    y.push_back(data.y[i]);
  }
  if (x.size() < 3) throw InsufficientData("fit_complete_case: fewer than 3 observed rows");
  return simple_slope_fit(x, y, FitSource{FitSource::Kind::complete_case, {}, 0});
}

OutcomeFit fit_full_cohort(const Dataset& data) {
  data.validate();
  if (!data.has_oracle())
    throw InvalidParameter("fit_full_cohort: dataset has no x_full column");
  return simple_slope_fit(data.x_full, data.y, FitSource{FitSource::Kind::full, {}, 0});
}

PooledEstimate pool_rubin(std::span<const OutcomeFit> fits) {
  const std::size_t m = fits.size();
  if (m < 2) throw InsufficientImputations("pool_rubin: need at least 2 fits");
  for (const auto& f : fits) {
    if (f.source.kind != FitSource::Kind::imputed || !f.source.method.stochastic())
      throw InvalidMethod("pool_rubin: every fit must come from a stochastic imputation");
  }
  std::vector<double> beta1(m), beta0(m), within(m);
  for (std::size_t i = 0; i < m; ++i) {
    beta1[i] = fits[i].beta1_hat;
    beta0[i] = fits[i].beta0_hat;
    within[i] = fits[i].se_beta1_model * fits[i].se_beta1_model;
  }
  PooledEstimate p;
  p.m = m;
  p.q_bar = sample_mean(beta1);
  p.intercept = sample_mean(beta0);
  p.w_bar = sample_mean(within);
  p.b = sample_variance(beta1);
  const double inflation = 1.0 + 1.0 / static_cast<double>(m);
  p.t = p.w_bar + inflation * p.b;
  if (p.b > 0.0) {
    const double r = p.w_bar / (inflation * p.b);
    p.df = static_cast<double>(m - 1) * (1.0 + r) * (1.0 + r);
  } else {
    p.df = std::numeric_limits<double>::infinity();
  }
  return p;
}

BootstrapResult bootstrap_se(const Dataset& data, ImputationMethod method, std::size_t b_count,
                             RngStream& rng, unsigned threads) {
  if (b_count < 2) throw InsufficientData("bootstrap_se: need at least 2 replicates");
  data.validate();
  const std::size_t n = data.n;
  if (n == 0) throw InsufficientData("bootstrap_se: empty dataset");

  std::vector<double> slot(b_count, 0.0);
  std::vector<std::uint8_t> ok(b_count, 0);
  parallel_for(b_count, threads, [&](std::size_t r) {
    RngStream sub = rng.substream(r + 1);
    Dataset resampled;
    resampled.n = n;
    resampled.z.resize(n);
    resampled.y.resize(n);
    resampled.x_obs.resize(n);
    resampled.r_x.resize(n);
    if (data.has_oracle()) resampled.x_full.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(sub.uniform_below(n));
      resampled.z[i] = data.z[idx];
      resampled.y[i] = data.y[idx];
      resampled.x_obs[i] = data.x_obs[idx];
      resampled.r_x[i] = data.r_x[idx];
      if (data.has_oracle()) resampled.x_full[i] = data.x_full[idx];
    }
    try {
      const ImputedDataset imp = impute(resampled, method, &sub);
      slot[r] = fit_outcome(imp).beta1_hat;
      ok[r] = 1;
    } catch (const InsufficientData&) {
      // degenerate resample, skipped and counted
    } catch (const RankDeficient&) {
    }
  });

  BootstrapResult out;
  out.replicates.reserve(b_count);
  for (std::size_t r = 0; r < b_count; ++r) {
    if (ok[r])
      out.replicates.push_back(slot[r]);
    else
      ++out.n_skipped;
  }
  if (out.replicates.size() < 2)
    throw InsufficientData("bootstrap_se: fewer than 2 replicates succeeded");
  out.b_count = out.replicates.size();
  out.se = std::sqrt(sample_variance(out.replicates));
  return out;
}

}  // namespace mdi
