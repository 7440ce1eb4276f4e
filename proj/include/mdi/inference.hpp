#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mdi/imputer.hpp"
#include "mdi/scenario.hpp"

namespace mdi {

struct FitSource {
  enum class Kind { full, complete_case, imputed };
  Kind kind = Kind::full;
  ImputationMethod method;     // meaningful when kind == imputed
  std::size_t draw_index = 0;  // likewise
};

// Slope fit of the outcome on one covariate column, with the model-based
// standard error that treats that column as fixed:
//   Var(b1) = { var(y)/var(x) - cov(x,y)^2/var(x)^2 } / (n - 2).
struct OutcomeFit {
  double beta0_hat = 0.0;
  double beta1_hat = 0.0;
  double se_beta1_model = 0.0;
  std::size_t n_used = 0;
  FitSource source;
};

OutcomeFit fit_outcome(const ImputedDataset& imputed);

// Outcome on x_obs restricted to the observed rows.
OutcomeFit fit_complete_case(const Dataset& data);

// Outcome on the unmasked covariate; needs the generation oracle column.
OutcomeFit fit_full_cohort(const Dataset& data);

// Rubin's rules over m >= 2 stochastic-imputation fits: pooled estimate,
// within/between variance split, total variance with the (1 + 1/m) between
// inflation, and the classical large-sample degrees of freedom
// (m-1)(1 + w / ((1+1/m) b))^2 (+inf when b == 0).
struct PooledEstimate {
  double q_bar = 0.0;
  double w_bar = 0.0;
  double b = 0.0;
  double t = 0.0;
  double df = 0.0;
  std::size_t m = 0;
  double intercept = 0.0;  // mean of the per-imputation intercepts, reported only

  double se() const { return std::sqrt(t); }
};

PooledEstimate pool_rubin(std::span<const OutcomeFit> fits);

struct BootstrapResult {
  std::vector<double> replicates;  // successful replicates, in replicate order
  double se = 0.0;                 // sample standard deviation of the replicates
  std::size_t b_count = 0;         // == replicates.size()
  std::size_t n_skipped = 0;       // degenerate resamples (rank deficient / too few rows)
};

// Resample n rows with replacement, refit the imputation model, impute, fit
// the outcome, record the slope; repeated b_count times. Replicate i always
// uses substream key i+1, so results are independent of the thread count.
BootstrapResult bootstrap_se(const Dataset& data, ImputationMethod method, std::size_t b_count,
                             RngStream& rng, unsigned threads = 1);

}  // namespace mdi
