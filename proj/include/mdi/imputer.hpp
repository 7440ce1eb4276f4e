#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mdi/linreg.hpp"
#include "mdi/rng.hpp"
#include "mdi/scenario.hpp"

namespace mdi {

enum class ImputationKind { deterministic, stochastic };

// The four model choices: point predictions vs posterior-predictive draws,
// each with or without the outcome among the predictors.
struct ImputationMethod {
  ImputationKind kind = ImputationKind::deterministic;
  bool include_outcome = false;

  bool stochastic() const { return kind == ImputationKind::stochastic; }

  // Names used on the command line: det, det-y, stoc, stoc-y.
  static ImputationMethod from_string(std::string_view name);
  std::string to_string() const;
};

// A completed covariate column. Observed entries are copied bit-exactly from
// x_obs; only the missing rows are filled in.
struct ImputedDataset {
  const Dataset* base = nullptr;
  std::vector<double> x_imp;
  ImputationMethod method;
  std::size_t draw_index = 0;  // 0 for deterministic, 1..m for stochastic draws
  FittedLinearModel imputation_fit;
};

// Fit x_obs on (1, z) or (1, z, y) over the observed rows, then fill the
// missing rows. Deterministic: the point prediction. Stochastic: draw the
// residual variance from a scaled inverse chi-squared with df = n_obs - p and
// scale = mean squared residual, draw coefficients from
// MVN(fit, sigma2_dot (W^T W)^-1), then add independent N(0, sigma2_dot)
// noise per missing row. rng is required exactly when the method is
// stochastic.
ImputedDataset impute(const Dataset& data, ImputationMethod method, RngStream* rng = nullptr);

// m independent stochastic draws, one per substream key 1..m, so the result
// does not depend on evaluation order. Deterministic methods are rejected
// (the m copies would be identical).
std::vector<ImputedDataset> impute_multiple(const Dataset& data, ImputationMethod method,
                                            std::size_t m, RngStream& rng);

}  // namespace mdi
