#include "mdi/imputer.hpp"

#include <cmath>
#include <string>

#include "mdi/error.hpp"

namespace mdi {

ImputationMethod ImputationMethod::from_string(std::string_view name) {
  if (name == "det") return {ImputationKind::deterministic, false};
  if (name == "det-y") return {ImputationKind::deterministic, true};
  if (name == "stoc") return {ImputationKind::stochastic, false};
  if (name == "stoc-y") return {ImputationKind::stochastic, true};
  throw InvalidMethod("unknown imputation method '" + std::string(name) +
                      "' (expected det, det-y, stoc or stoc-y)");
}

std::string ImputationMethod::to_string() const {
  std::string s = stochastic() ? "stoc" : "det";
  if (include_outcome) s += "-y";
  return s;
}

namespace {

ImputedDataset impute_impl(const Dataset& data, ImputationMethod method, RngStream* rng,
                           std::size_t draw_index) {
  data.validate();
  if (method.stochastic() && rng == nullptr)
    throw MissingRng("stochastic imputation needs an rng");

  const std::size_t p = method.include_outcome ? 3 : 2;
  std::vector<std::size_t> observed;
  observed.reserve(data.n);
  for (std::size_t i = 0; i < data.n; ++i)
    if (data.r_x[i] == 0) observed.push_back(i);
  const std::size_t n_obs = observed.size();
  if (n_obs < p + 2)
    throw InsufficientData("impute: need at least " + std::to_string(p + 2) +
                           " observed rows, have " + std::to_string(n_obs));

  Matrix design(n_obs, p);
  std::vector<double> response(n_obs);
  for (std::size_t k = 0; k < n_obs; ++k) {
    const std::size_t i = observed[k];
    design(k, 0) = 1.0;
    design(k, 1) = static_cast<double>(data.z[i]);
    if (method.include_outcome) design(k, 2) = data.y[i];
    response[k] = data.x_obs[i];
  }

  ImputedDataset out;
  out.base = &data;
  out.x_imp = data.x_obs;  // observed rows stay bit-identical
  out.method = method;
  out.draw_index = draw_index;
  out.imputation_fit = fit_ols(design, response);
  const auto& fit = out.imputation_fit;

  auto predictor = [&](std::size_t i, std::span<const double> coef) {
    double v = coef[0] + coef[1] * static_cast<double>(data.z[i]);
    if (method.include_outcome) v += coef[2] * data.y[i];
    return v;
  };

  if (!method.stochastic()) {
    for (std::size_t i = 0; i < data.n; ++i)
      if (data.r_x[i]) out.x_imp[i] = predictor(i, fit.coefficients);
    return out;
  }

  // Posterior-predictive draw: variance, then coefficients, then one noise
  // term per missing row, in row order. The draw order is fixed so replays
  // reproduce bit-identically.
  const auto df = static_cast<std::int64_t>(n_obs - p);
  const double sigma2_dot = draw_scaled_inv_chisq(*rng, df, fit.sigma2_hat);
  Matrix coef_cov(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) coef_cov(i, j) = sigma2_dot * fit.xtx_inv(i, j);
  const std::vector<double> coef_dot = draw_mvn(*rng, fit.coefficients, coef_cov);
  const double sd_dot = std::sqrt(sigma2_dot);
  for (std::size_t i = 0; i < data.n; ++i)
    if (data.r_x[i]) out.x_imp[i] = predictor(i, coef_dot) + draw_normal(*rng, 0.0, sd_dot);
  return out;
}

}  // namespace

ImputedDataset impute(const Dataset& data, ImputationMethod method, RngStream* rng) {
  return impute_impl(data, method, rng, method.stochastic() ? 1 : 0);
}

std::vector<ImputedDataset> impute_multiple(const Dataset& data, ImputationMethod method,
                                            std::size_t m, RngStream& rng) {
  if (!method.stochastic())
    throw InvalidMethod("impute_multiple: deterministic repeats would be identical; "
                        "use a stochastic method");
  if (m < 2) throw InvalidParameter("impute_multiple: need m >= 2");
  std::vector<ImputedDataset> out;
  out.reserve(m);
  for (std::size_t k = 1; k <= m; ++k) {
    RngStream sub = rng.substream(k);
    out.push_back(impute_impl(data, method, &sub, k));
  }
  return out;
}

}  // namespace mdi
