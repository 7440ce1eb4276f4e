// Command-line front end: scenario generation, imputation/analysis pipelines
// on CSV files, the missingness grid experiment, sampling-distribution
// replications, and the closed-form theory report.
//
// Machine output (CSV or JSON) goes to --out ("-" = stdout, the default);
// human-readable summaries go to stderr. Exit codes: 0 ok, 2 config/parse
// error, 3 data error, 4 internal invariant violation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdi/config.hpp"
#include "mdi/csv.hpp"
#include "mdi/error.hpp"
#include "mdi/imputer.hpp"
#include "mdi/inference.hpp"
#include "mdi/parallel.hpp"
#include "mdi/rng.hpp"
#include "mdi/scenario.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

// Stream allocation: RngStream(seed, derive_stream_id(command, cell, replicate)).
//   generate  (1, 0, 0)
//   analyze   (2, 0, 0) imputation draws; (2, 1, 0) bootstrap
//   grid      (3, cell, 0) data; (3, cell, 1) stoc; (3, cell, 2) stoc-y
//   sampling  (4, 0, replicate)
enum : std::uint64_t {
  kCmdGenerate = 1,
  kCmdAnalyze = 2,
  kCmdGrid = 3,
  kCmdSampling = 4,
};

struct CommonOptions {
  std::uint64_t seed = 1;
  std::string config_path;
  unsigned threads = 1;

  mdi::ScenarioParams scenario() const {
    if (config_path.empty()) return {};
    return mdi::load_scenario_config(config_path);
  }
};

// "-" writes to stdout; anything else opens a file in binary mode so line
// endings stay LF everywhere.
class Output {
 public:
  explicit Output(const std::string& path) : to_stdout_(path == "-") {
    if (!to_stdout_) {
      file_.open(path, std::ios::binary);
      if (!file_) throw mdi::IoError("cannot open '" + path + "' for writing");
    }
  }

  std::ostream& stream() { return to_stdout_ ? std::cout : file_; }

  void finish() {
    stream().flush();
    if (!stream()) throw mdi::IoError("write failed");
  }

 private:
  bool to_stdout_;
  std::ofstream file_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

void write_json(const std::string& out_path, const json& report) {
  Output out(out_path);
  out.stream() << report.dump(2) << '\n';
  out.finish();
}

mdi::Dataset load_csv(const std::string& path, const std::string& na_token) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mdi::IoError("cannot open '" + path + "'");
  return mdi::csv::read_dataset(in, na_token);
}

int run_generate(const CommonOptions& common, std::size_t n, const std::string& out_path,
                 bool oracle) {
  const auto params = common.scenario();
  mdi::RngStream rng(common.seed, mdi::derive_stream_id(kCmdGenerate, 0, 0));
  const auto data = mdi::generate(params, n, rng);
  Output out(out_path);
  mdi::csv::write_dataset(out.stream(), data, oracle);
  out.finish();
  return 0;
}

int run_analyze(const CommonOptions& common, const std::string& input,
                const std::string& method_name, std::size_t m, std::size_t b_count,
                const std::string& na_token, const std::string& out_path) {
  const auto method = mdi::ImputationMethod::from_string(method_name);
  const auto data = load_csv(input, na_token);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "analyze";
  report["input"] = input;
  report["method"] = method.to_string();
  report["seed"] = common.seed;
  report["n"] = data.n;
  report["n_missing"] = data.n_missing();

  std::string human = "analyze " + input + "\n";
  human += "  method " + method.to_string() + ", n " + std::to_string(data.n) + ", missing " +
           std::to_string(data.n_missing()) + "\n";

  if (m >= 2) {
    if (!method.stochastic())
      throw mdi::InvalidMethod("--m needs a stochastic method (stoc or stoc-y)");
    mdi::RngStream rng(common.seed, mdi::derive_stream_id(kCmdAnalyze, 0, 0));
    const auto imputations = mdi::impute_multiple(data, method, m, rng);
    std::vector<mdi::OutcomeFit> fits;
    fits.reserve(m);
    for (const auto& imp : imputations) fits.push_back(mdi::fit_outcome(imp));
    const auto pooled = mdi::pool_rubin(fits);
    report["pooled"] = {{"m", pooled.m},
                        {"beta1", pooled.q_bar},
                        {"intercept", pooled.intercept},
                        {"se", pooled.se()},
                        {"within", pooled.w_bar},
                        {"between", pooled.b},
                        {"total", pooled.t},
                        {"df", finite_or_null(pooled.df)}};
    human += "  pooled (m " + std::to_string(pooled.m) + "): beta1 " + fmt(pooled.q_bar) +
             ", SE " + fmt(pooled.se()) + ", df " + fmt(pooled.df) + "\n";
  } else {
    mdi::RngStream rng(common.seed, mdi::derive_stream_id(kCmdAnalyze, 0, 0));
    const auto imp = mdi::impute(data, method, &rng);
    const auto fit = mdi::fit_outcome(imp);
    report["estimate"] = {{"beta1", fit.beta1_hat},
                          {"intercept", fit.beta0_hat},
                          {"se_model", fit.se_beta1_model},
                          {"n_used", fit.n_used}};
    human += "  beta1 " + fmt(fit.beta1_hat) + ", intercept " + fmt(fit.beta0_hat) +
             ", model SE " + fmt(fit.se_beta1_model) + "\n";
  }

  if (b_count > 0) {
    mdi::RngStream rng(common.seed, mdi::derive_stream_id(kCmdAnalyze, 1, 0));
    const auto boot = mdi::bootstrap_se(data, method, b_count, rng, common.threads);
    report["bootstrap"] = {{"b_requested", b_count},
                           {"b_used", boot.b_count},
                           {"skipped", boot.n_skipped},
                           {"se", boot.se}};
    human += "  bootstrap (B " + std::to_string(b_count) + ", skipped " +
             std::to_string(boot.n_skipped) + "): SE " + fmt(boot.se) + "\n";
  }

  std::cerr << human;
  write_json(out_path, report);
  return 0;
}

int run_grid(const CommonOptions& common, const std::vector<double>& p_grid, std::size_t n,
             const std::string& out_path) {
  const auto base_params = common.scenario();
  for (double p : p_grid)
    if (!(p > 0.0 && p < 1.0))
      throw mdi::InvalidConfig("grid: every p must lie strictly inside (0, 1)");
  if (p_grid.empty()) throw mdi::InvalidConfig("grid: empty p list");

  const mdi::ImputationMethod methods[] = {
      mdi::ImputationMethod::from_string("det"),
      mdi::ImputationMethod::from_string("det-y"),
      mdi::ImputationMethod::from_string("stoc"),
      mdi::ImputationMethod::from_string("stoc-y"),
  };

  struct Row {
    double var = 0.0, cov = 0.0, beta = 0.0;
    double theory_var = 0.0, theory_cov = 0.0, theory_beta = 0.0;
  };
  std::vector<std::array<Row, 4>> cells(p_grid.size());

  mdi::parallel_for(p_grid.size(), common.threads, [&](std::size_t c) {
    mdi::ScenarioParams params = base_params;
    params.p_miss_1 = p_grid[c];
    mdi::RngStream gen_rng(common.seed, mdi::derive_stream_id(kCmdGrid, c, 0));
    const auto data = mdi::generate(params, n, gen_rng);
    const auto theory = mdi::theory_quantities(params);
    for (std::size_t mi = 0; mi < 4; ++mi) {
      const auto method = methods[mi];
      mdi::RngStream draw_rng(common.seed,
                              mdi::derive_stream_id(kCmdGrid, c, method.include_outcome ? 2 : 1));
      mdi::RngStream* rng = method.stochastic() ? &draw_rng : nullptr;
      const auto imp = mdi::impute(data, method, rng);
      Row& row = cells[c][mi];
      row.var = mdi::sample_variance(imp.x_imp);
      row.cov = mdi::sample_covariance(imp.x_imp, data.y);
      row.beta = row.cov / row.var;
      if (!method.stochastic()) {
        row.theory_var = method.include_outcome ? theory.var_x_imp_det_y : theory.var_x_imp_det;
        row.theory_cov =
            method.include_outcome ? theory.cov_x_imp_det_y_y : theory.cov_x_imp_det_y;
      } else {
        // stochastic draws restore the marginal variance; the covariance
        // matches the deterministic model with the same predictors
        row.theory_var = theory.var_x;
        row.theory_cov = method.include_outcome ? theory.cov_xy : theory.cov_x_imp_det_y;
      }
      row.theory_beta = row.theory_cov / row.theory_var;
    }
  });

  Output out(out_path);
  out.stream() << "p_miss_1,method,n,seed,var_ximp,cov_ximp_y,beta1,"
                  "theory_var,theory_cov,theory_beta1\n";
  for (std::size_t c = 0; c < p_grid.size(); ++c) {
    for (std::size_t mi = 0; mi < 4; ++mi) {
      const Row& row = cells[c][mi];
      out.stream() << mdi::csv::format_real(p_grid[c]) << ',' << methods[mi].to_string() << ','
                   << n << ',' << common.seed << ',' << mdi::csv::format_real(row.var) << ','
                   << mdi::csv::format_real(row.cov) << ',' << mdi::csv::format_real(row.beta)
                   << ',' << mdi::csv::format_real(row.theory_var) << ','
                   << mdi::csv::format_real(row.theory_cov) << ','
                   << mdi::csv::format_real(row.theory_beta) << '\n';
    }
  }
  out.finish();
  return 0;
}

int run_sampling(const CommonOptions& common, std::size_t n, std::size_t reps,
                 const std::string& method_name, const std::string& out_path) {
  if (reps < 100) throw mdi::InvalidConfig("sampling: need at least 100 replications");
  const auto method = mdi::ImputationMethod::from_string(method_name);
  const auto params = common.scenario();

  std::vector<double> beta_full(reps), beta_cc(reps), beta_imp(reps), model_var(reps);
  mdi::parallel_for(reps, common.threads, [&](std::size_t r) {
    mdi::RngStream rng(common.seed, mdi::derive_stream_id(kCmdSampling, 0, r));
    const auto data = mdi::generate(params, n, rng);
    beta_full[r] = mdi::fit_full_cohort(data).beta1_hat;
    beta_cc[r] = mdi::fit_complete_case(data).beta1_hat;
    const auto imp = mdi::impute(data, method, &rng);
    const auto fit = mdi::fit_outcome(imp);
    beta_imp[r] = fit.beta1_hat;
    model_var[r] = fit.se_beta1_model * fit.se_beta1_model;
  });

  const auto expected = mdi::expected_coefficient_variances(params, n);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "sampling";
  report["method"] = method.to_string();
  report["n"] = n;
  report["reps"] = reps;
  report["seed"] = common.seed;
  report["empirical_var_beta1"] = {{"full_cohort", mdi::sample_variance(beta_full)},
                                   {"complete_case", mdi::sample_variance(beta_cc)},
                                   {"imputed", mdi::sample_variance(beta_imp)}};
  report["mean_beta1"] = {{"full_cohort", mdi::sample_mean(beta_full)},
                          {"complete_case", mdi::sample_mean(beta_cc)},
                          {"imputed", mdi::sample_mean(beta_imp)}};
  report["mean_model_var_imputed"] = mdi::sample_mean(model_var);
  report["theory"] = {{"full_cohort", expected.full_cohort},
                      {"model_based_det", expected.model_based_det},
                      {"complete_case", expected.complete_case}};

  std::cerr << "sampling " << method.to_string() << ", n " << n << ", reps " << reps << "\n"
            << "  var(beta1): full " << fmt(mdi::sample_variance(beta_full)) << ", cc "
            << fmt(mdi::sample_variance(beta_cc)) << ", imputed "
            << fmt(mdi::sample_variance(beta_imp)) << "\n"
            << "  mean model-based var (imputed): " << fmt(mdi::sample_mean(model_var)) << "\n";
  write_json(out_path, report);
  return 0;
}

int run_theory(const CommonOptions& common, std::size_t n, const std::string& out_path) {
  const auto params = common.scenario();
  const auto t = mdi::theory_quantities(params);
  const auto ev = mdi::expected_coefficient_variances(params, n);

  // Internal consistency: both attenuation routes must agree and the
  // conditional probabilities must close under total expectation.
  const double tol = 1e-12 * std::max({1.0, std::abs(t.var_x), std::abs(t.cov_xy)});
  const double closure =
      t.pr_z1_given_r0 * (1.0 - t.pr_r1) + t.pr_z1_given_r1 * t.pr_r1 - params.p_z;
  const bool ok = std::abs(t.var_x_imp_det - t.omega * t.var_x) <= tol &&
                  std::abs(t.cov_x_imp_det_y - t.omega * t.cov_xy) <= tol &&
                  std::abs(closure) <= 1e-12 && t.expected_beta.det == params.beta1 &&
                  t.expected_beta.stoc_y == params.beta1;

  auto line = [](const char* name, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-24s %.10g\n", name, v);
    return std::string(buf);
  };
  std::string text = "theory\n";
  text += line("Pr(R_X=1)", t.pr_r1);
  text += line("Pr(Z=1|R_X=0)", t.pr_z1_given_r0);
  text += line("Pr(Z=1|R_X=1)", t.pr_z1_given_r1);
  text += line("E(X|R_X=0)", t.e_x_given_r0);
  text += line("E(X|R_X=1)", t.e_x_given_r1);
  text += line("Var(X)", t.var_x);
  text += line("Var(X|R_X=0)", t.var_x_given_r0);
  text += line("Var(X|R_X=1)", t.var_x_given_r1);
  text += line("Var(Xhat|R_X=1)", t.var_xhat_given_r1);
  text += line("Cov(X,Y)", t.cov_xy);
  text += line("Cov(X,Y|R_X=0)", t.cov_xy_given_r0);
  text += line("E(Y|R_X=0)", t.e_y_given_r0);
  text += line("E(Y|R_X=1)", t.e_y_given_r1);
  text += line("R2 imputation", t.r2_imp);
  text += line("omega", t.omega);
  text += line("Var(X_imp det)", t.var_x_imp_det);
  text += line("Cov(X_imp det, Y)", t.cov_x_imp_det_y);
  text += line("Var(X_imp det-y)", t.var_x_imp_det_y);
  text += line("Cov(X_imp det-y, Y)", t.cov_x_imp_det_y_y);
  text += line("beta1 det", t.expected_beta.det);
  text += line("beta1 det-y", t.expected_beta.det_y);
  text += line("beta1 stoc", t.expected_beta.stoc);
  text += line("beta1 stoc-y", t.expected_beta.stoc_y);
  text += line(("var(beta1) full, n=" + std::to_string(n)).c_str(), ev.full_cohort);
  text += line("var(beta1) model det", ev.model_based_det);
  text += line("var(beta1) complete case", ev.complete_case);
  if (!ok) text += "  CONSISTENCY CHECK FAILED\n";
  std::cerr << text;

  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "theory";
  report["scenario"] = json::parse(mdi::scenario_to_json_text(params));
  report["quantities"] = {{"pr_r1", t.pr_r1},
                          {"pr_z1_given_r0", t.pr_z1_given_r0},
                          {"pr_z1_given_r1", t.pr_z1_given_r1},
                          {"e_x_given_r0", t.e_x_given_r0},
                          {"e_x_given_r1", t.e_x_given_r1},
                          {"var_x", t.var_x},
                          {"var_x_given_r0", t.var_x_given_r0},
                          {"var_x_given_r1", t.var_x_given_r1},
                          {"var_xhat_given_r1", t.var_xhat_given_r1},
                          {"cov_xy", t.cov_xy},
                          {"cov_xy_given_r0", t.cov_xy_given_r0},
                          {"e_y_given_r0", t.e_y_given_r0},
                          {"e_y_given_r1", t.e_y_given_r1},
                          {"r2_imp", t.r2_imp},
                          {"omega", t.omega},
                          {"var_x_imp_det", t.var_x_imp_det},
                          {"cov_x_imp_det_y", t.cov_x_imp_det_y},
                          {"var_x_imp_det_y", t.var_x_imp_det_y},
                          {"cov_x_imp_det_y_y", t.cov_x_imp_det_y_y},
                          {"gamma", {t.gamma0, t.gamma1, t.gamma2}},
                          {"expected_beta1",
                           {{"det", t.expected_beta.det},
                            {"det_y", t.expected_beta.det_y},
                            {"stoc", t.expected_beta.stoc},
                            {"stoc_y", t.expected_beta.stoc_y}}}};
  report["expected_coef_var"] = {{"n", n},
                                 {"full_cohort", ev.full_cohort},
                                 {"model_based_det", ev.model_based_det},
                                 {"complete_case", ev.complete_case}};
  report["consistency_ok"] = ok;
  write_json(out_path, report);
  return ok ? 0 : 4;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"missing-data imputation workbench"};
  app.require_subcommand(1);

  CommonOptions common;
  app.add_option("--seed", common.seed, "rng seed")->capture_default_str();
  app.add_option("--config", common.config_path, "scenario parameter JSON file");
  app.add_option("--threads", common.threads, "worker threads (outputs do not depend on it)")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();

  auto* gen = app.add_subcommand("generate", "write a synthetic dataset as CSV");
  std::size_t gen_n = 1000;
  std::string gen_out = "-";
  bool gen_oracle = false;
  gen->add_option("--n", gen_n, "rows")->capture_default_str();
  gen->add_option("--out", gen_out, "output path, - for stdout")->capture_default_str();
  gen->add_flag("--oracle", gen_oracle, "include the x_full and r_x columns");
  gen->fallthrough();

  auto* ana = app.add_subcommand("analyze", "impute a CSV and fit the outcome model");
  std::string ana_input, ana_method = "det", ana_na, ana_out = "-";
  std::size_t ana_m = 0, ana_boot = 0;
  ana->add_option("input", ana_input, "input CSV with columns z,x_obs,y")->required();
  ana->add_option("--method", ana_method, "det, det-y, stoc or stoc-y")->capture_default_str();
  ana->add_option("--m", ana_m, "pooled imputations (stochastic methods, m >= 2)");
  ana->add_option("--bootstrap", ana_boot, "bootstrap replicates for the SE");
  ana->add_option("--na-token", ana_na, "extra token marking a missing x_obs cell");
  ana->add_option("--out", ana_out, "JSON report path, - for stdout")->capture_default_str();
  ana->fallthrough();

  auto* grid = app.add_subcommand("grid", "vary p_miss_1 and compare with theory");
  std::vector<double> grid_p = {0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85};
  std::size_t grid_n = 1000000;
  std::string grid_out = "-";
  grid->add_option("--p-grid", grid_p, "comma-separated Pr(R_X=1|Z=1) values")
      ->delimiter(',');
  grid->add_option("--n", grid_n, "rows per cell")->capture_default_str();
  grid->add_option("--out", grid_out, "output CSV path, - for stdout")->capture_default_str();
  grid->fallthrough();

  auto* smp = app.add_subcommand("sampling", "replicate generate-impute-fit pipelines");
  std::size_t smp_n = 102, smp_reps = 1000;
  std::string smp_method = "det", smp_out = "-";
  smp->add_option("--n", smp_n, "rows per replication")->capture_default_str();
  smp->add_option("--reps", smp_reps, "replications (>= 100)")->capture_default_str();
  smp->add_option("--method", smp_method, "imputation method")->capture_default_str();
  smp->add_option("--out", smp_out, "JSON summary path, - for stdout")->capture_default_str();
  smp->fallthrough();

  auto* thr = app.add_subcommand("theory", "print the closed-form quantities");
  std::size_t thr_n = 102;
  std::string thr_out = "-";
  thr->add_option("--n", thr_n, "n used for the coefficient-variance table")
      ->capture_default_str();
  thr->add_option("--out", thr_out, "JSON report path, - for stdout")->capture_default_str();
  thr->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*gen) return run_generate(common, gen_n, gen_out, gen_oracle);
  if (*ana)
    return run_analyze(common, ana_input, ana_method, ana_m, ana_boot, ana_na, ana_out);
  if (*grid) return run_grid(common, grid_p, grid_n, grid_out);
  if (*smp) return run_sampling(common, smp_n, smp_reps, smp_method, smp_out);
  if (*thr) return run_theory(common, thr_n, thr_out);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const mdi::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mdi::InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mdi::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mdi::InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mdi::Error& e) {
    // data-level failures: insufficient rows, rank deficiency, degenerate
    // scenarios, missing rng, bad method/imputation counts
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
