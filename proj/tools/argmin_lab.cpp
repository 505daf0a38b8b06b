// argmin-lab: config-driven front end for the estimation library.
//
//   argmin-lab <fit|simulate|check> <config.json> [--output PATH] [--seed N]
//
// Exit codes: 0 success, 2 input error, 3 estimation error, 4 too many
// Monte Carlo failures, 5 property violation in a check sweep.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "argmin/conditions.hpp"
#include "argmin/convex.hpp"
#include "argmin/csv.hpp"
#include "argmin/errors.hpp"
#include "argmin/estimators.hpp"
#include "argmin/expansion.hpp"
#include "argmin/json_writer.hpp"
#include "argmin/math.hpp"
#include "argmin/rng.hpp"
#include "argmin/sandwich.hpp"
#include "argmin/scenario.hpp"
#include "argmin/simulate.hpp"

namespace {

using argmin::DataError;
using argmin::JsonValue;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw DataError("config root must be a JSON object");
  return j;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw DataError("unknown key '" + it.key() + "' in " + where);
}

const json& require_field(const json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("missing required key '") + key + "'");
  return j.at(key);
}

double num_field(const json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number()) throw DataError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

long long int_field(const json& j, const char* key, long long dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw DataError(std::string("'") + key + "' must be an integer");
  return v.get<long long>();
}

bool bool_field(const json& j, const char* key, bool dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_boolean()) throw DataError(std::string("'") + key + "' must be a boolean");
  return v.get<bool>();
}

std::string str_field(const json& j, const char* key, const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_string()) throw DataError(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> num_array(const json& v, const char* key) {
  if (!v.is_array()) throw DataError(std::string("'") + key + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) throw DataError(std::string("'") + key + "' must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

argmin::ScenarioConfig scenario_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"command", "kind", "output", "model", "n", "R", "beta0", "quantile_p",
                       "alpha", "mean_fn", "sigma_fn", "sigma_scale", "binary_q", "error_dist",
                       "t_df", "design", "base_seed", "censor_target", "markov_k", "threads",
                       "normalization"},
                      "simulate config");
  argmin::ScenarioConfig c;
  c.model = argmin::model_from_name(require_field(j, "model").get<std::string>());
  c.n = int_field(j, "n", c.n);
  c.R = static_cast<int>(int_field(j, "R", c.R));
  if (j.contains("beta0")) {
    auto b = num_array(j.at("beta0"), "beta0");
    c.beta0 = Eigen::Map<const VectorXd>(b.data(), static_cast<long>(b.size()));
  }
  c.quantile_p = num_field(j, "quantile_p", c.quantile_p);
  c.alpha = num_field(j, "alpha", c.alpha);
  c.mean_fn = str_field(j, "mean_fn", c.mean_fn);
  c.sigma_fn = str_field(j, "sigma_fn", c.sigma_fn);
  c.sigma_scale = num_field(j, "sigma_scale", c.sigma_scale);
  c.binary_q = str_field(j, "binary_q", c.binary_q);
  c.error_dist = str_field(j, "error_dist", c.error_dist);
  c.t_df = static_cast<int>(int_field(j, "t_df", c.t_df));
  c.base_seed = static_cast<std::uint64_t>(int_field(j, "base_seed", 1));
  c.censor_target = num_field(j, "censor_target", c.censor_target);
  c.markov_k = static_cast<int>(int_field(j, "markov_k", c.markov_k));
  c.threads = static_cast<int>(int_field(j, "threads", c.threads));
  std::string norm = str_field(j, "normalization", "sqrt_n");
  if (norm == "sqrt_n")
    c.normalization = argmin::Normalization::SqrtN;
  else if (norm == "per_rep_information")
    c.normalization = argmin::Normalization::PerRepInformation;
  else
    throw DataError("unknown normalization '" + norm + "'");
  if (j.contains("design")) {
    const json& d = j.at("design");
    if (!d.is_object()) throw DataError("'design' must be an object");
    reject_unknown_keys(d, {"menu", "covariates", "intercept", "fixed_across_reps", "rows"},
                        "design");
    c.design.menu = str_field(d, "menu", c.design.menu);
    c.design.covariates = static_cast<int>(int_field(d, "covariates", c.design.covariates));
    c.design.intercept = bool_field(d, "intercept", c.design.intercept);
    c.design.fixed_across_reps = bool_field(d, "fixed_across_reps", c.design.fixed_across_reps);
    if (d.contains("rows")) {
      const json& rows = d.at("rows");
      if (!rows.is_array() || rows.empty())
        throw DataError("'rows' must be a non-empty array of rows");
      std::vector<std::vector<double>> vals;
      for (const auto& r : rows) vals.push_back(num_array(r, "rows"));
      for (const auto& r : vals)
        if (r.size() != vals.front().size()) throw DataError("'rows' entries have uneven length");
      c.design.fixed.resize(static_cast<long>(vals.size()), static_cast<long>(vals.front().size()));
      for (long i = 0; i < c.design.fixed.rows(); ++i)
        for (long m = 0; m < c.design.fixed.cols(); ++m)
          c.design.fixed(i, m) = vals[static_cast<size_t>(i)][static_cast<size_t>(m)];
    }
  }
  c.validate();
  return c;
}

JsonValue sandwich_json(const argmin::SandwichCovariance& s) {
  auto o = JsonValue::object();
  o.add("n", JsonValue::integer(s.n));
  o.add("J", JsonValue::matrix(s.J));
  o.add("K", JsonValue::matrix(s.K));
  if (s.L.size() > 0) o.add("L", JsonValue::matrix(s.L));
  o.add("covariance", JsonValue::matrix(s.assemble()));
  if (!s.meta.empty()) {
    auto m = JsonValue::object();
    for (const auto& kv : s.meta) m.add(kv.first, JsonValue::number(kv.second));
    o.add("meta", std::move(m));
  }
  return o;
}

JsonValue lindeberg_json(const argmin::LindebergReport& r) {
  auto o = JsonValue::object();
  o.add("delta_grid", JsonValue::vector(r.delta_grid));
  o.add("truncated_sums", JsonValue::vector(r.N));
  if (r.L.size() > 0) {
    o.add("lindeberg_sums", JsonValue::vector(r.L));
    o.add("sandwich_ok", JsonValue::boolean(r.sandwich_ok));
  }
  o.add("largest_summand", JsonValue::number(r.lambda));
  if (r.mu > 0.0) o.add("max_row_over_sqrt_n", JsonValue::number(r.mu));
  if (r.rho_sum > 0.0) o.add("cubic_remainder_total", JsonValue::number(r.rho_sum));
  o.add("pass_delta", JsonValue::number(r.pass_delta));
  o.add("pass_threshold", JsonValue::number(r.pass_threshold));
  o.add("passes", JsonValue::boolean(r.passes));
  return o;
}

JsonValue cox_conditions_json(const argmin::CoxConditionReport& r) {
  auto o = JsonValue::object();
  o.add("s_grid", JsonValue::vector(r.s_grid));
  auto js = JsonValue::array();
  for (const auto& m : r.J_s) js.push(JsonValue::matrix(m));
  o.add("information_trajectory", std::move(js));
  o.add("widest_centred_covariate", JsonValue::vector(r.mu_s));
  o.add("mu_max", JsonValue::number(r.mu_max));
  return o;
}

void emit(const JsonValue& root, const std::string& output_path) {
  std::string text = root.dump();
  if (output_path.empty())
    std::cout << text;
  else
    argmin::write_atomic(output_path, text);
}

int cmd_fit(const json& cfg, const std::string& output_path) {
  reject_unknown_keys(cfg,
                      {"command", "output", "model", "input", "quantile_p", "alpha", "markov_k",
                       "horizon"},
                      "fit config");
  argmin::ModelTag tag = argmin::model_from_name(require_field(cfg, "model").get<std::string>());
  std::string input = require_field(cfg, "input").get<std::string>();

  argmin::FitParams params;
  params.quantile_p = num_field(cfg, "quantile_p", params.quantile_p);
  params.alpha = num_field(cfg, "alpha", params.alpha);
  params.horizon = num_field(cfg, "horizon", params.horizon);
  int markov_k = static_cast<int>(int_field(cfg, "markov_k", 0));

  argmin::CsvTable table = argmin::read_csv(input);
  argmin::Dataset data = argmin::dataset_from_csv(table, tag, markov_k);
  argmin::FitResult fit = argmin::fit_model(tag, data, params);
  argmin::SandwichCovariance sw = argmin::sandwich_for(tag, data, fit.beta, params);

  auto root = JsonValue::object();
  root.add("schema_version", JsonValue::integer(1));
  root.add("command", JsonValue::string("fit"));
  root.add("model", JsonValue::string(argmin::model_name(tag)));
  root.add("input", JsonValue::string(input));
  root.add("n", JsonValue::integer(data.n()));
  root.add("p", JsonValue::integer(fit.beta.size()));
  root.add("beta_hat", JsonValue::vector(fit.beta));
  root.add("objective_value", JsonValue::number(fit.report.value));
  root.add("iterations", JsonValue::integer(fit.report.iterations));
  root.add("certificate_norm", JsonValue::number(fit.report.certificate_norm));
  root.add("converged", JsonValue::boolean(fit.report.converged));
  root.add("sandwich", sandwich_json(sw));

  switch (tag) {
    case argmin::ModelTag::Logistic:
    case argmin::ModelTag::LogisticAgnostic:
      root.add("normality_diagnostic", lindeberg_json(argmin::logistic_condition(data.X, fit.beta)));
      break;
    case argmin::ModelTag::Poisson:
    case argmin::ModelTag::PoissonAgnostic:
      root.add("normality_diagnostic", lindeberg_json(argmin::poisson_condition(data.X, fit.beta)));
      break;
    case argmin::ModelTag::Cox: {
      // Interior deciles of the observed event times.
      std::vector<double> ev;
      for (long i = 0; i < data.n(); ++i)
        if (data.event[i] == 1) ev.push_back(data.time[i]);
      std::sort(ev.begin(), ev.end());
      if (!ev.empty()) {
        VectorXd grid(9);
        for (int g = 1; g <= 9; ++g) {
          size_t at = std::min(ev.size() - 1,
                               static_cast<size_t>(g * 0.1 * static_cast<double>(ev.size())));
          grid[g - 1] = ev[at];
        }
        root.add("information_trajectory",
                 cox_conditions_json(argmin::cox_conditions(data, fit.beta, grid)));
      }
      break;
    }
    default:
      break;
  }

  emit(root, output_path);
  return 0;
}

JsonValue scenario_report_json(const argmin::ScenarioConfig& c,
                               const argmin::SimulationReport& rep) {
  auto root = JsonValue::object();
  root.add("schema_version", JsonValue::integer(1));
  root.add("command", JsonValue::string("simulate"));
  root.add("kind", JsonValue::string("scenario"));
  root.add("model", JsonValue::string(argmin::model_name(c.model)));
  root.add("base_seed", JsonValue::integer(static_cast<long long>(c.base_seed)));
  root.add("n", JsonValue::integer(rep.n));
  root.add("R", JsonValue::integer(rep.R));
  root.add("succeeded", JsonValue::integer(rep.succeeded));
  auto fails = JsonValue::object();
  for (const auto& kv : rep.failures) fails.add(kv.first, JsonValue::integer(kv.second));
  root.add("failures", std::move(fails));
  root.add("theta0", JsonValue::vector(rep.theta0));
  root.add("mean_stat", JsonValue::vector(rep.mean_stat));
  root.add("empirical_covariance", JsonValue::matrix(rep.emp_cov));
  root.add("theory_covariance", JsonValue::matrix(rep.theory_cov));
  root.add("theory_provenance", JsonValue::string(rep.theory_provenance));
  root.add("max_rel_eig_gap", JsonValue::number(rep.max_rel_eig_gap));
  root.add("ks", JsonValue::vector(rep.ks));
  root.add("coverage", JsonValue::vector(rep.coverage));
  if (rep.middle_hat.size() > 0) {
    root.add("middle_hat", JsonValue::matrix(rep.middle_hat));
    root.add("middle_theory", JsonValue::matrix(rep.middle_theory));
  }
  return root;
}

int cmd_simulate(const json& cfg, const std::string& output_path, bool seed_set,
                 std::uint64_t seed) {
  std::string kind = str_field(cfg, "kind", "scenario");
  if (kind == "scenario") {
    argmin::ScenarioConfig c = scenario_from_json(cfg);
    if (seed_set) c.base_seed = seed;
    argmin::SimulationReport rep = argmin::run_scenario(c);
    emit(scenario_report_json(c, rep), output_path);
    return 0;
  }
  if (kind == "quantile_process") {
    reject_unknown_keys(cfg,
                        {"command", "kind", "output", "n", "R", "p_grid", "error_dist", "t_df",
                         "base_seed"},
                        "quantile_process config");
    long n = int_field(cfg, "n", 1000);
    int R = static_cast<int>(int_field(cfg, "R", 1000));
    if (n < 2) throw DataError("n must be at least 2");
    if (R < 2) throw DataError("replication count must be at least 2");
    std::vector<double> p_grid{0.25, 0.5, 0.75};
    if (cfg.contains("p_grid")) p_grid = num_array(cfg.at("p_grid"), "p_grid");
    if (p_grid.empty()) throw DataError("'p_grid' must be non-empty");
    for (double p : p_grid)
      if (!(p > 0.0 && p < 1.0)) throw DataError("quantile levels must lie in (0,1)");
    std::string err = str_field(cfg, "error_dist", "normal");
    int t_df = static_cast<int>(int_field(cfg, "t_df", 5));
    std::uint64_t base = static_cast<std::uint64_t>(int_field(cfg, "base_seed", 1));
    if (seed_set) base = seed;
    argmin::QuantileProcessReport rep = argmin::quantile_process_check(n, R, p_grid, err, base, t_df);
    auto root = JsonValue::object();
    root.add("schema_version", JsonValue::integer(1));
    root.add("command", JsonValue::string("simulate"));
    root.add("kind", JsonValue::string("quantile_process"));
    root.add("base_seed", JsonValue::integer(static_cast<long long>(base)));
    root.add("n", JsonValue::integer(n));
    root.add("R", JsonValue::integer(R));
    auto pg = JsonValue::array();
    for (double p : rep.p_grid) pg.push(JsonValue::number(p));
    root.add("p_grid", std::move(pg));
    root.add("empirical_covariance", JsonValue::matrix(rep.emp_cov));
    root.add("theory_covariance", JsonValue::matrix(rep.theory_cov));
    root.add("max_rel_gap", JsonValue::number(rep.max_rel_gap));
    emit(root, output_path);
    return 0;
  }
  if (kind == "bayes") {
    reject_unknown_keys(cfg, {"command", "kind", "output", "n_grid", "R", "base_seed"},
                        "bayes config");
    std::vector<long> n_grid{100, 400, 1600};
    if (cfg.contains("n_grid")) {
      n_grid.clear();
      const json& g = cfg.at("n_grid");
      if (!g.is_array() || g.empty()) throw DataError("'n_grid' must be a non-empty array");
      for (const auto& e : g) {
        if (!e.is_number_integer()) throw DataError("'n_grid' must contain integers");
        n_grid.push_back(e.get<long>());
      }
    }
    for (long n : n_grid)
      if (n < 1) throw DataError("'n_grid' entries must be positive");
    int R = static_cast<int>(int_field(cfg, "R", 200));
    if (R < 2) throw DataError("replication count must be at least 2");
    std::uint64_t base = static_cast<std::uint64_t>(int_field(cfg, "base_seed", 1));
    if (seed_set) base = seed;
    argmin::BayesEquivalenceReport rep = argmin::bayes_equivalence_check(n_grid, R, base);
    auto root = JsonValue::object();
    root.add("schema_version", JsonValue::integer(1));
    root.add("command", JsonValue::string("simulate"));
    root.add("kind", JsonValue::string("bayes"));
    root.add("base_seed", JsonValue::integer(static_cast<long long>(base)));
    root.add("R", JsonValue::integer(R));
    auto ng = JsonValue::array();
    for (long n : rep.n_grid) ng.push(JsonValue::integer(n));
    root.add("n_grid", std::move(ng));
    auto mg = JsonValue::array();
    for (double g : rep.median_gap) mg.push(JsonValue::number(g));
    root.add("median_gap", std::move(mg));
    auto rt = JsonValue::array();
    for (double g : rep.ratio) rt.push(JsonValue::number(g));
    root.add("ratio", std::move(rt));
    root.add("decreasing", JsonValue::boolean(rep.decreasing));
    emit(root, output_path);
    return 0;
  }
  throw DataError("unknown simulate kind '" + kind + "'");
}

struct SweepTally {
  long long draws = 0;
  long long violations = 0;
  JsonValue examples = JsonValue::array();
  int recorded = 0;

  void record(JsonValue ex) {
    ++violations;
    if (recorded < 5) {
      examples.push(std::move(ex));
      ++recorded;
    }
  }

  JsonValue to_json() const {
    auto o = JsonValue::object();
    o.add("draws", JsonValue::integer(draws));
    o.add("violations", JsonValue::integer(violations));
    o.add("counterexamples", examples);
    return o;
  }
};

// Random log-sum-exp instances; the two analytic remainder envelopes are
// multiplied by `scale` before comparison so deliberate faults surface.
SweepTally sweep_expansion(long long draws, std::uint64_t seed, double scale) {
  SweepTally tally;
  tally.draws = draws;
  for (long long i = 0; i < draws; ++i) {
    argmin::Rng rng(argmin::mix_seed(seed, 0x1000000ULL + static_cast<std::uint64_t>(i)));
    int m = 2 + static_cast<int>(rng.below(7));
    VectorXd w(m), a(m);
    for (int d = 0; d < m; ++d) {
      w[d] = rng.uniform(0.05, 1.0);
      a[d] = rng.uniform(-1.5, 1.5);
    }
    double t = rng.uniform(-0.5, 0.5);
    argmin::ExpansionReport rep = argmin::logsumexp_expand(w, a, t);
    double slack = 1e-12 * (1.0 + std::abs(rep.Kt) + std::abs(rep.K0));
    bool ok = std::abs(rep.remainder) <= scale * rep.bound_cubic + slack &&
              std::abs(rep.remainder) <= scale * rep.bound_tight + slack;
    if (!ok) {
      auto ex = JsonValue::object();
      ex.add("draw", JsonValue::integer(i));
      ex.add("t", JsonValue::number(t));
      ex.add("remainder", JsonValue::number(rep.remainder));
      ex.add("bound_cubic", JsonValue::number(rep.bound_cubic));
      ex.add("bound_tight", JsonValue::number(rep.bound_tight));
      tally.record(std::move(ex));
    }
  }
  return tally;
}

// Weighted Bernoulli sums: the truncated second-moment sums must sandwich
// the exact Lindeberg sums.  `scale` multiplies the upper envelope.
SweepTally sweep_lindeberg(long long draws, std::uint64_t seed, double scale) {
  SweepTally tally;
  tally.draws = draws;
  VectorXd grid = argmin::default_delta_grid();
  VectorXd grid2 = 2.0 * grid;
  for (long long i = 0; i < draws; ++i) {
    argmin::Rng rng(argmin::mix_seed(seed, 0x2000000ULL + static_cast<std::uint64_t>(i)));
    long n = 20 + static_cast<long>(rng.below(181));
    VectorXd z(n), q(n);
    for (long d = 0; d < n; ++d) {
      z[d] = rng.normal();
      q[d] = rng.uniform(0.02, 0.98);
    }
    argmin::LindebergReport r1 = argmin::bernoulli_lindeberg(z, q, grid);
    argmin::LindebergReport r2 = argmin::bernoulli_lindeberg(z, q, grid2);
    for (long g = 0; g < grid.size(); ++g) {
      double slack = 1e-12 * (1.0 + r1.N[g]);
      bool ok = 0.5 * r2.N[g] <= r1.L[g] + slack && r1.L[g] <= scale * r1.N[g] + slack;
      if (!ok) {
        auto ex = JsonValue::object();
        ex.add("draw", JsonValue::integer(i));
        ex.add("delta", JsonValue::number(grid[g]));
        ex.add("half_N_2delta", JsonValue::number(0.5 * r2.N[g]));
        ex.add("lindeberg_sum", JsonValue::number(r1.L[g]));
        ex.add("truncated_sum", JsonValue::number(r1.N[g]));
        tally.record(std::move(ex));
        break;
      }
    }
  }
  return tally;
}

// Quadratic-versus-perturbed pairs: a uniformly close pair cannot have far
// apart minimisers.  `scale` multiplies the closeness threshold.
SweepTally sweep_nearness(long long draws, std::uint64_t seed, double scale) {
  SweepTally tally;
  tally.draws = draws;
  for (long long i = 0; i < draws; ++i) {
    argmin::Rng rng(argmin::mix_seed(seed, 0x3000000ULL + static_cast<std::uint64_t>(i)));
    int p = 1 + static_cast<int>(rng.below(2));
    MatrixXd root(p, p);
    for (int r = 0; r < p; ++r)
      for (int cidx = 0; cidx < p; ++cidx) root(r, cidx) = rng.normal();
    MatrixXd V = root.transpose() * root + 0.3 * MatrixXd::Identity(p, p);
    VectorXd center(p), w(p), v(p);
    for (int d = 0; d < p; ++d) {
      center[d] = rng.uniform(-1.0, 1.0);
      w[d] = rng.normal();
      v[d] = rng.normal();
    }
    argmin::QuadraticModel B(V, VectorXd(-V * center), 0.0);
    double c1 = rng.uniform(0.0, 0.3), c2 = rng.uniform(0.0, 0.3);
    double b0 = rng.uniform(-0.5, 0.5);
    std::function<double(const VectorXd&)> A = [&](const VectorXd& s) {
      return B.value(s) + c1 * std::abs(w.dot(s) + b0) + c2 * argmin::log1pexp(v.dot(s));
    };
    double delta = rng.uniform(0.1, 1.0);
    int grid = p == 1 ? 101 : 21;
    argmin::NearnessReport rep = argmin::argmin_nearness_bound(A, B, delta, grid, 3.0);
    bool hypothesis = rep.Delta < scale * 0.5 * rep.h - 1e-12 * (1.0 + rep.h);
    bool far = rep.argmin_distance > delta * (1.0 + 1e-9) + rep.grid_step;
    if (hypothesis && far) {
      auto ex = JsonValue::object();
      ex.add("draw", JsonValue::integer(i));
      ex.add("delta", JsonValue::number(delta));
      ex.add("sup_gap", JsonValue::number(rep.Delta));
      ex.add("half_h", JsonValue::number(0.5 * rep.h));
      ex.add("argmin_distance", JsonValue::number(rep.argmin_distance));
      tally.record(std::move(ex));
    }
  }
  return tally;
}

int cmd_check(const json& cfg, const std::string& output_path, bool seed_set, std::uint64_t seed) {
  reject_unknown_keys(cfg,
                      {"command", "output", "checks", "draws", "seed", "bound_scale",
                       "corollary_instances", "corollary_magnitude"},
                      "check config");
  long long draws = int_field(cfg, "draws", 10000);
  if (draws < 1) throw DataError("'draws' must be positive");
  double scale = num_field(cfg, "bound_scale", 1.0);
  if (!(scale > 0.0)) throw DataError("'bound_scale' must be positive");
  std::uint64_t base = static_cast<std::uint64_t>(int_field(cfg, "seed", 1));
  if (seed_set) base = seed;

  std::set<std::string> which{"expansion", "lindeberg", "nearness", "corollary"};
  if (cfg.contains("checks")) {
    const json& arr = cfg.at("checks");
    if (!arr.is_array() || arr.empty()) throw DataError("'checks' must be a non-empty array");
    std::set<std::string> chosen;
    for (const auto& e : arr) {
      if (!e.is_string()) throw DataError("'checks' must contain strings");
      std::string name = e.get<std::string>();
      if (!which.count(name)) throw DataError("unknown check '" + name + "'");
      chosen.insert(name);
    }
    which = std::move(chosen);
  }

  auto root = JsonValue::object();
  root.add("schema_version", JsonValue::integer(1));
  root.add("command", JsonValue::string("check"));
  root.add("seed", JsonValue::integer(static_cast<long long>(base)));
  root.add("draws", JsonValue::integer(draws));
  root.add("bound_scale", JsonValue::number(scale));

  long long total = 0;
  auto sweeps = JsonValue::object();
  if (which.count("expansion")) {
    SweepTally t = sweep_expansion(draws, base, scale);
    total += t.violations;
    sweeps.add("expansion", t.to_json());
  }
  if (which.count("lindeberg")) {
    SweepTally t = sweep_lindeberg(draws, base, scale);
    total += t.violations;
    sweeps.add("lindeberg", t.to_json());
  }
  if (which.count("nearness")) {
    SweepTally t = sweep_nearness(draws, base, scale);
    total += t.violations;
    sweeps.add("nearness", t.to_json());
  }
  if (which.count("corollary")) {
    argmin::CorollaryOptions opts;
    opts.instances = static_cast<int>(int_field(cfg, "corollary_instances",
                                                std::min<long long>(draws, 1000)));
    if (opts.instances < 1) throw DataError("'corollary_instances' must be positive");
    opts.magnitude = num_field(cfg, "corollary_magnitude", 1.0);
    opts.seed = argmin::mix_seed(base, 0x4000000ULL);
    argmin::CorollaryReport rep = argmin::basic_corollary_check(opts);
    total += rep.violations;
    auto o = JsonValue::object();
    o.add("instances", JsonValue::integer(rep.instances));
    o.add("minimiser_beyond_delta", JsonValue::integer(rep.dist_exceeded));
    o.add("remainder_threshold_met", JsonValue::integer(rep.hypothesis_met));
    o.add("violations", JsonValue::integer(rep.violations));
    o.add("min_margin", JsonValue::number(rep.min_margin));
    sweeps.add("corollary", std::move(o));
  }
  root.add("sweeps", std::move(sweeps));
  root.add("total_violations", JsonValue::integer(total));
  root.add("all_hold", JsonValue::boolean(total == 0));
  emit(root, output_path);
  return total == 0 ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convex M-estimation laboratory"};
  std::string command, config_path, output_flag;
  std::uint64_t seed = 0;
  app.add_option("command", command, "fit | simulate | check")->required();
  app.add_option("config", config_path, "JSON experiment config")->required();
  app.add_option("--output", output_flag, "write the report to this path (overrides the config)");
  auto* seed_opt = app.add_option("--seed", seed, "override the config's base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (command != "fit" && command != "simulate" && command != "check")
      throw DataError("unknown command '" + command + "'");
    json cfg = load_config(config_path);
    std::string declared = str_field(cfg, "command", command);
    if (declared != command)
      throw DataError("config declares command '" + declared + "' but '" + command +
                      "' was requested");
    std::string output_path = output_flag.empty() ? str_field(cfg, "output", "") : output_flag;
    bool seed_set = seed_opt->count() > 0;
    if (command == "fit") return cmd_fit(cfg, output_path);
    if (command == "simulate") return cmd_simulate(cfg, output_path, seed_set, seed);
    return cmd_check(cfg, output_path, seed_set, seed);
  } catch (const argmin::TooManyFailures& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const argmin::EstimationError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "DataError: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
