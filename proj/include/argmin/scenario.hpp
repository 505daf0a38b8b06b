#ifndef ARGMIN_SCENARIO_HPP
#define ARGMIN_SCENARIO_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "argmin/dataset.hpp"
#include "argmin/rng.hpp"

namespace argmin {

// Error distributions are standardised to unit variance (and symmetric), so
// regression targets stay interpretable across menu choices.
struct ErrorDistribution {
  std::string name;
  std::function<double(Rng&)> sample;
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
  double mean_abs = 0.0;  // E|eps|
};

ErrorDistribution make_error(const std::string& name, int t_df = 5);

// Covariate source.  Discrete menus admit exact expectations; continuous
// ones are represented by a deterministic pseudo-support when an
// expectation is required.
struct DesignSpec {
  std::string menu = "gaussian";  // gaussian, uniform, two_point, three_point,
                                  // binary, intercept_only, fixed
  int covariates = 1;             // columns before the intercept is added
  bool intercept = true;
  bool fixed_across_reps = false;  // draw once, reuse in every replication
  MatrixXd fixed;                  // rows used verbatim when menu == "fixed"

  int columns() const { return covariates + (intercept ? 1 : 0); }
};

enum class Normalization { SqrtN, PerRepInformation };

struct ScenarioConfig {
  ModelTag model = ModelTag::Ols;
  long n = 100;
  int R = 100;
  VectorXd beta0;
  double quantile_p = 0.5;
  double alpha = 2.0;
  std::string mean_fn = "linear";     // linear, square
  std::string sigma_fn = "constant";  // constant, one_plus_half_xsq
  double sigma_scale = 1.0;
  std::string binary_q = "logistic";  // logistic, skewed_three
  std::string error_dist = "normal";  // normal, double_exponential, t
  int t_df = 5;
  DesignSpec design;
  std::uint64_t base_seed = 1;
  double censor_target = 0.0;
  int markov_k = 2;
  int threads = 1;
  Normalization normalization = Normalization::SqrtN;

  bool misspecified() const;
  void validate() const;
};

// Weighted covariate support: exact for discrete menus, the realized rows
// for fixed designs, and a deterministic pseudo-sample for continuous
// random ones.  Rows include the intercept column when configured.
struct DesignSupport {
  std::vector<double> weight;
  std::vector<VectorXd> row;
};

DesignSupport design_support(const DesignSpec& spec, long n,
                             std::uint64_t base_seed);

// Full design matrix for one replication (respecting fixed_across_reps).
MatrixXd realize_design(const ScenarioConfig& config, Rng& rep_rng);

double mean_value(const ScenarioConfig& config, const VectorXd& row);
double sigma_value(const ScenarioConfig& config, const VectorXd& row);
double binary_prob(const ScenarioConfig& config, const VectorXd& row);

// Uniform-censoring upper bound c such that the average censoring
// probability over the design matches the target.
double calibrate_censoring(const ScenarioConfig& config);

// One replication's dataset; deterministic in (config, base_seed, rep).
Dataset generate(const ScenarioConfig& config, int rep);

}  // namespace argmin

#endif
