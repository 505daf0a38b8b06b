#ifndef ARGMIN_SIMULATE_HPP
#define ARGMIN_SIMULATE_HPP

#include <map>
#include <string>
#include <vector>

#include "argmin/scenario.hpp"

namespace argmin {

struct SimulationReport {
  long n = 0;
  int R = 0;
  int succeeded = 0;
  std::map<std::string, int> failures;  // error kind -> count
  VectorXd theta0;
  VectorXd mean_stat;
  MatrixXd emp_cov;     // covariance of the normalised estimates
  MatrixXd theory_cov;  // limit covariance for the same normalisation
  std::string theory_provenance;
  double max_rel_eig_gap = 0.0;  // eigenvalues of T^{-1/2} E T^{-1/2} vs 1
  VectorXd ks;                   // per-coordinate KS against fitted normal
  VectorXd coverage;             // per-coordinate 95% Wald coverage
  MatrixXd middle_hat;           // least squares: mean residual-based (K+L)/n
  MatrixXd middle_theory;
};

// Pseudo-true parameter: exact population minimiser over the design
// support (weighted KL for logistic, population least squares or least
// absolute deviations for the continuous models).
VectorXd population_projection(const ScenarioConfig& config);

// The parameter the normalised estimates are centred at: beta0 under the
// model, the population projection outside it, and the derived location
// functionals for the location families.
VectorXd target_parameter(const ScenarioConfig& config);

// Model information (negative log-likelihood curvature) at beta for one
// dataset; used for per-replication normalisation and averaged-curvature
// limits.
MatrixXd information_at(const ScenarioConfig& config, const Dataset& data,
                        const VectorXd& beta);

SimulationReport run_scenario(const ScenarioConfig& config);

struct QuantileProcessReport {
  std::vector<double> p_grid;
  MatrixXd emp_cov;
  MatrixXd theory_cov;  // p_i (1 - p_j) / (f(q_i) f(q_j)) for i <= j
  double max_rel_gap = 0.0;
};

QuantileProcessReport quantile_process_check(long n, int R,
                                             const std::vector<double>& p_grid,
                                             const std::string& error_dist,
                                             std::uint64_t base_seed,
                                             int t_df = 5);

struct BayesEquivalenceReport {
  std::vector<long> n_grid;
  std::vector<double> median_gap;  // median over reps of sqrt(n)|theta_star - theta_hat|
  std::vector<double> ratio;       // median_gap[i] / median_gap[i-1]
  bool decreasing = false;
};

BayesEquivalenceReport bayes_equivalence_check(
    const std::vector<long>& n_grid, int R, std::uint64_t base_seed,
    const std::function<double(double)>& prior = nullptr, double C1 = 1.0,
    double C2 = 0.0);

// Random quadratic-plus-convex-perturbation instances probing the argmin
// nearness implication: a minimiser farther than delta from the quadratic
// centre forces the centred remainder supremum to reach half k delta^2.
// Grid resolution is accounted for on both sides, so any counted violation
// is a proven one.
struct CorollaryOptions {
  int instances = 1000;
  std::uint64_t seed = 1;
  double magnitude = 1.0;  // perturbation scale multiplier
  int grid_1d = 201;       // grid points per axis, one-dimensional instances
  int grid_2d = 61;
};

struct CorollaryReport {
  int instances = 0;
  int dist_exceeded = 0;    // minimiser provably farther than delta
  int hypothesis_met = 0;   // centred remainder reached half k delta^2
  int violations = 0;       // exceeded with the remainder provably below
  double min_margin = 0.0;  // slack of the implication over exceeded cases
};

CorollaryReport basic_corollary_check(const CorollaryOptions& options);

}  // namespace argmin

#endif
