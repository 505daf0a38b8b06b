#ifndef ARGMIN_CONDITIONS_HPP
#define ARGMIN_CONDITIONS_HPP

#include <Eigen/Dense>
#include <vector>

#include "argmin/dataset.hpp"
#include "argmin/errors.hpp"

namespace argmin {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Truncated second-moment diagnostics for triangular-array normality.
// N values are non-increasing in delta and obey N(delta) <= p * lambda / delta.
struct LindebergReport {
  VectorXd delta_grid;
  VectorXd N;        // truncated second-moment sums per delta
  VectorXd L;        // exact Lindeberg sums (Bernoulli case), else empty
  double lambda = 0.0;  // largest standardised summand
  double mu = 0.0;      // max |x_i| / sqrt(n) (logistic case), else 0
  double rho_sum = 0.0; // cubic-remainder total (Poisson case), else 0
  double scale = 0.0;   // variance normalisation applied (Bernoulli case)
  bool sandwich_ok = false;  // N(2 delta)/2 <= L(delta) <= N(delta) everywhere
  bool passes = false;       // N(pass_delta) below pass_threshold
  double pass_delta = 0.1;
  double pass_threshold = 0.05;
};

inline VectorXd default_delta_grid() {
  VectorXd g(5);
  g << 0.05, 0.1, 0.2, 0.5, 1.0;
  return g;
}

// Weighted Bernoulli sums z_i (Y_i - q_i): after normalising to unit
// variance, computes the truncated sums N(delta), the exact Lindeberg sums
// L(delta), and verifies N(2 delta)/2 <= L(delta) <= N(delta).
LindebergReport bernoulli_lindeberg(const VectorXd& z, const VectorXd& q,
                                    const VectorXd& delta_grid = default_delta_grid(),
                                    double pass_delta = 0.1,
                                    double pass_threshold = 0.05);

// Normality condition for logistic regression at beta0: truncated sums of
// q(1-q) |J^{-1/2} x|^2, the largest standardised row, and max |x_i|/sqrt(n).
LindebergReport logistic_condition(const MatrixXd& X, const VectorXd& beta0,
                                   const VectorXd& delta_grid = default_delta_grid(),
                                   double pass_delta = 0.1,
                                   double pass_threshold = 0.05);

// Same diagnostic for Poisson regression, plus the cubic remainder total
// sum_i mu_i rho(|J^{-1/2} z_i|) with rho(u) = 6(e^u - 1 - u - u^2/2).
LindebergReport poisson_condition(const MatrixXd& Z, const VectorXd& beta0,
                                  const VectorXd& delta_grid = default_delta_grid(),
                                  double pass_delta = 0.1,
                                  double pass_threshold = 0.05);

// Remainder of the second-order exponential expansion, with its envelope
// |rho(u)| <= |u|^3 e^|u| available to property checks.
double exp_remainder_rho(double u);

// Information trajectory for the partial-likelihood model: at each grid
// time, the weighted covariance of covariates over the risk set and the
// scaled widest centred covariate.
struct CoxConditionReport {
  VectorXd s_grid;
  std::vector<MatrixXd> J_s;
  VectorXd mu_s;
  double mu_max = 0.0;
};

CoxConditionReport cox_conditions(const Dataset& data, const VectorXd& beta0,
                                  const VectorXd& s_grid);

}  // namespace argmin

#endif
