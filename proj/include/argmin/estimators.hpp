#ifndef ARGMIN_ESTIMATORS_HPP
#define ARGMIN_ESTIMATORS_HPP

#include <functional>
#include <utility>

#include "argmin/convex.hpp"
#include "argmin/dataset.hpp"

namespace argmin {

struct FitResult {
  VectorXd beta;
  SolveReport report;
  ModelTag model = ModelTag::Ols;
};

struct DoubleExpFit {
  double mu = 0.0;
  double tau = 0.0;
};

struct PosteriorMeanReport {
  double theta_star = 0.0;  // posterior mean
  double theta_mle = 0.0;   // sample median (maximum likelihood)
  double gap = 0.0;         // sqrt(n) |theta_star - theta_mle|
};

// Scalar-parameter neighbour coupling for Markov pseudo-likelihood fits.
// H(j, left, right) scores state j against the available neighbours.
struct MarkovCoupling {
  std::function<double(int j, int left, int right, bool has_left, bool has_right)> H;
  static MarkovCoupling neighbor_agreement();
};

// Objective builders, exposed so properties (convexity, derivatives) can be
// checked directly against the fits that minimise them.
ConvexObjective quantile_objective(const VectorXd& y, double p);
ConvexObjective l_alpha_objective(const VectorXd& y, double alpha);
ConvexObjective ols_objective(const MatrixXd& X, const VectorXd& y);
ConvexObjective lad_objective(const MatrixXd& X, const VectorXd& y);
ConvexObjective logistic_objective(const MatrixXd& X, const VectorXd& y);
ConvexObjective poisson_objective(const MatrixXd& Z, const VectorXd& y);
ConvexObjective cox_objective(const Dataset& data);
ConvexObjective exp_hazard_objective(const Dataset& data,
                                     const std::function<double(double)>& baseline,
                                     double horizon);
ConvexObjective markov_objective(const Dataset& data, const MarkovCoupling& coupling);

// Optimal interval of the empirical p-quantile criterion; collapses to a
// point when the minimiser is unique.
std::pair<double, double> quantile_interval(const VectorXd& y, double p);

// Sample p-quantile by exact order statistics; flat intervals resolved to
// their midpoint.
FitResult fit_quantile(const VectorXd& y, double p);

// Minimiser of sum |y - t|^alpha for alpha >= 1 (alpha = 1 is the median,
// alpha = 2 the mean).
FitResult fit_l_alpha(const VectorXd& y, double alpha);

FitResult fit_ols(const MatrixXd& X, const VectorXd& y);
FitResult fit_lad(const MatrixXd& X, const VectorXd& y);
FitResult fit_logistic(const MatrixXd& X, const VectorXd& y);
FitResult fit_poisson(const MatrixXd& Z, const VectorXd& y);

// Partial-likelihood fit with risk-set denominators shared across tied
// event times.
FitResult fit_cox(const Dataset& data);

// Parametric hazard exp(beta'z) * baseline(t), observed on [0, horizon].
// horizon <= 0 means "largest observed time".
FitResult fit_exp_hazard(const Dataset& data,
                         const std::function<double(double)>& baseline = nullptr,
                         double horizon = 0.0);

// Location-scale double-exponential maximum likelihood: median and mean
// absolute deviation.
DoubleExpFit fit_double_exponential(const VectorXd& y);

FitResult fit_markov_pl(const Dataset& data,
                        const MarkovCoupling& coupling = MarkovCoupling::neighbor_agreement());

// Posterior mean for a 1-D double-exponential location likelihood (unit
// scale) under a prior bounded by C1 * exp(C2 |theta|), integrated over an
// adaptively extended window around the median.
PosteriorMeanReport posterior_mean_1d(
    const VectorXd& y, const std::function<double(double)>& prior = nullptr,
    double C1 = 1.0, double C2 = 0.0);

struct FitParams {
  double quantile_p = 0.5;
  double alpha = 2.0;
  std::function<double(double)> baseline;  // exp-hazard baseline, default 1
  double horizon = 0.0;
};

// Tag dispatch used by the CLI and the Monte Carlo engine.  The
// double-exponential fit packs (mu, tau) into beta.
FitResult fit_model(ModelTag tag, const Dataset& data, const FitParams& params = {});

}  // namespace argmin

#endif
