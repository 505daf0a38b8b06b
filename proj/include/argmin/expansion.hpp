#ifndef ARGMIN_EXPANSION_HPP
#define ARGMIN_EXPANSION_HPP

#include <Eigen/Dense>

#include "argmin/errors.hpp"

namespace argmin {

using Eigen::VectorXd;

// Two-term Taylor expansion of K(t) = log sum_i w_i exp(a_i t) around 0:
//   K(t) - K(0) = abar0 * t + kpp0 * t^2 / 2 + remainder
// with two analytic envelopes for the remainder,
//   bound_cubic = (4/3) mu^3 |t|^3,
//   bound_tight = (2/3) g(mu |t|) kpp0 t^2,  g(u) = u exp(2u + 4u^2),
// where mu = max_i |a_i - abar0|.
struct ExpansionReport {
  double K0 = 0.0;
  double Kt = 0.0;
  double abar0 = 0.0;   // tilted mean of a at t = 0
  double kpp0 = 0.0;    // tilted variance of a at t = 0
  double remainder = 0.0;
  double bound_cubic = 0.0;
  double bound_tight = 0.0;
  double mu = 0.0;
  bool bounds_hold = false;
};

ExpansionReport logsumexp_expand(const VectorXd& w, const VectorXd& a, double t);

// First three derivatives of K at t, computed under the tilted weights.
struct CumulantDerivatives {
  double K = 0.0;
  double K1 = 0.0;  // tilted mean
  double K2 = 0.0;  // tilted variance
  double K3 = 0.0;  // tilted third central moment
};

CumulantDerivatives logsumexp_derivatives(const VectorXd& w, const VectorXd& a, double t);

}  // namespace argmin

#endif
