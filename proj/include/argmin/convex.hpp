#ifndef ARGMIN_CONVEX_HPP
#define ARGMIN_CONVEX_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "argmin/errors.hpp"

namespace argmin {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Smoothness { TwiceDifferentiable, OnceDifferentiable, NonSmooth };

// A convex function of beta with whatever derivative information the owner
// can supply.  Nonsmooth problems may carry 1-D kink locations, an
// epsilon-smoothed surrogate family, and a subgradient certificate
// (distance from 0 to the subdifferential at beta).
struct ConvexObjective {
  int dim = 1;
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> grad;
  std::function<MatrixXd(const VectorXd&)> hess;
  Smoothness smoothness = Smoothness::NonSmooth;
  std::vector<double> breakpoints;
  std::function<ConvexObjective(double)> smoothed;
  std::function<double(const VectorXd&)> certificate;
};

struct SolveReport {
  VectorXd argmin;
  double value = 0.0;
  double certificate_norm = 0.0;  // gradient norm, or subdifferential distance
  int iterations = 0;
  bool converged = false;
  VectorXd divergence_direction;  // empty unless divergence was verified
};

struct SolveOptions {
  int max_iterations = 500;
  double norm_cap = 1e6;    // iterate norm beyond which divergence is probed
  double drift_cap = 10.0;  // displacement that triggers a probe at convergence
  double armijo_c = 1e-4;
  int max_backtracks = 60;
};

// Exact quadratic comparison function  s'Vs/2 + U's + C  with V symmetric
// positive definite.
class QuadraticModel {
public:
  QuadraticModel(MatrixXd V, VectorXd U, double C);

  const MatrixXd& V() const { return V_; }
  const VectorXd& U() const { return U_; }
  double C() const { return C_; }
  int dim() const { return static_cast<int>(U_.size()); }

  VectorXd argmin() const;
  double min_curvature() const { return k_min_; }
  double value(const VectorXd& s) const;
  ConvexObjective as_objective() const;

private:
  MatrixXd V_;
  VectorXd U_;
  double C_;
  double k_min_;
};

// Newton descent with Armijo backtracking; Barzilai-Borwein gradient steps
// when the Hessian is missing or unusable.  Convergence means
// ||grad|| <= tol.  A candidate far from the start is re-checked with a
// monotonicity probe out to the norm cap; verified monotone descent raises
// MonotoneObjective carrying the unit direction.
SolveReport solve_smooth(const ConvexObjective& obj, const VectorXd& start,
                         double tol, const SolveOptions& opts = {});

// 1-D piecewise-linear objectives: exact minimization over the breakpoint
// set, returning the midpoint of a flat optimal interval.  Otherwise runs
// the smoothing homotopy (epsilon 1.0 shrinking tenfold to 1e-8) and
// requires the subgradient certificate to meet tol.
SolveReport solve_nonsmooth(const ConvexObjective& obj, const VectorXd& start,
                            double tol, const SolveOptions& opts = {});

struct NearnessReport {
  double Delta = 0.0;            // sup over the delta-ball of |A - B|
  double h = 0.0;                // inf over the sphere of B minus its minimum
  double argmin_distance = 0.0;  // grid distance from A's argmin to B's
  bool bound_holds = false;
  double grid_step = 0.0;
};

// Finite-sample shadow of the argmin-nearness inequality: either A's argmin
// lies within delta of B's, or the ball-sup discrepancy is at least h/2.
// A is examined on a regular grid (dim <= 3).
NearnessReport argmin_nearness_bound(
    const std::function<double(const VectorXd&)>& A, const QuadraticModel& B,
    double delta, int grid_per_axis = 101, double search_radius_mult = 3.0);

}  // namespace argmin

#endif
