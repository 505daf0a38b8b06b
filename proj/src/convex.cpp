#include "argmin/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace argmin {

namespace {

bool finite(double x) { return std::isfinite(x); }

// Walks geometrically from `from` along unit direction d out to the norm cap.
// Returns true when the objective is verified non-increasing over the whole
// probe range with a strict overall decrease, i.e. no finite argmin that way.
bool monotone_probe(const ConvexObjective& obj, const VectorXd& from,
                    const VectorXd& d, double norm_cap) {
  double f_first = obj.value(from);
  if (!finite(f_first)) return false;
  double f_prev = f_first;
  double t = 1.0;
  for (;;) {
    VectorXd s = from + t * d;
    double fs = obj.value(s);
    if (!finite(fs)) return false;
    if (fs > f_prev + 1e-12 * (1.0 + std::abs(f_prev))) return false;
    f_prev = fs;
    if (s.norm() >= norm_cap) break;
    t *= 4.0;
    if (t > 1e300) break;
  }
  return f_prev < f_first - 1e-12 * (1.0 + std::abs(f_first));
}

[[noreturn]] void raise_monotone(const VectorXd& d) {
  std::vector<double> dir(d.data(), d.data() + d.size());
  throw MonotoneObjective("objective decreases monotonically to the norm cap; no finite argmin", dir);
}

}  // namespace

QuadraticModel::QuadraticModel(MatrixXd V, VectorXd U, double C)
    : V_(std::move(V)), U_(std::move(U)), C_(C) {
  if (V_.rows() != V_.cols() || V_.rows() != U_.size())
    throw std::invalid_argument("QuadraticModel: dimension mismatch");
  double scale = std::max(1.0, V_.cwiseAbs().maxCoeff());
  if ((V_ - V_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("QuadraticModel: V not symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(V_);
  k_min_ = es.eigenvalues().minCoeff();
  if (!(k_min_ > 0.0))
    throw std::invalid_argument("QuadraticModel: V not positive definite");
}

VectorXd QuadraticModel::argmin() const { return V_.llt().solve(-U_); }

double QuadraticModel::value(const VectorXd& s) const {
  return 0.5 * s.dot(V_ * s) + U_.dot(s) + C_;
}

ConvexObjective QuadraticModel::as_objective() const {
  ConvexObjective o;
  o.dim = dim();
  MatrixXd V = V_;
  VectorXd U = U_;
  double C = C_;
  o.value = [V, U, C](const VectorXd& s) { return 0.5 * s.dot(V * s) + U.dot(s) + C; };
  o.grad = [V, U](const VectorXd& s) { return VectorXd(V * s + U); };
  o.hess = [V](const VectorXd&) { return V; };
  o.smoothness = Smoothness::TwiceDifferentiable;
  return o;
}

SolveReport solve_smooth(const ConvexObjective& obj, const VectorXd& start,
                         double tol, const SolveOptions& opts) {
  if (!obj.value || !obj.grad)
    throw std::invalid_argument("solve_smooth: objective needs value and gradient");
  VectorXd beta = start;
  double f = obj.value(beta);
  if (!finite(f)) throw NonFiniteObjective("objective not finite at the starting point");
  VectorXd g = obj.grad(beta);

  VectorXd beta_prev, g_prev;
  bool have_prev = false;
  int iter = 0;

  auto check_converged_or_diverged = [&](SolveReport& rep) {
    VectorXd disp = beta - start;
    double drift = disp.norm();
    if (drift > opts.drift_cap) {
      VectorXd d = disp / drift;
      if (monotone_probe(obj, beta, d, opts.norm_cap)) raise_monotone(d);
    }
    rep.argmin = beta;
    rep.value = f;
    rep.certificate_norm = g.norm();
    rep.iterations = iter;
    rep.converged = true;
  };

  for (; iter < opts.max_iterations; ++iter) {
    if (g.norm() <= tol) {
      SolveReport rep;
      check_converged_or_diverged(rep);
      return rep;
    }

    // Search direction: Newton when a usable Hessian is supplied, otherwise
    // a Barzilai-Borwein scaled gradient step.
    VectorXd d;
    bool have_newton = false;
    if (obj.hess) {
      MatrixXd H = obj.hess(beta);
      if (H.allFinite()) {
        Eigen::LDLT<MatrixXd> ldlt(H);
        if (ldlt.info() == Eigen::Success) {
          VectorXd cand = ldlt.solve(-g);
          if (cand.allFinite() && g.dot(cand) < 0.0) {
            d = cand;
            have_newton = true;
          }
        }
      }
    }
    if (!have_newton) {
      double eta = 1.0 / std::max(1e-12, g.norm());
      if (have_prev) {
        VectorXd s = beta - beta_prev, yv = g - g_prev;
        double sy = s.dot(yv), yy = yv.dot(yv);
        if (sy > 0.0 && yy > 0.0) eta = std::min(std::max(sy / yy, 1e-12), 1e12);
      }
      d = -eta * g;
    }

    double gd = g.dot(d);
    double step = 1.0;
    bool accepted = false;
    double f_new = f;
    VectorXd beta_new;
    // Within one ulp of the optimum the sufficient-decrease comparison is
    // noise: predicted progress smaller than the objective's evaluation
    // resolution cannot be measured, so take the step and let the gradient
    // certificate terminate the loop.
    double floor = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f));
    if (-gd <= floor) {
      beta_new = beta + d;
      f_new = obj.value(beta_new);
      accepted = finite(f_new);
    } else {
      for (int bt = 0; bt < opts.max_backtracks; ++bt) {
        beta_new = beta + step * d;
        f_new = obj.value(beta_new);
        if (finite(f_new) && f_new <= f + opts.armijo_c * step * gd + floor) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
    }
    if (!accepted) {
      // At the numerical floor: no descent along d.  Report honestly.
      SolveReport rep;
      rep.argmin = beta;
      rep.value = f;
      rep.certificate_norm = g.norm();
      rep.iterations = iter;
      rep.converged = false;
      return rep;
    }

    beta_prev = beta;
    g_prev = g;
    have_prev = true;
    beta = beta_new;
    f = f_new;
    g = obj.grad(beta);

    if (beta.norm() > opts.norm_cap) {
      VectorXd disp = beta - start;
      double drift = disp.norm();
      VectorXd dir = drift > 0.0 ? VectorXd(disp / drift) : VectorXd(-g / g.norm());
      if (monotone_probe(obj, start, dir, opts.norm_cap)) raise_monotone(dir);
      SolveReport rep;
      rep.argmin = beta;
      rep.value = f;
      rep.certificate_norm = g.norm();
      rep.iterations = iter + 1;
      rep.converged = false;
      rep.divergence_direction = dir;
      return rep;
    }
  }

  if (g.norm() <= tol) {
    SolveReport rep;
    check_converged_or_diverged(rep);
    return rep;
  }
  // Iteration budget exhausted; one last probe catches slow monotone drift.
  VectorXd disp = beta - start;
  double drift = disp.norm();
  if (drift > opts.drift_cap) {
    VectorXd dvec = disp / drift;
    if (monotone_probe(obj, beta, dvec, opts.norm_cap)) raise_monotone(dvec);
  }
  SolveReport rep;
  rep.argmin = beta;
  rep.value = f;
  rep.certificate_norm = g.norm();
  rep.iterations = iter;
  rep.converged = false;
  return rep;
}

namespace {

SolveReport breakpoint_scan(const ConvexObjective& obj, const SolveOptions& opts) {
  std::vector<double> b = obj.breakpoints;
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  if (b.empty()) throw EmptyGrid("breakpoint set is empty");

  VectorXd s(1);
  double fmin = std::numeric_limits<double>::infinity();
  std::vector<double> vals(b.size());
  for (size_t i = 0; i < b.size(); ++i) {
    s[0] = b[i];
    vals[i] = obj.value(s);
    if (!finite(vals[i])) throw NonFiniteObjective("objective not finite at a breakpoint");
    fmin = std::min(fmin, vals[i]);
  }

  // A convex piecewise-linear function with interior minimum attains it on a
  // breakpoint interval; monotone tails mean no finite argmin.
  double slack = 1e-9 * (1.0 + std::abs(fmin));
  size_t lo = 0, hi = 0;
  bool seen = false;
  for (size_t i = 0; i < b.size(); ++i) {
    if (vals[i] <= fmin + slack) {
      if (!seen) lo = i;
      hi = i;
      seen = true;
    }
  }
  if (lo == 0) {
    s[0] = b.front() - std::max(1.0, std::abs(b.front()));
    if (obj.value(s) < vals.front() - slack) {
      VectorXd d(1);
      d[0] = -1.0;
      if (monotone_probe(obj, VectorXd::Constant(1, b.front()), d, opts.norm_cap))
        raise_monotone(d);
    }
  }
  if (hi == b.size() - 1) {
    s[0] = b.back() + std::max(1.0, std::abs(b.back()));
    if (obj.value(s) < vals.back() - slack) {
      VectorXd d(1);
      d[0] = 1.0;
      if (monotone_probe(obj, VectorXd::Constant(1, b.back()), d, opts.norm_cap))
        raise_monotone(d);
    }
  }

  SolveReport rep;
  rep.argmin = VectorXd::Constant(1, 0.5 * (b[lo] + b[hi]));
  s[0] = rep.argmin[0];
  rep.value = obj.value(s);
  rep.certificate_norm = 0.0;
  rep.iterations = static_cast<int>(b.size());
  rep.converged = true;
  return rep;
}

}  // namespace

SolveReport solve_nonsmooth(const ConvexObjective& obj, const VectorXd& start,
                            double tol, const SolveOptions& opts) {
  if (!obj.value) throw std::invalid_argument("solve_nonsmooth: objective needs value");
  {
    double f0 = obj.value(start);
    if (!finite(f0)) throw NonFiniteObjective("objective not finite at the starting point");
  }
  if (obj.dim == 1 && !obj.breakpoints.empty()) return breakpoint_scan(obj, opts);
  if (!obj.smoothed)
    throw std::invalid_argument("solve_nonsmooth: need breakpoints or a smoothing family");

  VectorXd beta = start;
  int total_iter = 0;
  for (double eps = 1.0; eps >= 1e-8; eps *= 0.1) {
    ConvexObjective sm = obj.smoothed(eps);
    double stage_tol = std::max(tol, 1e-4 * eps);
    SolveReport r = solve_smooth(sm, beta, stage_tol, opts);
    beta = r.argmin;
    total_iter += r.iterations;
  }

  if (!obj.certificate)
    throw NoCertificate("no subgradient certificate available for this objective");
  double cert = obj.certificate(beta);
  if (!(cert <= tol))
    throw NoCertificate("subgradient certificate " + std::to_string(cert) +
                        " exceeds tolerance " + std::to_string(tol));
  SolveReport rep;
  rep.argmin = beta;
  rep.value = obj.value(beta);
  rep.certificate_norm = cert;
  rep.iterations = total_iter;
  rep.converged = true;
  return rep;
}

NearnessReport argmin_nearness_bound(
    const std::function<double(const VectorXd&)>& A, const QuadraticModel& B,
    double delta, int grid_per_axis, double search_radius_mult) {
  if (grid_per_axis < 2) throw EmptyGrid("need at least two grid points per axis");
  if (!(delta > 0.0)) throw std::invalid_argument("argmin_nearness_bound: delta must be positive");
  int p = B.dim();
  if (p > 3) throw std::invalid_argument("argmin_nearness_bound: grids limited to dim <= 3");

  VectorXd beta = B.argmin();
  double r_search = search_radius_mult * delta;
  double step_ball = 2.0 * delta / (grid_per_axis - 1);
  double step_wide = 2.0 * r_search / (grid_per_axis - 1);

  // Sup of |A-B| over the delta-ball and A's argmin over the wider cube are
  // both taken on regular grids.
  double Delta = 0.0;
  double best_val = std::numeric_limits<double>::infinity();
  double best_dist = 0.0;

  std::vector<int> idx(p, 0);
  VectorXd s(p);
  auto sweep = [&](double radius, double /*step*/, bool ball_only, auto&& visit) {
    std::fill(idx.begin(), idx.end(), 0);
    for (;;) {
      for (int d = 0; d < p; ++d)
        s[d] = beta[d] - radius + 2.0 * radius * idx[d] / (grid_per_axis - 1);
      double dist = (s - beta).norm();
      if (!ball_only || dist <= delta * (1.0 + 1e-12)) visit(s, dist);
      int d = 0;
      while (d < p && ++idx[d] == grid_per_axis) idx[d++] = 0;
      if (d == p) break;
    }
  };

  sweep(delta, step_ball, true, [&](const VectorXd& pt, double) {
    double diff = std::abs(A(pt) - B.value(pt));
    if (std::isfinite(diff)) Delta = std::max(Delta, diff);
  });
  sweep(r_search, step_wide, false, [&](const VectorXd& pt, double dist) {
    double v = A(pt);
    if (std::isfinite(v) && v < best_val) {
      best_val = v;
      best_dist = dist;
    }
  });

  NearnessReport rep;
  rep.Delta = Delta;
  rep.h = 0.5 * B.min_curvature() * delta * delta;
  rep.argmin_distance = best_dist;
  rep.grid_step = std::sqrt(static_cast<double>(p)) * step_wide;
  rep.bound_holds = (best_dist <= delta * (1.0 + 1e-9) + rep.grid_step) ||
                    (Delta >= 0.5 * rep.h - 1e-12 * (1.0 + rep.h));
  return rep;
}

}  // namespace argmin
