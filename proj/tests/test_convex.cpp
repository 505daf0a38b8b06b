#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "argmin/convex.hpp"
#include "argmin/dataset.hpp"
#include "argmin/estimators.hpp"
#include "argmin/math.hpp"
#include "argmin/rng.hpp"

using argmin::ConvexObjective;
using argmin::QuadraticModel;
using argmin::Rng;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_spd(Rng& rng, int p, double log_eig_lo, double log_eig_hi) {
  MatrixXd G(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) G(i, j) = rng.normal();
  Eigen::HouseholderQR<MatrixXd> qr(G);
  MatrixXd Q = qr.householderQ();
  VectorXd eig(p);
  for (int i = 0; i < p; ++i)
    eig[i] = std::pow(10.0, rng.uniform(log_eig_lo, log_eig_hi));
  return Q * eig.asDiagonal() * Q.transpose();
}

double brute_min_1d(const ConvexObjective& obj, double lo, double hi, long steps) {
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i <= steps; ++i) {
    VectorXd t = VectorXd::Constant(1, lo + (hi - lo) * double(i) / double(steps));
    best = std::min(best, obj.value(t));
  }
  return best;
}

}  // namespace

TEST_CASE("newton solver recovers the minimum of random well conditioned quadratics") {
  Rng rng(20260401u);
  for (int draw = 0; draw < 100; ++draw) {
    int p = 1 + static_cast<int>(rng.below(5));
    MatrixXd V = random_spd(rng, p, -2.0, 2.0);
    VectorXd U(p);
    for (int i = 0; i < p; ++i) U[i] = rng.uniform(-3.0, 3.0);
    QuadraticModel model(V, U, rng.uniform(-1.0, 1.0));
    VectorXd exact = model.argmin();

    VectorXd start(p);
    for (int i = 0; i < p; ++i) start[i] = rng.uniform(-5.0, 5.0);
    auto report = argmin::solve_smooth(model.as_objective(), start, 1e-10);

    CHECK(report.converged);
    CHECK(report.iterations <= 25);
    CHECK(report.certificate_norm <= 1e-10);
    CHECK((report.argmin - exact).norm() <= 1e-8 * (1.0 + exact.norm()));
  }
}

TEST_CASE("quadratic bowl centred at zero solves to the origin from any start") {
  ConvexObjective obj;
  obj.dim = 3;
  obj.value = [](const VectorXd& b) { return 0.5 * b.squaredNorm(); };
  obj.grad = [](const VectorXd& b) { return VectorXd(b); };
  obj.hess = [](const VectorXd& b) {
    return MatrixXd(MatrixXd::Identity(b.size(), b.size()));
  };
  obj.smoothness = argmin::Smoothness::TwiceDifferentiable;

  VectorXd start(3);
  start << 4.0, -7.0, 11.0;
  auto report = argmin::solve_smooth(obj, start, 1e-12);
  CHECK(report.converged);
  CHECK(report.argmin.norm() <= 1e-10);
  CHECK(report.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("quadratic model with identity curvature and linear tilt lands at minus the tilt") {
  MatrixXd V = MatrixXd::Identity(2, 2);
  VectorXd U(2);
  U << 1.0, 2.0;
  QuadraticModel model(V, U, 0.0);

  VectorXd expect(2);
  expect << -1.0, -2.0;
  CHECK((model.argmin() - expect).norm() <= 1e-14);

  auto report = argmin::solve_smooth(model.as_objective(), VectorXd::Zero(2), 1e-12);
  CHECK((report.argmin - expect).norm() <= 1e-10);
}

TEST_CASE("quadratic model curvature equals the smallest eigenvalue of its matrix") {
  Rng rng(9117u);
  for (int draw = 0; draw < 20; ++draw) {
    int p = 1 + static_cast<int>(rng.below(4));
    MatrixXd V = random_spd(rng, p, -1.5, 1.5);
    QuadraticModel model(V, VectorXd::Zero(p), 0.0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(V);
    CHECK(model.min_curvature() ==
          doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-10));
  }
}

TEST_CASE("separated logistic data is reported as a verified descent direction") {
  MatrixXd X(2, 1);
  X << -1.0, 1.0;
  VectorXd y(2);
  y << 0.0, 1.0;
  ConvexObjective obj = argmin::logistic_objective(X, y);

  bool threw = false;
  try {
    argmin::solve_smooth(obj, VectorXd::Zero(1), 1e-9);
  } catch (const argmin::MonotoneObjective& e) {
    threw = true;
    REQUIRE(e.direction.size() == 1);
    VectorXd d = VectorXd::Constant(1, e.direction[0]);
    CHECK(std::abs(d.norm() - 1.0) <= 1e-9);
    // The objective must keep falling far along the reported direction.
    CHECK(obj.value(100.0 * d) < obj.value(10.0 * d));
    CHECK(obj.value(10.0 * d) < obj.value(VectorXd::Zero(1)));
  }
  CHECK(threw);
}

TEST_CASE("linear objective has no finite minimum and reports descent along minus the slope") {
  VectorXd c(2);
  c << 2.0, -1.0;
  ConvexObjective obj;
  obj.dim = 2;
  obj.value = [c](const VectorXd& b) { return c.dot(b); };
  obj.grad = [c](const VectorXd&) { return VectorXd(c); };
  obj.smoothness = argmin::Smoothness::OnceDifferentiable;

  bool threw = false;
  try {
    argmin::solve_smooth(obj, VectorXd::Zero(2), 1e-9);
  } catch (const argmin::MonotoneObjective& e) {
    threw = true;
    REQUIRE(e.direction.size() == 2);
    double along = c[0] * e.direction[0] + c[1] * e.direction[1];
    CHECK(along < 0.0);
  }
  CHECK(threw);
}

TEST_CASE("non finite objective value at the start is rejected") {
  ConvexObjective obj;
  obj.dim = 1;
  obj.value = [](const VectorXd&) { return std::numeric_limits<double>::quiet_NaN(); };
  obj.grad = [](const VectorXd& b) { return VectorXd(b); };
  CHECK_THROWS_AS(argmin::solve_smooth(obj, VectorXd::Zero(1), 1e-8),
                  argmin::NonFiniteObjective);
}

TEST_CASE("breakpoint scan matches known medians and midpoint tie break") {
  VectorXd y3(3);
  y3 << 1.0, 2.0, 9.0;
  auto r3 = argmin::solve_nonsmooth(argmin::quantile_objective(y3, 0.5),
                                    VectorXd::Zero(1), 1e-10);
  CHECK(r3.argmin[0] == doctest::Approx(2.0).epsilon(1e-12));

  VectorXd y2(2);
  y2 << 0.0, 10.0;
  auto r2 = argmin::solve_nonsmooth(argmin::quantile_objective(y2, 0.5),
                                    VectorXd::Zero(1), 1e-10);
  CHECK(r2.argmin[0] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("breakpoint scan attains the brute force minimum on random piecewise linear instances") {
  Rng rng(33219u);
  for (int draw = 0; draw < 200; ++draw) {
    long n = 3 + static_cast<long>(rng.below(10));
    VectorXd y(n);
    for (long i = 0; i < n; ++i) y[i] = rng.uniform(-10.0, 10.0);
    double p = rng.uniform(0.05, 0.95);
    ConvexObjective obj = argmin::quantile_objective(y, p);

    auto report = argmin::solve_nonsmooth(obj, VectorXd::Zero(1), 1e-10);
    double lo = y.minCoeff() - 1.0, hi = y.maxCoeff() + 1.0;
    double brute = brute_min_1d(obj, lo, hi, 20000);
    double scale = 1.0 + std::abs(report.value);
    CHECK(report.value <= brute + 1e-9 * scale);
    // Brute force can only overshoot by the slope bound times its own step.
    double step = (hi - lo) / 20000.0;
    CHECK(brute <= report.value + double(n) * step + 1e-9 * scale);
    // The reported value is the criterion evaluated at the reported argmin.
    CHECK(report.value == doctest::Approx(obj.value(report.argmin)).epsilon(1e-12));
  }
}

TEST_CASE("smoothing homotopy solves a two dimensional least absolute deviation fit") {
  MatrixXd X(3, 2);
  X << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
  VectorXd y(3);
  y << 1.0, 2.0, 3.0;
  ConvexObjective obj = argmin::lad_objective(X, y);
  auto report = argmin::solve_nonsmooth(obj, VectorXd::Zero(2), 1e-8);

  VectorXd expect(2);
  expect << 1.0, 2.0;
  CHECK((report.argmin - expect).norm() <= 1e-5);

  // Grid oracle over [-5,5]^2 at step 0.01 cannot find a lower value.
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 1000; ++i)
    for (int j = 0; j <= 1000; ++j) {
      VectorXd b(2);
      b << -5.0 + 0.01 * i, -5.0 + 0.01 * j;
      best = std::min(best, obj.value(b));
    }
  CHECK(report.value <= best + 1e-9);
}

TEST_CASE("nearness bound on an exact quadratic reports zero discrepancy") {
  MatrixXd V = MatrixXd::Identity(2, 2) * 2.0;
  VectorXd U(2);
  U << -1.0, 0.5;
  QuadraticModel B(V, U, 0.3);
  auto A = [&B](const VectorXd& s) { return B.value(s); };
  auto rep = argmin::argmin_nearness_bound(A, B, 0.7);

  CHECK(rep.Delta <= 1e-12);
  CHECK(rep.h == doctest::Approx(0.5 * 2.0 * 0.7 * 0.7).epsilon(1e-12));
  CHECK(rep.argmin_distance <= rep.grid_step * 1.5);
  CHECK(rep.bound_holds);
}

TEST_CASE("constant offsets shift the discrepancy but never the argmin") {
  MatrixXd V = MatrixXd::Identity(1, 1);
  QuadraticModel B(V, VectorXd::Constant(1, -0.4), 0.0);
  double c = 0.37;
  auto A = [&B, c](const VectorXd& s) { return B.value(s) + c; };
  auto rep = argmin::argmin_nearness_bound(A, B, 0.5);

  CHECK(rep.Delta == doctest::Approx(c).epsilon(1e-10));
  CHECK(rep.argmin_distance <= rep.grid_step * 1.5);
  CHECK(rep.bound_holds);
}

TEST_CASE("small sine ripple keeps the argmin within delta of the quadratic centre") {
  MatrixXd V = MatrixXd::Identity(1, 1);
  QuadraticModel B(V, VectorXd::Zero(1), 0.0);
  auto A = [](const VectorXd& s) { return 0.5 * s[0] * s[0] + 0.05 * std::sin(20.0 * s[0]); };
  double delta = 0.5;
  auto rep = argmin::argmin_nearness_bound(A, B, delta, 2001);

  CHECK(rep.Delta <= 0.05 + 1e-9);
  // Discrepancy below a quarter of min-curvature times delta squared forces
  // the sampled argmin inside the delta ball.
  CHECK(rep.Delta < 0.25 * delta * delta);
  CHECK(rep.argmin_distance <= delta + rep.grid_step);
  CHECK(rep.bound_holds);
}

TEST_CASE("nearness bound never fails across random convex perturbations") {
  Rng rng(0x5eed0badu);
  int checked = 0;
  for (int draw = 0; draw < 400; ++draw) {
    int p = 1 + static_cast<int>(rng.below(2));
    MatrixXd root(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) root(i, j) = rng.normal();
    MatrixXd V = root.transpose() * root + 0.3 * MatrixXd::Identity(p, p);
    VectorXd center(p);
    for (int i = 0; i < p; ++i) center[i] = rng.uniform(-0.5, 0.5);
    QuadraticModel B(V, VectorXd(-V * center), 0.0);

    VectorXd w(p), v(p);
    for (int i = 0; i < p; ++i) {
      w[i] = rng.uniform(-1.0, 1.0);
      v[i] = rng.uniform(-1.0, 1.0);
    }
    double c1 = rng.uniform(0.0, 0.5), c2 = rng.uniform(0.0, 0.5);
    double b0 = rng.uniform(-0.5, 0.5);
    std::function<double(const VectorXd&)> A = [&](const VectorXd& s) {
      return B.value(s) + c1 * std::abs(w.dot(s) + b0) + c2 * argmin::log1pexp(v.dot(s));
    };
    double delta = rng.uniform(0.1, 1.0);
    auto rep = argmin::argmin_nearness_bound(A, B, delta, p == 1 ? 101 : 21);
    CHECK(rep.bound_holds);
    ++checked;
  }
  CHECK(checked == 400);
}

TEST_CASE("fitting objectives are midpoint convex on random pairs") {
  Rng rng(77152u);

  auto convex_on_pairs = [&](const ConvexObjective& obj, double box) {
    for (int trial = 0; trial < 25; ++trial) {
      VectorXd a(obj.dim), b(obj.dim);
      for (int i = 0; i < obj.dim; ++i) {
        a[i] = rng.uniform(-box, box);
        b[i] = rng.uniform(-box, box);
      }
      double fa = obj.value(a), fb = obj.value(b);
      double fm = obj.value(VectorXd(0.5 * (a + b)));
      CHECK(fm <= 0.5 * (fa + fb) + 1e-9 * (1.0 + std::abs(fa) + std::abs(fb)));
    }
  };

  long n = 40;
  MatrixXd X(n, 2);
  VectorXd yc(n), yb(n), ycount(n);
  for (long i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = rng.uniform(-2.0, 2.0);
    yc[i] = X(i, 1) + rng.normal();
    yb[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    ycount[i] = double(rng.below(5));
  }

  convex_on_pairs(argmin::quantile_objective(yc, 0.3), 5.0);
  convex_on_pairs(argmin::l_alpha_objective(yc, 1.5), 5.0);
  convex_on_pairs(argmin::ols_objective(X, yc), 5.0);
  convex_on_pairs(argmin::lad_objective(X, yc), 5.0);
  convex_on_pairs(argmin::logistic_objective(X, yb), 3.0);
  convex_on_pairs(argmin::poisson_objective(X, ycount), 2.0);

  VectorXd times(n);
  Eigen::VectorXi event(n);
  for (long i = 0; i < n; ++i) {
    times[i] = rng.exponential(1.0);
    event[i] = rng.bernoulli(0.7) ? 1 : 0;
  }
  auto surv = argmin::Dataset::survival(X, times, event);
  convex_on_pairs(argmin::cox_objective(surv), 1.5);
  convex_on_pairs(argmin::exp_hazard_objective(surv, nullptr, 0.0), 1.5);

  std::vector<int> path;
  int state = 1;
  for (int i = 0; i < 60; ++i) {
    if (rng.bernoulli(0.4)) state = 1 + static_cast<int>(rng.below(2));
    path.push_back(state);
  }
  auto markov = argmin::Dataset::markov(path, 2);
  convex_on_pairs(argmin::markov_objective(markov, argmin::MarkovCoupling::neighbor_agreement()), 2.0);
}
