// Release gate: one self-contained check per shipped claim, each printed as
// a single [PASS]/[FAIL] line with the measured numbers and the pinned cap.
// Every reference value is computed here from scratch (closed forms, direct
// quadrature, finite differences, exhaustive grids); library shortcuts are
// only ever compared against those references, never substituted for them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "argmin/conditions.hpp"
#include "argmin/convex.hpp"
#include "argmin/dataset.hpp"
#include "argmin/errors.hpp"
#include "argmin/estimators.hpp"
#include "argmin/expansion.hpp"
#include "argmin/math.hpp"
#include "argmin/rng.hpp"
#include "argmin/sandwich.hpp"
#include "argmin/scenario.hpp"
#include "argmin/simulate.hpp"

using argmin::Dataset;
using argmin::ModelTag;
using argmin::Rng;
using argmin::ScenarioConfig;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

namespace {

int g_failed = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

void report(int id, const std::string& label, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, label.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failed;
}

void guarded(int id, const std::string& label, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, label, false, std::string("threw ") + e.what());
  }
}

double rel_frob(const MatrixXd& got, const MatrixXd& want) {
  return (got - want).norm() / want.norm();
}

// Composite Simpson with m (even) panels; used for the quadrature oracles.
double simpson(const std::function<double(double)>& f, double a, double b, int m) {
  double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Multi-stage rectangular scan: 81 points per axis, re-centred on the
// winner with the window shrunk to three grid steps each stage.  Final
// resolution is about 1e-5 of the initial radius.
VectorXd grid_zoom_2d(const std::function<double(const VectorXd&)>& f, VectorXd center,
                      VectorXd radius, int stages = 4) {
  const int m = 80;
  VectorXd best = center;
  for (int stage = 0; stage < stages; ++stage) {
    double bv = std::numeric_limits<double>::infinity();
    VectorXd bx = best;
    VectorXd point(2);
    for (int i = 0; i <= m; ++i) {
      point[0] = best[0] - radius[0] + 2.0 * radius[0] * i / m;
      for (int j = 0; j <= m; ++j) {
        point[1] = best[1] - radius[1] + 2.0 * radius[1] * j / m;
        double v = f(point);
        if (v < bv) {
          bv = v;
          bx = point;
        }
      }
    }
    best = bx;
    radius = radius * (6.0 / m);
  }
  return best;
}

double grid_zoom_1d(const std::function<double(double)>& f, double center, double radius,
                    int stages = 3) {
  const int m = 2000;
  double best = center;
  for (int stage = 0; stage < stages; ++stage) {
    double bv = std::numeric_limits<double>::infinity();
    double bx = best;
    for (int i = 0; i <= m; ++i) {
      double x = best - radius + 2.0 * radius * i / m;
      double v = f(x);
      if (v < bv) {
        bv = v;
        bx = x;
      }
    }
    best = bx;
    radius *= 6.0 / m;
  }
  return best;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const double kPi = std::acos(-1.0);

// ---------------------------------------------------------------- criteria

void crit1_median() {
  const std::string label = "median limit variance pi/2";
  Timer t;
  ScenarioConfig c;
  c.model = ModelTag::Quantile;
  c.quantile_p = 0.5;
  c.n = 2000;
  c.R = 4000;
  c.base_seed = 9001;
  auto rep = argmin::run_scenario(c);
  double emp = rep.emp_cov(0, 0);
  double target = kPi / 2.0;
  double gap = std::abs(emp / target - 1.0);
  double secs = t.seconds();
  bool pass = rep.succeeded == c.R && gap <= 0.05 && secs <= 10.0;
  report(1, label, pass,
         "emp " + fmt(emp) + " vs " + fmt(target) + " (gap " + fmt(100 * gap, 3) +
             "%, cap 5%), " + fmt(secs, 3) + "s (cap 10s), " + std::to_string(rep.succeeded) +
             "/" + std::to_string(c.R) + " fits");
}

void crit2_quantile_process() {
  const std::string label = "quantile triple covariance";
  Timer t;
  std::vector<double> ps = {0.25, 0.5, 0.75};
  auto rep = argmin::quantile_process_check(2000, 4000, ps, "normal", 9002);
  double max_gap = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      max_gap = std::max(max_gap,
                         std::abs(rep.emp_cov(i, j) - rep.theory_cov(i, j)) /
                             std::abs(rep.theory_cov(i, j)));
  // Corner entry has the closed form 0.25^2 / phi(q_{.75})^2 = 0.6190.
  double corner = rep.theory_cov(0, 2);
  bool corner_ok = std::abs(corner - 0.6190) <= 2e-4;
  double secs = t.seconds();
  bool pass = max_gap <= 0.10 && corner_ok && secs <= 30.0;
  report(2, label, pass,
         "max entry gap " + fmt(100 * max_gap, 3) + "% (cap 10%), corner " + fmt(corner, 5) +
             " vs 0.6190, " + fmt(secs, 3) + "s (cap 30s)");
}

void crit3_l_alpha() {
  const std::string label = "power criterion variance vs quadrature";
  Timer t;
  // Oracle: the two absolute moments by composite Simpson, nothing shared
  // with the library's adaptive integrator.  E|Z| over [0,10]; E|Z|^{-1/2}
  // via z = u^2 which removes the origin singularity.
  auto phi = [](double z) { return argmin::normal_pdf(z); };
  double m_plus = 2.0 * simpson([&](double z) { return z * phi(z); }, 0.0, 10.0, 20000);
  double m_minus = 4.0 * simpson([&](double u) { return phi(u * u); }, 0.0, 5.0, 20000);
  double tau2 = m_plus / std::pow(0.5 * m_minus, 2);

  double lib_plus = argmin::normal_abs_moment(1.0);
  double lib_minus = argmin::normal_abs_moment(-0.5);
  bool lib_ok = std::abs(lib_plus - m_plus) <= 1e-7 * m_plus &&
                std::abs(lib_minus - m_minus) <= 1e-7 * m_minus;

  ScenarioConfig c;
  c.model = ModelTag::LAlpha;
  c.alpha = 1.5;
  c.n = 2000;
  c.R = 2000;
  c.base_seed = 9003;
  auto rep = argmin::run_scenario(c);
  double emp = rep.emp_cov(0, 0);
  double gap = std::abs(emp / tau2 - 1.0);
  bool theory_ok = std::abs(rep.theory_cov(0, 0) / tau2 - 1.0) <= 1e-6;
  double secs = t.seconds();
  bool pass = gap <= 0.10 && lib_ok && theory_ok && secs <= 60.0;
  report(3, label, pass,
         "emp " + fmt(emp) + " vs quadrature " + fmt(tau2, 6) + " (gap " + fmt(100 * gap, 3) +
             "%, cap 10%), reported limit " + fmt(rep.theory_cov(0, 0), 6) + ", " +
             fmt(secs, 3) + "s (cap 60s)");
}

void crit4_agnostic_ols() {
  const std::string label = "model-free least squares sandwich";
  ScenarioConfig c;
  c.model = ModelTag::Ols;
  c.design.menu = "three_point";
  c.design.covariates = 1;
  c.design.intercept = true;
  c.mean_fn = "square";
  c.sigma_fn = "one_plus_half_xsq";
  c.sigma_scale = 1.0;
  c.beta0 = VectorXd::Zero(2);
  c.n = 2000;
  c.R = 2000;
  c.base_seed = 9004;

  VectorXd theta = argmin::population_projection(c);
  VectorXd theta_exact(2);
  theta_exact << 2.0 / 3.0, 0.0;
  bool theta_ok = (theta - theta_exact).cwiseAbs().maxCoeff() <= 1e-9;

  // Exact curvature and middle over the three equally weighted levels.
  MatrixXd J = MatrixXd::Zero(2, 2), M = MatrixXd::Zero(2, 2);
  for (double x : {-1.0, 0.0, 1.0}) {
    VectorXd u(2);
    u << 1.0, x;
    double mean_gap = x * x - theta_exact.dot(u);
    double sigma = 1.0 + 0.5 * x * x;
    J += (1.0 / 3.0) * u * u.transpose();
    M += (1.0 / 3.0) * (mean_gap * mean_gap + sigma * sigma) * u * u.transpose();
  }
  MatrixXd Jinv = J.inverse();
  MatrixXd theory = Jinv * M * Jinv;

  auto rep = argmin::run_scenario(c);
  double cov_gap = rel_frob(rep.emp_cov, theory);
  double mid_gap = rel_frob(rep.middle_hat, M);
  bool lib_ok = rel_frob(rep.theory_cov, theory) <= 1e-8 && rel_frob(rep.middle_theory, M) <= 1e-8;
  bool pass = theta_ok && cov_gap <= 0.10 && mid_gap <= 0.10 && lib_ok;
  report(4, label, pass,
         "cov gap " + fmt(100 * cov_gap, 3) + "% (cap 10%), residual middle gap " +
             fmt(100 * mid_gap, 3) + "% (cap 10%), projection (" + fmt(theta[0], 6) + ", " +
             fmt(theta[1], 2) + ") vs (2/3, 0)");
}

void crit5_lad() {
  const std::string label = "absolute-deviation regression variance";
  ScenarioConfig c;
  c.model = ModelTag::Lad;
  c.design.menu = "gaussian";
  c.design.covariates = 1;
  c.design.intercept = true;
  c.design.fixed_across_reps = true;
  c.beta0 = VectorXd(2);
  c.beta0 << 0.5, -1.0;
  c.sigma_scale = 1.0;
  c.n = 2000;
  c.R = 2000;
  c.base_seed = 9005;

  auto support = argmin::design_support(c.design, c.n, c.base_seed);
  MatrixXd Xn = MatrixXd::Zero(2, 2);
  for (size_t i = 0; i < support.row.size(); ++i)
    Xn += support.weight[i] * support.row[i] * support.row[i].transpose();
  MatrixXd theory = (kPi / 2.0) * Xn.inverse();

  auto rep = argmin::run_scenario(c);
  double gap = rel_frob(rep.emp_cov, theory);
  bool pass = gap <= 0.12;
  report(5, label, pass,
         "cov gap " + fmt(100 * gap, 3) + "% vs (pi/2)(X'X/n)^-1 (cap 12%), " +
             std::to_string(rep.succeeded) + "/" + std::to_string(c.R) + " fits");
}

void crit6_logistic_identity() {
  const std::string label = "logistic curvature-normalised identity";
  ScenarioConfig c;
  c.model = ModelTag::Logistic;
  c.design.menu = "uniform";
  c.design.covariates = 2;
  c.design.intercept = true;
  c.design.fixed_across_reps = true;
  c.beta0 = VectorXd(3);
  c.beta0 << 0.25, 0.5, -0.5;
  c.n = 2000;
  c.R = 2000;
  c.base_seed = 9006;
  c.normalization = argmin::Normalization::PerRepInformation;

  auto rep = argmin::run_scenario(c);
  double gap = rel_frob(rep.emp_cov, MatrixXd::Identity(3, 3));
  double ks = rep.ks.maxCoeff();
  bool pass = gap <= 0.10 && ks <= 0.03;
  report(6, label, pass,
         "cov gap to identity " + fmt(100 * gap, 3) + "% (cap 10%), max KS " + fmt(ks, 3) +
             " (cap 0.03)");
}

void crit7_misspecified_logistic() {
  const std::string label = "misspecified logistic projection";
  ScenarioConfig base;
  base.model = ModelTag::LogisticAgnostic;
  base.design.menu = "three_point";
  base.design.covariates = 1;
  base.design.intercept = true;
  base.binary_q = "skewed_three";
  base.beta0 = VectorXd::Zero(2);
  base.n = 2000;
  base.R = 2000;
  base.base_seed = 9072;

  VectorXd theta = argmin::population_projection(base);
  bool theta_ok = std::abs(theta[0] - 0.19916) <= 5e-5 && std::abs(theta[1] - 1.74846) <= 5e-5;

  // Exact curvature and score second moment at the projection: the three
  // levels carry success probabilities 0.2, 0.5, 0.9.
  MatrixXd J = MatrixXd::Zero(2, 2), K = MatrixXd::Zero(2, 2);
  const double qs[3] = {0.2, 0.5, 0.9};
  const double xs[3] = {-1.0, 0.0, 1.0};
  for (int i = 0; i < 3; ++i) {
    VectorXd u(2);
    u << 1.0, xs[i];
    double pi_u = argmin::logistic(theta.dot(u));
    double q = qs[i];
    J += (1.0 / 3.0) * pi_u * (1.0 - pi_u) * u * u.transpose();
    K += (1.0 / 3.0) * (q * (1.0 - q) + (q - pi_u) * (q - pi_u)) * u * u.transpose();
  }
  MatrixXd Jinv = J.inverse();
  MatrixXd S = Jinv * K * Jinv;

  auto norms_for = [&](long n, int R, std::uint64_t seed, bool keep_stats,
                       std::vector<VectorXd>& stats) {
    ScenarioConfig c = base;
    c.n = n;
    c.R = R;
    c.base_seed = seed;
    std::vector<double> norms;
    norms.reserve(R);
    for (int rep = 0; rep < R; ++rep) {
      Dataset data = argmin::generate(c, rep);
      auto fit = argmin::fit_model(ModelTag::LogisticAgnostic, data);
      norms.push_back((fit.beta - theta).norm());
      if (keep_stats) stats.push_back(std::sqrt(double(n)) * (fit.beta - theta));
    }
    return norms;
  };

  std::vector<VectorXd> stats;
  std::vector<VectorXd> unused;
  auto norms500 = norms_for(500, 1000, 9071, false, unused);
  auto norms2000 = norms_for(2000, 2000, 9072, true, stats);
  double med500 = median_of(norms500);
  double med2000 = median_of(norms2000);
  double ratio = med2000 / med500;

  VectorXd mean = VectorXd::Zero(2);
  for (const auto& s : stats) mean += s;
  mean /= double(stats.size());
  MatrixXd emp = MatrixXd::Zero(2, 2);
  for (const auto& s : stats) emp += (s - mean) * (s - mean).transpose();
  emp /= double(stats.size()) - 1.0;

  double cov_gap = rel_frob(emp, S);
  bool ratio_ok = ratio >= 0.40 && ratio <= 0.60;
  bool pass = theta_ok && ratio_ok && cov_gap <= 0.12;
  report(7, label, pass,
         "median-gap ratio n=500 to n=2000 " + fmt(ratio, 3) + " (band [0.40, 0.60]), sandwich gap " +
             fmt(100 * cov_gap, 3) + "% (cap 12%), projection (" + fmt(theta[0], 5) + ", " +
             fmt(theta[1], 6) + ")");
}

void crit8_cox() {
  const std::string label = "partial likelihood vs averaged curvature";
  ScenarioConfig c;
  c.model = ModelTag::Cox;
  c.design.menu = "binary";
  c.design.covariates = 1;
  c.design.intercept = false;
  c.beta0 = VectorXd::Constant(1, 0.5);
  c.censor_target = 0.3;
  c.n = 1000;
  c.R = 1000;
  c.base_seed = 9008;

  auto rep = argmin::run_scenario(c);
  double emp = rep.emp_cov(0, 0);
  double theory = rep.theory_cov(0, 0);
  double gap = std::abs(emp / theory - 1.0);
  bool pass = gap <= 0.15 && rep.theory_provenance == "averaged observed information inverse";
  report(8, label, pass,
         "emp " + fmt(emp) + " vs averaged-curvature inverse " + fmt(theory) + " (gap " +
             fmt(100 * gap, 3) + "%, cap 15%), " + std::to_string(rep.succeeded) + "/" +
             std::to_string(c.R) + " fits");
}

void crit9_hazard_poisson() {
  const std::string label = "hazard and count normalised identity";
  ScenarioConfig h;
  h.model = ModelTag::ExpHazard;
  h.design.menu = "binary";
  h.design.covariates = 1;
  h.design.intercept = true;
  h.beta0 = VectorXd(2);
  h.beta0 << -0.2, 0.5;
  h.n = 1000;
  h.R = 1000;
  h.base_seed = 90091;
  h.normalization = argmin::Normalization::PerRepInformation;
  auto hrep = argmin::run_scenario(h);
  double hgap = rel_frob(hrep.emp_cov, MatrixXd::Identity(2, 2));

  ScenarioConfig p;
  p.model = ModelTag::Poisson;
  p.design.menu = "uniform";
  p.design.covariates = 1;
  p.design.intercept = true;
  p.beta0 = VectorXd(2);
  p.beta0 << 0.3, 0.6;
  p.n = 1000;
  p.R = 1000;
  p.base_seed = 90092;
  p.normalization = argmin::Normalization::PerRepInformation;
  auto prep = argmin::run_scenario(p);
  double pgap = rel_frob(prep.emp_cov, MatrixXd::Identity(2, 2));

  bool pass = hgap <= 0.12 && pgap <= 0.12;
  report(9, label, pass,
         "hazard gap " + fmt(100 * hgap, 3) + "%, count gap " + fmt(100 * pgap, 3) +
             "% (caps 12%)");
}

void crit10_markov() {
  const std::string label = "neighbour coupling vs averaged curvature";
  ScenarioConfig c;
  c.model = ModelTag::MarkovPl;
  c.markov_k = 2;
  c.beta0 = VectorXd::Constant(1, 0.5);
  c.n = 2000;
  c.R = 1000;
  c.base_seed = 9010;

  auto rep = argmin::run_scenario(c);
  double emp = rep.emp_cov(0, 0);
  double theory = rep.theory_cov(0, 0);
  double ratio = emp / theory;
  bool pass = std::abs(ratio - 1.0) <= 0.15;
  report(10, label, pass,
         "emp " + fmt(emp) + " vs averaged-curvature inverse " + fmt(theory) + " (ratio " +
             fmt(ratio, 3) + ", cap 1.15); neighbour-site scores are serially correlated, so "
             "the limit variance carries a long-run middle term that the curvature-only "
             "reference omits");
}

void crit11_bayes() {
  const std::string label = "posterior-mean versus median gap decay";
  auto rep = argmin::bayes_equivalence_check({100, 400, 1600}, 200, 9011);
  bool strict = rep.median_gap.size() == 3 && rep.median_gap[0] > rep.median_gap[1] &&
                rep.median_gap[1] > rep.median_gap[2];
  bool pass = rep.decreasing && strict;
  report(11, label, pass,
         "median sqrt(n)|mean - median| = " + fmt(rep.median_gap[0], 4) + ", " +
             fmt(rep.median_gap[1], 4) + ", " + fmt(rep.median_gap[2], 4) +
             " over n = 100, 400, 1600 (must fall strictly)");
}

void crit12_properties() {
  const std::string label = "deterministic bound sweeps";
  long exp_viol = 0, lind_viol = 0, fd_viol = 0;

  // Exponential-tilt expansion: both remainder envelopes on wide random
  // instances (weights span six decades, offsets +-3, |t| up to 2).
  for (long i = 0; i < 10000; ++i) {
    Rng rng(argmin::mix_seed(12001, (std::uint64_t)i));
    int m = 2 + int(rng.below(7));
    VectorXd w(m), a(m);
    for (int d = 0; d < m; ++d) {
      w[d] = std::pow(10.0, rng.uniform(-3.0, 3.0));
      a[d] = rng.uniform(-3.0, 3.0);
    }
    double t = rng.uniform(-2.0, 2.0);
    auto rep = argmin::logsumexp_expand(w, a, t);
    double slack = 1e-12 * (1.0 + std::abs(rep.K0) + std::abs(rep.Kt));
    bool ok = rep.bounds_hold && std::abs(rep.remainder) <= rep.bound_cubic + slack &&
              std::abs(rep.remainder) <= rep.bound_tight + slack;
    if (!ok) ++exp_viol;
  }

  // Bernoulli truncation sandwich: half the doubled-threshold sum below the
  // exact tail sum below the plain sum, on every grid point.
  VectorXd grid = argmin::default_delta_grid();
  VectorXd grid2 = 2.0 * grid;
  for (long i = 0; i < 10000; ++i) {
    Rng rng(argmin::mix_seed(12002, (std::uint64_t)i));
    long n = 20 + long(rng.below(181));
    VectorXd z(n), q(n);
    for (long d = 0; d < n; ++d) {
      z[d] = rng.normal();
      q[d] = rng.uniform(0.02, 0.98);
    }
    auto r1 = argmin::bernoulli_lindeberg(z, q, grid);
    auto r2 = argmin::bernoulli_lindeberg(z, q, grid2);
    bool ok = r1.sandwich_ok;
    for (int g = 0; g < grid.size() && ok; ++g) {
      double slack = 1e-12 * (1.0 + r1.N[g]);
      ok = 0.5 * r2.N[g] <= r1.L[g] + slack && r1.L[g] <= r1.N[g] + slack;
    }
    if (!ok) ++lind_viol;
  }

  // Minimiser nearness: natural and amplified perturbations; the amplified
  // batch must actually produce far minimisers or the sweep proves nothing.
  argmin::CorollaryOptions copt;
  copt.instances = 10000;
  copt.seed = 12003;
  copt.magnitude = 1.0;
  auto cor_a = argmin::basic_corollary_check(copt);
  copt.seed = 12004;
  copt.magnitude = 50.0;
  auto cor_b = argmin::basic_corollary_check(copt);
  long cor_viol = cor_a.violations + cor_b.violations;
  bool cor_informative = cor_b.dist_exceeded > 0;

  // Derivative formulas against central differences, 1e-5 relative.
  for (long i = 0; i < 1000; ++i) {
    Rng rng(argmin::mix_seed(12005, (std::uint64_t)i));
    int m = 2 + int(rng.below(7));
    VectorXd w(m), a(m);
    for (int d = 0; d < m; ++d) {
      w[d] = std::pow(10.0, rng.uniform(-2.0, 2.0));
      a[d] = rng.uniform(-3.0, 3.0);
    }
    double t = rng.uniform(-1.5, 1.5);
    const double h = 1e-4;
    auto at = [&](double s) { return argmin::logsumexp_derivatives(w, a, s); };
    auto mid = at(t);
    auto lo = at(t - h);
    auto hi = at(t + h);
    double fd1 = (hi.K - lo.K) / (2 * h);
    double fd2 = (hi.K1 - lo.K1) / (2 * h);
    double fd3 = (hi.K2 - lo.K2) / (2 * h);
    if (std::abs(fd1 - mid.K1) > 1e-5 * (1.0 + std::abs(mid.K1))) ++fd_viol;
    if (std::abs(fd2 - mid.K2) > 1e-5 * (1.0 + std::abs(mid.K2))) ++fd_viol;
    if (std::abs(fd3 - mid.K3) > 1e-5 * (1.0 + std::abs(mid.K3))) ++fd_viol;
  }

  // Analytic gradients and curvatures of every smooth criterion builder
  // against central differences of the level below.
  auto fd_check = [&](const argmin::ConvexObjective& obj, const VectorXd& beta) {
    if (!obj.grad) return;
    int p = int(beta.size());
    VectorXd g = obj.grad(beta);
    for (int j = 0; j < p; ++j) {
      double h = 1e-6 * (1.0 + std::abs(beta[j]));
      VectorXd bp = beta, bm = beta;
      bp[j] += h;
      bm[j] -= h;
      double fd = (obj.value(bp) - obj.value(bm)) / (2 * h);
      if (std::abs(fd - g[j]) > 1e-5 * (1.0 + std::abs(g[j]))) ++fd_viol;
    }
    if (!obj.hess) return;
    MatrixXd H = obj.hess(beta);
    for (int j = 0; j < p; ++j) {
      double h = 1e-6 * (1.0 + std::abs(beta[j]));
      VectorXd bp = beta, bm = beta;
      bp[j] += h;
      bm[j] -= h;
      VectorXd fd = (obj.grad(bp) - obj.grad(bm)) / (2 * h);
      for (int k = 0; k < p; ++k)
        if (std::abs(fd[k] - H(k, j)) > 1e-5 * (1.0 + std::abs(H(k, j)))) ++fd_viol;
    }
  };

  for (int inst = 0; inst < 10; ++inst) {
    Rng rng(argmin::mix_seed(12006, (std::uint64_t)inst));
    long n = 25;
    MatrixXd X(n, 2);
    VectorXd yc(n), yb(n), yp(n), times(n);
    VectorXi ev(n);
    for (long i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = rng.uniform(-1.5, 1.5);
      double eta = 0.2 + 0.6 * X(i, 1);
      yc[i] = eta + rng.normal();
      yb[i] = rng.bernoulli(argmin::logistic(eta)) ? 1.0 : 0.0;
      yp[i] = double(rng.poisson(std::exp(eta)));
      times[i] = rng.exponential(std::exp(0.4 * X(i, 1))) + 0.01;
      ev[i] = rng.bernoulli(0.85) ? 1 : 0;
    }
    ev[0] = 1;
    VectorXd yloc = yc;

    std::vector<int> path(60);
    int state = 1;
    for (int i = 0; i < 60; ++i) {
      if (rng.bernoulli(0.4)) state = 1 + int(rng.below(2));
      path[i] = state;
    }

    VectorXd b2(2), b1(1);
    b2 << rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6);
    b1 << rng.uniform(-0.6, 0.6);
    VectorXd z1 = X.col(1);
    MatrixXd Z1 = z1;

    fd_check(argmin::l_alpha_objective(yloc, 2.5), VectorXd::Constant(1, rng.uniform(-0.5, 0.5)));
    fd_check(argmin::ols_objective(X, yc), b2);
    fd_check(argmin::logistic_objective(X, yb), b2);
    fd_check(argmin::poisson_objective(X, yp), b2);
    fd_check(argmin::cox_objective(Dataset::survival(Z1, times, ev)), b1);
    fd_check(argmin::exp_hazard_objective(Dataset::survival(Z1, times, ev), nullptr, 0.0), b1);
    fd_check(argmin::markov_objective(Dataset::markov(path, 2),
                                      argmin::MarkovCoupling::neighbor_agreement()),
             b1);
  }

  bool pass = exp_viol == 0 && lind_viol == 0 && cor_viol == 0 && cor_informative && fd_viol == 0;
  report(12, label, pass,
         "expansion 0/" + std::to_string(exp_viol) + " of 10000, truncation sandwich 0/" +
             std::to_string(lind_viol) + " of 10000, nearness 0/" + std::to_string(cor_viol) +
             " of 20000 (" + std::to_string(cor_b.dist_exceeded) +
             " far minimisers probed), derivative checks 0/" + std::to_string(fd_viol) +
             " mismatches");
}

void crit13_grid_oracles() {
  const std::string label = "every fit matches its exhaustive scan";
  int instances = 0, failures = 0;
  double worst = 0.0;
  auto tally = [&](double dev, double cap) {
    ++instances;
    worst = std::max(worst, dev);
    if (!(dev <= cap)) ++failures;
  };

  // Sample quantiles: value optimality plus the midpoint tie rule.
  for (int inst = 0; inst < 8; ++inst) {
    Rng rng(argmin::mix_seed(13001, (std::uint64_t)inst));
    long n = 5 + long(rng.below(21));
    VectorXd y(n);
    for (long i = 0; i < n; ++i) y[i] = rng.uniform(-4.0, 4.0);
    double p = rng.uniform(0.1, 0.9);
    double fit = argmin::fit_quantile(y, p).beta[0];
    auto [lo, hi] = argmin::quantile_interval(y, p);
    auto obj = argmin::quantile_objective(y, p);
    auto val = [&](double s) { return obj.value(VectorXd::Constant(1, s)); };
    double scan = grid_zoom_1d(val, fit, (y.maxCoeff() - y.minCoeff()) / 2.0 + 1.0, 2);
    double value_gap = val(fit) - val(scan);
    bool mid_ok = std::abs(fit - 0.5 * (lo + hi)) <= 1e-12 * (1.0 + std::abs(fit));
    bool contained = fit >= lo - 1e-4 && fit <= hi + 1e-4;
    tally(std::max(value_gap, mid_ok && contained ? 0.0 : 1.0), 1e-9 * (1.0 + std::abs(val(fit))));
  }

  // Power criterion, three exponents.
  {
    int inst = 0;
    for (double alpha : {1.2, 1.5, 3.0}) {
      for (int rep = 0; rep < 2; ++rep, ++inst) {
        Rng rng(argmin::mix_seed(13002, (std::uint64_t)inst));
        long n = 6 + long(rng.below(20));
        VectorXd y(n);
        for (long i = 0; i < n; ++i) y[i] = rng.uniform(-3.0, 3.0);
        double fit = argmin::fit_l_alpha(y, alpha).beta[0];
        auto obj = argmin::l_alpha_objective(y, alpha);
        double scan = grid_zoom_1d(
            [&](double s) { return obj.value(VectorXd::Constant(1, s)); }, fit, 4.0);
        tally(std::abs(fit - scan), 1e-4);
      }
    }
  }

  // Two-parameter regressions against the zooming rectangle scan.
  auto scan2 = [&](const argmin::ConvexObjective& obj, const VectorXd& fit, VectorXd radius) {
    return grid_zoom_2d([&](const VectorXd& b) { return obj.value(b); }, fit, radius);
  };
  for (int inst = 0; inst < 4; ++inst) {
    Rng rng(argmin::mix_seed(13003, (std::uint64_t)inst));
    long n = 20;
    MatrixXd X(n, 2);
    VectorXd y(n);
    for (long i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = rng.uniform(-2.0, 2.0);
      y[i] = 0.4 + 0.7 * X(i, 1) + rng.normal();
    }
    VectorXd fit = argmin::fit_ols(X, y).beta;
    VectorXd scan = scan2(argmin::ols_objective(X, y), fit, VectorXd::Constant(2, 4.0));
    tally((fit - scan).cwiseAbs().maxCoeff(), 1e-4);

    VectorXd fit_l = argmin::fit_lad(X, y).beta;
    VectorXd scan_l = scan2(argmin::lad_objective(X, y), fit_l, VectorXd::Constant(2, 4.0));
    tally((fit_l - scan_l).cwiseAbs().maxCoeff(), 1e-4);
  }
  for (int inst = 0; inst < 4; ++inst) {
    Rng rng(argmin::mix_seed(13004, (std::uint64_t)inst));
    long n = 30;
    MatrixXd X(n, 2);
    VectorXd yb(n), yp(n);
    for (long i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = rng.uniform(-2.0, 2.0);
      double eta = 0.3 + 0.8 * X(i, 1);
      yb[i] = rng.bernoulli(argmin::logistic(eta)) ? 1.0 : 0.0;
      yp[i] = double(rng.poisson(std::exp(0.4 + 0.5 * X(i, 1))));
    }
    VectorXd fit_b = argmin::fit_logistic(X, yb).beta;
    VectorXd scan_b = scan2(argmin::logistic_objective(X, yb), fit_b, VectorXd::Constant(2, 4.0));
    tally((fit_b - scan_b).cwiseAbs().maxCoeff(), 1e-4);

    VectorXd fit_p = argmin::fit_poisson(X, yp).beta;
    VectorXd scan_p = scan2(argmin::poisson_objective(X, yp), fit_p, VectorXd::Constant(2, 4.0));
    tally((fit_p - scan_p).cwiseAbs().maxCoeff(), 1e-4);
  }

  // Survival fits, one covariate.
  for (int inst = 0; inst < 4; ++inst) {
    Rng rng(argmin::mix_seed(13005, (std::uint64_t)inst));
    long n = 12;
    MatrixXd Z(n, 1);
    VectorXd times(n);
    VectorXi ev(n);
    for (long i = 0; i < n; ++i) {
      Z(i, 0) = rng.uniform(-1.0, 1.0);
      times[i] = rng.exponential(std::exp(0.5 * Z(i, 0))) + 0.02;
      ev[i] = rng.bernoulli(0.8) ? 1 : 0;
    }
    ev[0] = ev[1] = 1;
    auto data = Dataset::survival(Z, times, ev);

    double fit_c = argmin::fit_cox(data).beta[0];
    auto cox = argmin::cox_objective(data);
    double scan_c = grid_zoom_1d(
        [&](double b) { return cox.value(VectorXd::Constant(1, b)); }, fit_c, 5.0);
    tally(std::abs(fit_c - scan_c), 1e-4);

    double fit_h = argmin::fit_exp_hazard(data).beta[0];
    auto haz = argmin::exp_hazard_objective(data, nullptr, 0.0);
    double scan_h = grid_zoom_1d(
        [&](double b) { return haz.value(VectorXd::Constant(1, b)); }, fit_h, 5.0);
    tally(std::abs(fit_h - scan_h), 1e-4);
  }

  // Location-scale likelihood over a positive-tau rectangle.
  for (int inst = 0; inst < 4; ++inst) {
    Rng rng(argmin::mix_seed(13006, (std::uint64_t)inst));
    long n = 15;
    VectorXd y(n);
    for (long i = 0; i < n; ++i) y[i] = 0.4 + 1.3 * rng.normal();
    auto fit = argmin::fit_double_exponential(y);
    auto nll = [&](const VectorXd& b) {
      if (b[1] <= 1e-8) return std::numeric_limits<double>::infinity();
      double s = 0.0;
      for (long i = 0; i < n; ++i) s += std::abs(y[i] - b[0]);
      return double(n) * std::log(2.0 * b[1]) + s / b[1];
    };
    VectorXd center(2);
    center << fit.mu, fit.tau;
    VectorXd radius(2);
    radius << 1.0, std::min(0.9 * fit.tau, 1.0);
    VectorXd scan = grid_zoom_2d(nll, center, radius);
    tally((center - scan).cwiseAbs().maxCoeff(), 1e-4);
  }

  // Neighbour-coupling paths.  The argmin sits at a moderate coupling only
  // when enough sites score strictly below their site-wise maximum coupling
  // (frustrated) and enough score strictly above their minimum (conforming);
  // otherwise it drifts onto an exponentially flat tail where comparing
  // locations is meaningless.  Redraw until both counts reach four.
  for (int inst = 0; inst < 4; ++inst) {
    std::vector<int> path(25);
    for (int attempt = 0;; ++attempt) {
      Rng rng(argmin::mix_seed(13007, (std::uint64_t)(inst * 97 + attempt)));
      int state = 1;
      for (int i = 0; i < 25; ++i) {
        if (rng.bernoulli(0.4)) state = 1 + int(rng.below(2));
        path[i] = state;
      }
      int frustrated = 0, conforming = 0;
      for (int i = 0; i < 25; ++i) {
        double h[2];
        for (int s = 1; s <= 2; ++s) {
          double v = 0.0;
          if (i > 0 && s == path[i - 1]) v += 1.0;
          if (i + 1 < 25 && s == path[i + 1]) v += 1.0;
          h[s - 1] = v;
        }
        double hobs = h[path[i] - 1];
        if (hobs < std::max(h[0], h[1])) ++frustrated;
        if (hobs > std::min(h[0], h[1])) ++conforming;
      }
      if (frustrated >= 4 && conforming >= 4) break;
    }
    auto data = Dataset::markov(path, 2);
    double fit = argmin::fit_markov_pl(data).beta[0];
    auto obj = argmin::markov_objective(data, argmin::MarkovCoupling::neighbor_agreement());
    double scan = grid_zoom_1d(
        [&](double b) { return obj.value(VectorXd::Constant(1, b)); }, fit, 4.0);
    tally(std::abs(fit - scan), 1e-4);
  }

  bool pass = failures == 0;
  report(13, label, pass,
         std::to_string(instances) + " instances, " + std::to_string(failures) +
             " beyond tolerance, worst deviation " + fmt(worst, 3));
}

}  // namespace

int main() {
  guarded(1, "median limit variance pi/2", crit1_median);
  guarded(2, "quantile triple covariance", crit2_quantile_process);
  guarded(3, "power criterion variance vs quadrature", crit3_l_alpha);
  guarded(4, "model-free least squares sandwich", crit4_agnostic_ols);
  guarded(5, "absolute-deviation regression variance", crit5_lad);
  guarded(6, "logistic curvature-normalised identity", crit6_logistic_identity);
  guarded(7, "misspecified logistic projection", crit7_misspecified_logistic);
  guarded(8, "partial likelihood vs averaged curvature", crit8_cox);
  guarded(9, "hazard and count normalised identity", crit9_hazard_poisson);
  guarded(10, "neighbour coupling vs averaged curvature", crit10_markov);
  guarded(11, "posterior-mean versus median gap decay", crit11_bayes);
  guarded(12, "deterministic bound sweeps", crit12_properties);
  guarded(13, "every fit matches its exhaustive scan", crit13_grid_oracles);

  std::printf("%d of 13 criteria passed\n", 13 - g_failed);
  return g_failed == 0 ? 0 : 1;
}
