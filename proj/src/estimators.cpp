#include "argmin/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "argmin/math.hpp"

namespace argmin {

namespace {

double auto_tol(const ConvexObjective& obj, const VectorXd& start) {
  VectorXd g = obj.grad(start);
  return 1e-8 * std::max(1.0, g.norm());
}

void require_full_rank(const MatrixXd& X, const char* what) {
  if (X.cols() == 0) throw RankDeficient(std::string(what) + ": design has no columns");
  Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
  if (qr.rank() < X.cols())
    throw RankDeficient(std::string(what) + ": design rank " + std::to_string(qr.rank()) +
                        " below column count " + std::to_string(X.cols()));
}

}  // namespace

// ---------------------------------------------------------------------------
// quantile / L_alpha location fits

ConvexObjective quantile_objective(const VectorXd& y, double p) {
  if (y.size() == 0) throw EmptyData("quantile objective needs observations");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level outside (0,1)");
  ConvexObjective o;
  o.dim = 1;
  VectorXd yc = y;
  o.value = [yc, p](const VectorXd& b) {
    double t = b[0], s = 0.0;
    for (long i = 0; i < yc.size(); ++i) {
      double yi = yc[i];
      s += p * (std::max(yi - t, 0.0) - std::max(yi, 0.0)) +
           (1.0 - p) * (std::max(t - yi, 0.0) - std::max(-yi, 0.0));
    }
    return s;
  };
  o.smoothness = Smoothness::NonSmooth;
  o.breakpoints.assign(yc.data(), yc.data() + yc.size());
  return o;
}

std::pair<double, double> quantile_interval(const VectorXd& y, double p) {
  if (y.size() == 0) throw EmptyData("quantile of an empty sample");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level outside (0,1)");
  std::vector<double> s(y.data(), y.data() + y.size());
  std::sort(s.begin(), s.end());
  long n = static_cast<long>(s.size());
  double m = p * n;
  long m_int = std::llround(m);
  if (std::abs(m - m_int) <= 1e-9 * n && m_int >= 1 && m_int <= n - 1) {
    // Criterion is flat between consecutive order statistics.
    return {s[m_int - 1], s[m_int]};
  }
  long idx = static_cast<long>(std::ceil(m));
  idx = std::min(std::max(idx, 1L), n);
  return {s[idx - 1], s[idx - 1]};
}

FitResult fit_quantile(const VectorXd& y, double p) {
  auto [lo, hi] = quantile_interval(y, p);
  FitResult r;
  r.model = ModelTag::Quantile;
  r.beta = VectorXd::Constant(1, 0.5 * (lo + hi));
  r.report.argmin = r.beta;
  r.report.value = quantile_objective(y, p).value(r.beta);
  r.report.certificate_norm = 0.0;
  r.report.iterations = 0;
  r.report.converged = true;
  return r;
}

ConvexObjective l_alpha_objective(const VectorXd& y, double alpha) {
  if (y.size() == 0) throw EmptyData("L_alpha objective needs observations");
  if (!(alpha >= 1.0)) throw std::invalid_argument("L_alpha needs alpha >= 1");
  if (alpha == 1.0) return quantile_objective(y, 0.5);
  ConvexObjective o;
  o.dim = 1;
  VectorXd yc = y;
  o.value = [yc, alpha](const VectorXd& b) {
    double t = b[0], s = 0.0;
    for (long i = 0; i < yc.size(); ++i) s += std::pow(std::abs(yc[i] - t), alpha);
    return s;
  };
  o.grad = [yc, alpha](const VectorXd& b) {
    double t = b[0], s = 0.0;
    for (long i = 0; i < yc.size(); ++i) {
      double r = t - yc[i];
      if (r != 0.0) s += alpha * std::copysign(std::pow(std::abs(r), alpha - 1.0), r);
    }
    return VectorXd::Constant(1, s);
  };
  if (alpha >= 2.0) {
    // Second derivative blows up at data points for alpha < 2, so only the
    // alpha >= 2 branch advertises one.
    o.hess = [yc, alpha](const VectorXd& b) {
      double t = b[0], s = 0.0;
      for (long i = 0; i < yc.size(); ++i)
        s += alpha * (alpha - 1.0) * std::pow(std::abs(yc[i] - t), alpha - 2.0);
      return MatrixXd::Constant(1, 1, s);
    };
    o.smoothness = Smoothness::TwiceDifferentiable;
  } else {
    o.smoothness = Smoothness::OnceDifferentiable;
  }
  return o;
}

FitResult fit_l_alpha(const VectorXd& y, double alpha) {
  if (y.size() == 0) throw EmptyData("L_alpha fit needs observations");
  if (!(alpha >= 1.0)) throw std::invalid_argument("L_alpha needs alpha >= 1");
  FitResult r;
  r.model = ModelTag::LAlpha;
  if (alpha == 1.0) {
    FitResult q = fit_quantile(y, 0.5);
    r.beta = q.beta;
    r.report = q.report;
    return r;
  }
  ConvexObjective obj = l_alpha_objective(y, alpha);
  VectorXd start = VectorXd::Zero(1);
  r.report = solve_smooth(obj, start, auto_tol(obj, start));
  r.beta = r.report.argmin;
  return r;
}

// ---------------------------------------------------------------------------
// least squares / least absolute deviation regression

ConvexObjective ols_objective(const MatrixXd& X, const VectorXd& y) {
  if (y.size() == 0) throw EmptyData("least-squares objective needs observations");
  ConvexObjective o;
  o.dim = static_cast<int>(X.cols());
  MatrixXd Xc = X;
  VectorXd yc = y;
  o.value = [Xc, yc](const VectorXd& b) { return 0.5 * (yc - Xc * b).squaredNorm(); };
  o.grad = [Xc, yc](const VectorXd& b) { return VectorXd(Xc.transpose() * (Xc * b - yc)); };
  o.hess = [Xc](const VectorXd&) { return MatrixXd(Xc.transpose() * Xc); };
  o.smoothness = Smoothness::TwiceDifferentiable;
  return o;
}

FitResult fit_ols(const MatrixXd& X, const VectorXd& y) {
  if (y.size() == 0) throw EmptyData("least-squares fit needs observations");
  require_full_rank(X, "least squares");
  ConvexObjective obj = ols_objective(X, y);
  VectorXd start = VectorXd::Zero(X.cols());
  FitResult r;
  r.model = ModelTag::Ols;
  r.report = solve_smooth(obj, start, auto_tol(obj, start));
  r.beta = r.report.argmin;
  return r;
}

ConvexObjective lad_objective(const MatrixXd& X, const VectorXd& y) {
  if (y.size() == 0) throw EmptyData("absolute-deviation objective needs observations");
  ConvexObjective o;
  o.dim = static_cast<int>(X.cols());
  MatrixXd Xc = X;
  VectorXd yc = y;
  o.value = [Xc, yc](const VectorXd& b) { return (yc - Xc * b).cwiseAbs().sum(); };
  o.smoothness = Smoothness::NonSmooth;
  if (X.cols() == 1) {
    for (long i = 0; i < y.size(); ++i)
      if (X(i, 0) != 0.0) o.breakpoints.push_back(y[i] / X(i, 0));
  }
  // Smoothed surrogate sum sqrt(r^2 + eps^2); its Hessian stays positive
  // definite for full-rank designs all the way down the homotopy.
  o.smoothed = [Xc, yc](double eps) {
    ConvexObjective s;
    s.dim = static_cast<int>(Xc.cols());
    double e2 = eps * eps;
    s.value = [Xc, yc, e2](const VectorXd& b) {
      VectorXd r = yc - Xc * b;
      double v = 0.0;
      for (long i = 0; i < r.size(); ++i) v += std::sqrt(r[i] * r[i] + e2);
      return v;
    };
    s.grad = [Xc, yc, e2](const VectorXd& b) {
      VectorXd r = yc - Xc * b;
      VectorXd w(r.size());
      for (long i = 0; i < r.size(); ++i) w[i] = -r[i] / std::sqrt(r[i] * r[i] + e2);
      return VectorXd(Xc.transpose() * w);
    };
    s.hess = [Xc, yc, e2](const VectorXd& b) {
      VectorXd r = yc - Xc * b;
      VectorXd w(r.size());
      for (long i = 0; i < r.size(); ++i) {
        double d = std::sqrt(r[i] * r[i] + e2);
        w[i] = e2 / (d * d * d);
      }
      return MatrixXd(Xc.transpose() * w.asDiagonal() * Xc);
    };
    s.smoothness = Smoothness::TwiceDifferentiable;
    return s;
  };
  // Distance from zero to the subdifferential: residuals at (numerical) zero
  // contribute a box of coefficients, resolved by projected least squares.
  o.certificate = [Xc, yc](const VectorXd& b) {
    VectorXd r = yc - Xc * b;
    double act = 1e-6 * (1.0 + yc.cwiseAbs().maxCoeff());
    VectorXd g0 = VectorXd::Zero(Xc.cols());
    std::vector<long> active;
    for (long i = 0; i < r.size(); ++i) {
      if (std::abs(r[i]) <= act)
        active.push_back(i);
      else
        g0 -= std::copysign(1.0, r[i]) * Xc.row(i).transpose();
    }
    if (active.empty()) return g0.norm();
    MatrixXd A(Xc.cols(), active.size());
    for (size_t j = 0; j < active.size(); ++j) A.col(j) = Xc.row(active[j]).transpose();
    // Exact coordinate minimisation over the coefficient box.  The iterate
    // stays feasible, so the returned distance can only overestimate.
    VectorXd c = VectorXd::Zero(A.cols());
    VectorXd res = g0;
    for (int sweep = 0; sweep < 10000; ++sweep) {
      double moved = 0.0;
      for (long j = 0; j < A.cols(); ++j) {
        double ajj = A.col(j).squaredNorm();
        if (ajj <= 0.0) continue;
        double cand = std::clamp(c[j] + A.col(j).dot(res) / ajj, -1.0, 1.0);
        double step = cand - c[j];
        if (step != 0.0) {
          res -= step * A.col(j);
          c[j] = cand;
          moved = std::max(moved, std::abs(step) * std::sqrt(ajj));
        }
      }
      if (moved <= 1e-14 * (1.0 + g0.norm())) break;
    }
    return res.norm();
  };
  return o;
}

FitResult fit_lad(const MatrixXd& X, const VectorXd& y) {
  if (y.size() == 0) throw EmptyData("absolute-deviation fit needs observations");
  require_full_rank(X, "absolute deviation");
  ConvexObjective obj = lad_objective(X, y);
  double tol = 1e-6 * (1.0 + X.rowwise().norm().sum() / std::sqrt(double(y.size())));
  FitResult r;
  r.model = ModelTag::Lad;
  r.report = solve_nonsmooth(obj, VectorXd::Zero(X.cols()), tol);
  r.beta = r.report.argmin;
  return r;
}

// ---------------------------------------------------------------------------
// logistic and Poisson regression

ConvexObjective logistic_objective(const MatrixXd& X, const VectorXd& y) {
  if (y.size() == 0) throw EmptyData("logistic objective needs observations");
  ConvexObjective o;
  o.dim = static_cast<int>(X.cols());
  MatrixXd Xc = X;
  VectorXd yc = y;
  o.value = [Xc, yc](const VectorXd& b) {
    VectorXd eta = Xc * b;
    double s = 0.0;
    for (long i = 0; i < eta.size(); ++i) s += log1pexp(eta[i]) - yc[i] * eta[i];
    return s;
  };
  o.grad = [Xc, yc](const VectorXd& b) {
    VectorXd eta = Xc * b;
    VectorXd d(eta.size());
    for (long i = 0; i < eta.size(); ++i) d[i] = logistic(eta[i]) - yc[i];
    return VectorXd(Xc.transpose() * d);
  };
  o.hess = [Xc](const VectorXd& b) {
    VectorXd eta = Xc * b;
    VectorXd w(eta.size());
    for (long i = 0; i < eta.size(); ++i) {
      double q = logistic(eta[i]);
      w[i] = q * (1.0 - q);
    }
    return MatrixXd(Xc.transpose() * w.asDiagonal() * Xc);
  };
  o.smoothness = Smoothness::TwiceDifferentiable;
  return o;
}

FitResult fit_logistic(const MatrixXd& X, const VectorXd& y) {
  if (y.size() == 0) throw EmptyData("logistic fit needs observations");
  require_full_rank(X, "logistic");
  ConvexObjective obj = logistic_objective(X, y);
  VectorXd start = VectorXd::Zero(X.cols());
  FitResult r;
  r.model = ModelTag::Logistic;
  r.report = solve_smooth(obj, start, auto_tol(obj, start));
  r.beta = r.report.argmin;
  return r;
}

ConvexObjective poisson_objective(const MatrixXd& Z, const VectorXd& y) {
  if (y.size() == 0) throw EmptyData("Poisson objective needs observations");
  ConvexObjective o;
  o.dim = static_cast<int>(Z.cols());
  MatrixXd Zc = Z;
  VectorXd yc = y;
  o.value = [Zc, yc](const VectorXd& b) {
    VectorXd eta = Zc * b;
    double s = 0.0;
    for (long i = 0; i < eta.size(); ++i) s += std::exp(eta[i]) - yc[i] * eta[i];
    return s;
  };
  o.grad = [Zc, yc](const VectorXd& b) {
    VectorXd eta = Zc * b;
    VectorXd d(eta.size());
    for (long i = 0; i < eta.size(); ++i) d[i] = std::exp(eta[i]) - yc[i];
    return VectorXd(Zc.transpose() * d);
  };
  o.hess = [Zc](const VectorXd& b) {
    VectorXd eta = Zc * b;
    VectorXd w(eta.size());
    for (long i = 0; i < eta.size(); ++i) w[i] = std::exp(eta[i]);
    return MatrixXd(Zc.transpose() * w.asDiagonal() * Zc);
  };
  o.smoothness = Smoothness::TwiceDifferentiable;
  return o;
}

FitResult fit_poisson(const MatrixXd& Z, const VectorXd& y) {
  if (y.size() == 0) throw EmptyData("Poisson fit needs observations");
  require_full_rank(Z, "Poisson");
  ConvexObjective obj = poisson_objective(Z, y);
  VectorXd start = VectorXd::Zero(Z.cols());
  FitResult r;
  r.model = ModelTag::Poisson;
  r.report = solve_smooth(obj, start, auto_tol(obj, start));
  r.beta = r.report.argmin;
  return r;
}

// ---------------------------------------------------------------------------
// Cox partial likelihood

namespace {

// Subjects grouped by distinct time, descending, so one sweep accumulates
// every risk set.  Ties share the full at-risk denominator.
struct CoxLayout {
  std::vector<std::vector<long>> groups;  // indices, grouped by time desc
  long n_events = 0;
};

CoxLayout cox_layout(const Dataset& d) {
  CoxLayout lay;
  std::vector<long> order(d.time.size());
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(),
            [&](long a, long b) { return d.time[a] > d.time[b]; });
  for (long idx : order) {
    if (lay.groups.empty() || d.time[lay.groups.back().front()] != d.time[idx])
      lay.groups.emplace_back();
    lay.groups.back().push_back(idx);
    if (d.event[idx] == 1) ++lay.n_events;
  }
  return lay;
}

}  // namespace

ConvexObjective cox_objective(const Dataset& data) {
  data.validate();
  if (data.kind != ResponseKind::Survival)
    throw std::invalid_argument("cox objective needs survival data");
  ConvexObjective o;
  o.dim = static_cast<int>(data.X.cols());
  Dataset d = data;
  CoxLayout lay = cox_layout(d);
  int p = o.dim;

  // Negative log partial likelihood; eta shifted by its maximum before
  // exponentiating so risk-set sums cannot overflow.
  o.value = [d, lay](const VectorXd& b) {
    VectorXd eta = d.X * b;
    double m = eta.maxCoeff();
    double S0 = 0.0, f = 0.0;
    for (const auto& g : lay.groups) {
      for (long i : g) S0 += std::exp(eta[i] - m);
      for (long i : g)
        if (d.event[i] == 1) f -= eta[i] - (std::log(S0) + m);
    }
    return f;
  };
  o.grad = [d, lay, p](const VectorXd& b) {
    VectorXd eta = d.X * b;
    double m = eta.maxCoeff();
    double S0 = 0.0;
    VectorXd S1 = VectorXd::Zero(p), g = VectorXd::Zero(p);
    for (const auto& grp : lay.groups) {
      for (long i : grp) {
        double w = std::exp(eta[i] - m);
        S0 += w;
        S1 += w * d.X.row(i).transpose();
      }
      for (long i : grp)
        if (d.event[i] == 1) g -= d.X.row(i).transpose() - S1 / S0;
    }
    return g;
  };
  o.hess = [d, lay, p](const VectorXd& b) {
    VectorXd eta = d.X * b;
    double m = eta.maxCoeff();
    double S0 = 0.0;
    VectorXd S1 = VectorXd::Zero(p);
    MatrixXd S2 = MatrixXd::Zero(p, p), H = MatrixXd::Zero(p, p);
    for (const auto& grp : lay.groups) {
      for (long i : grp) {
        double w = std::exp(eta[i] - m);
        VectorXd z = d.X.row(i).transpose();
        S0 += w;
        S1 += w * z;
        S2 += w * z * z.transpose();
      }
      for (long i : grp)
        if (d.event[i] == 1) {
          VectorXd zb = S1 / S0;
          H += S2 / S0 - zb * zb.transpose();
        }
    }
    return H;
  };
  o.smoothness = Smoothness::TwiceDifferentiable;
  return o;
}

FitResult fit_cox(const Dataset& data) {
  data.validate();
  if (data.kind != ResponseKind::Survival)
    throw std::invalid_argument("cox fit needs survival data");
  if (data.event.sum() == 0) throw NoEvents("no observed failures in the sample");
  ConvexObjective obj = cox_objective(data);
  VectorXd start = VectorXd::Zero(data.X.cols());
  MatrixXd H0 = obj.hess(start);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(H0);
  if (es.eigenvalues().minCoeff() <= 1e-10 * std::max(1.0, H0.trace()))
    throw RankDeficient("partial likelihood information is singular at zero");
  FitResult r;
  r.model = ModelTag::Cox;
  r.report = solve_smooth(obj, start, auto_tol(obj, start));
  r.beta = r.report.argmin;
  return r;
}

// ---------------------------------------------------------------------------
// parametric exponential-form hazard

ConvexObjective exp_hazard_objective(const Dataset& data,
                                     const std::function<double(double)>& baseline,
                                     double horizon) {
  data.validate();
  if (data.kind != ResponseKind::Survival)
    throw std::invalid_argument("hazard objective needs survival data");
  double L = horizon > 0.0 ? horizon : data.time.maxCoeff();

  // Cumulative baseline at each truncated exit time, integrated once.
  long n = data.time.size();
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(),
            [&](long a, long b) { return data.time[a] < data.time[b]; });
  VectorXd exposure(n);
  VectorXd del(n);
  std::function<double(double)> lam = baseline;
  if (!lam) lam = [](double) { return 1.0; };
  double prev_t = 0.0, acc = 0.0;
  for (long idx : order) {
    double t = std::min(data.time[idx], L);
    acc += integrate(lam, prev_t, t, 1e-13);
    prev_t = t;
    exposure[idx] = acc;
    del[idx] = (data.event[idx] == 1 && data.time[idx] <= L) ? 1.0 : 0.0;
  }
  if (exposure.maxCoeff() <= 0.0) throw NoEvents("zero total exposure on [0, horizon]");

  ConvexObjective o;
  o.dim = static_cast<int>(data.X.cols());
  MatrixXd Z = data.X;
  o.value = [Z, exposure, del](const VectorXd& b) {
    VectorXd eta = Z * b;
    double s = 0.0;
    for (long i = 0; i < eta.size(); ++i)
      s += exposure[i] * std::exp(eta[i]) - del[i] * eta[i];
    return s;
  };
  o.grad = [Z, exposure, del](const VectorXd& b) {
    VectorXd eta = Z * b;
    VectorXd w(eta.size());
    for (long i = 0; i < eta.size(); ++i) w[i] = exposure[i] * std::exp(eta[i]) - del[i];
    return VectorXd(Z.transpose() * w);
  };
  o.hess = [Z, exposure](const VectorXd& b) {
    VectorXd eta = Z * b;
    VectorXd w(eta.size());
    for (long i = 0; i < eta.size(); ++i) w[i] = exposure[i] * std::exp(eta[i]);
    return MatrixXd(Z.transpose() * w.asDiagonal() * Z);
  };
  o.smoothness = Smoothness::TwiceDifferentiable;
  return o;
}

FitResult fit_exp_hazard(const Dataset& data,
                         const std::function<double(double)>& baseline,
                         double horizon) {
  require_full_rank(data.X, "hazard regression");
  ConvexObjective obj = exp_hazard_objective(data, baseline, horizon);
  VectorXd start = VectorXd::Zero(data.X.cols());
  FitResult r;
  r.model = ModelTag::ExpHazard;
  r.report = solve_smooth(obj, start, auto_tol(obj, start));
  r.beta = r.report.argmin;
  return r;
}

// ---------------------------------------------------------------------------
// double-exponential location-scale maximum likelihood

DoubleExpFit fit_double_exponential(const VectorXd& y) {
  if (y.size() < 2) throw EmptyData("need at least two observations");
  DoubleExpFit f;
  f.mu = fit_quantile(y, 0.5).beta[0];
  f.tau = (y.array() - f.mu).abs().mean();
  if (f.tau <= 0.0) throw DegenerateData("all observations equal; scale is zero");
  return f;
}

// ---------------------------------------------------------------------------
// Markov pseudo-likelihood

MarkovCoupling MarkovCoupling::neighbor_agreement() {
  MarkovCoupling c;
  c.H = [](int j, int left, int right, bool has_left, bool has_right) {
    double h = 0.0;
    if (has_left && j == left) h += 1.0;
    if (has_right && j == right) h += 1.0;
    return h;
  };
  return c;
}

ConvexObjective markov_objective(const Dataset& data, const MarkovCoupling& coupling) {
  data.validate();
  if (data.kind != ResponseKind::MarkovPath)
    throw std::invalid_argument("pseudo-likelihood objective needs a path");
  long m = static_cast<long>(data.path.size());
  if (m < 3) throw PathTooShort("need a path of length at least 3");
  int k = data.k;

  // Coupling scores per site: the observed one and the k candidates.
  MatrixXd hall(m, k);
  VectorXd obs(m);
  for (long i = 0; i < m; ++i) {
    bool hl = i > 0, hr = i + 1 < m;
    int left = hl ? data.path[i - 1] : 0;
    int right = hr ? data.path[i + 1] : 0;
    for (int j = 1; j <= k; ++j) hall(i, j - 1) = coupling.H(j, left, right, hl, hr);
    obs[i] = hall(i, data.path[i] - 1);
  }

  ConvexObjective o;
  o.dim = 1;
  o.value = [hall, obs, k](const VectorXd& b) {
    double beta = b[0], f = 0.0;
    for (long i = 0; i < obs.size(); ++i) {
      double mx = -1e300;
      for (int j = 0; j < k; ++j) mx = std::max(mx, beta * hall(i, j));
      double z = 0.0;
      for (int j = 0; j < k; ++j) z += std::exp(beta * hall(i, j) - mx);
      f += mx + std::log(z) - beta * obs[i];
    }
    return f;
  };
  o.grad = [hall, obs, k](const VectorXd& b) {
    double beta = b[0], g = 0.0;
    for (long i = 0; i < obs.size(); ++i) {
      double mx = -1e300;
      for (int j = 0; j < k; ++j) mx = std::max(mx, beta * hall(i, j));
      double z = 0.0, zh = 0.0;
      for (int j = 0; j < k; ++j) {
        double w = std::exp(beta * hall(i, j) - mx);
        z += w;
        zh += w * hall(i, j);
      }
      g += zh / z - obs[i];
    }
    return VectorXd::Constant(1, g);
  };
  o.hess = [hall, obs, k](const VectorXd& b) {
    double beta = b[0], v = 0.0;
    for (long i = 0; i < obs.size(); ++i) {
      double mx = -1e300;
      for (int j = 0; j < k; ++j) mx = std::max(mx, beta * hall(i, j));
      double z = 0.0, zh = 0.0, zh2 = 0.0;
      for (int j = 0; j < k; ++j) {
        double w = std::exp(beta * hall(i, j) - mx);
        z += w;
        zh += w * hall(i, j);
        zh2 += w * hall(i, j) * hall(i, j);
      }
      double mean = zh / z;
      v += zh2 / z - mean * mean;
    }
    return MatrixXd::Constant(1, 1, v);
  };
  o.smoothness = Smoothness::TwiceDifferentiable;
  return o;
}

FitResult fit_markov_pl(const Dataset& data, const MarkovCoupling& coupling) {
  ConvexObjective obj = markov_objective(data, coupling);
  VectorXd start = VectorXd::Zero(1);
  FitResult r;
  r.model = ModelTag::MarkovPl;
  r.report = solve_smooth(obj, start, auto_tol(obj, start));
  r.beta = r.report.argmin;
  return r;
}

// ---------------------------------------------------------------------------
// posterior mean for the 1-D double-exponential location model

namespace {

struct AbsSum {
  std::vector<double> ys;
  std::vector<double> prefix;
  double total = 0.0;

  explicit AbsSum(const VectorXd& y) : ys(y.data(), y.data() + y.size()) {
    std::sort(ys.begin(), ys.end());
    prefix.resize(ys.size() + 1, 0.0);
    for (size_t i = 0; i < ys.size(); ++i) prefix[i + 1] = prefix[i] + ys[i];
    total = prefix.back();
  }

  double operator()(double t) const {
    size_t idx = std::upper_bound(ys.begin(), ys.end(), t) - ys.begin();
    double below = t * idx - prefix[idx];
    double above = (total - prefix[idx]) - t * (ys.size() - idx);
    return below + above;
  }
};

}  // namespace

PosteriorMeanReport posterior_mean_1d(const VectorXd& y,
                                      const std::function<double(double)>& prior,
                                      double C1, double C2) {
  if (y.size() == 0) throw EmptyData("posterior mean of an empty sample");
  if (!(C1 > 0.0)) throw std::invalid_argument("prior envelope C1 must be positive");
  auto pi = prior ? prior : [](double) { return 1.0; };
  long n = y.size();
  if (C2 >= static_cast<double>(n))
    throw QuadratureFailure("prior tail growth C2 >= n; posterior tails not integrable");

  AbsSum S(y);
  double theta_hat = fit_quantile(y, 0.5).beta[0];
  double S0 = S(theta_hat);
  auto w = [&](double t) {
    double pv = pi(t);
    if (!(pv >= 0.0)) throw std::invalid_argument("prior must be nonnegative");
    return std::exp(-(S(t) - S0)) * pv;
  };

  double half = 20.0 / std::sqrt(static_cast<double>(n));
  double lo = theta_hat - half, hi = theta_hat + half;
  double peak = std::max(w(theta_hat), 1e-300);

  // Extend each side until the bounded-decay tail estimate is negligible.
  auto extend = [&](double& edge, double sign) {
    for (int round = 0;; ++round) {
      if (round > 60 || std::abs(edge - theta_hat) > 1e6)
        throw QuadratureFailure("posterior window cap reached before tails vanished");
      double we = w(edge);
      peak = std::max(peak, we);
      bool outside = sign > 0 ? edge >= S.ys.back() : edge <= S.ys.front();
      if (outside) {
        double rate = static_cast<double>(n) - C2;  // positive: C2 < n checked above
        if (we / rate <= 1e-10 * peak) return;
      }
      edge = theta_hat + sign * 2.0 * std::abs(edge - theta_hat);
    }
  };
  extend(hi, +1.0);
  extend(lo, -1.0);

  // Piecewise integration split at the kinks of the likelihood.
  std::vector<double> nodes{lo, theta_hat, hi};
  for (double v : S.ys)
    if (v > lo && v < hi) nodes.push_back(v);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  double den = 0.0, num = 0.0;
  double scale = 1.0 / peak;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    double a = nodes[i], b = nodes[i + 1];
    den += integrate([&](double t) { return scale * w(t); }, a, b, 1e-13 * (hi - lo));
    num += integrate([&](double t) { return scale * t * w(t); }, a, b,
                     1e-13 * (hi - lo) * (1.0 + std::abs(theta_hat)));
  }
  if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num))
    throw QuadratureFailure("posterior normaliser vanished or overflowed");

  PosteriorMeanReport rep;
  rep.theta_mle = theta_hat;
  rep.theta_star = num / den;
  rep.gap = std::sqrt(static_cast<double>(n)) * std::abs(rep.theta_star - theta_hat);
  return rep;
}

// ---------------------------------------------------------------------------

FitResult fit_model(ModelTag tag, const Dataset& data, const FitParams& params) {
  switch (tag) {
    case ModelTag::Quantile: return fit_quantile(data.y, params.quantile_p);
    case ModelTag::LAlpha: return fit_l_alpha(data.y, params.alpha);
    case ModelTag::Ols: return fit_ols(data.X, data.y);
    case ModelTag::Lad: return fit_lad(data.X, data.y);
    case ModelTag::Logistic:
    case ModelTag::LogisticAgnostic: {
      FitResult r = fit_logistic(data.X, data.y);
      r.model = tag;
      return r;
    }
    case ModelTag::Poisson:
    case ModelTag::PoissonAgnostic: {
      FitResult r = fit_poisson(data.X, data.y);
      r.model = tag;
      return r;
    }
    case ModelTag::Cox: return fit_cox(data);
    case ModelTag::ExpHazard: return fit_exp_hazard(data, params.baseline, params.horizon);
    case ModelTag::DoubleExponential: {
      DoubleExpFit f = fit_double_exponential(data.y);
      FitResult r;
      r.model = tag;
      r.beta = VectorXd(2);
      r.beta << f.mu, f.tau;
      r.report.argmin = r.beta;
      r.report.converged = true;
      return r;
    }
    case ModelTag::MarkovPl: return fit_markov_pl(data);
  }
  throw std::invalid_argument("unhandled model tag");
}

}  // namespace argmin
