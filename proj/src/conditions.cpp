#include "argmin/conditions.hpp"

#include <cmath>

#include "argmin/math.hpp"

namespace argmin {

namespace {

// J^{-1/2} through the spectral decomposition; rejects non-PD information.
MatrixXd inverse_sqrt(const MatrixXd& J, const char* what) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw SingularInformation(std::string(what) + ": information matrix not positive definite");
  VectorXd inv = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

void check_grid(const VectorXd& grid) {
  if (grid.size() == 0) throw std::invalid_argument("empty delta grid");
  for (long i = 0; i < grid.size(); ++i)
    if (!(grid[i] > 0.0)) throw std::invalid_argument("delta grid must be positive");
}

double value_at(const VectorXd& grid, const VectorXd& vals, double delta) {
  for (long i = 0; i < grid.size(); ++i)
    if (grid[i] == delta) return vals[i];
  // Fall back to the closest grid point.
  long best = 0;
  for (long i = 1; i < grid.size(); ++i)
    if (std::abs(grid[i] - delta) < std::abs(grid[best] - delta)) best = i;
  return vals[best];
}

}  // namespace

double exp_remainder_rho(double u) {
  if (std::abs(u) < 1e-3) {
    // 6 sum_{k>=3} u^k / k!
    double u2 = u * u, u3 = u2 * u;
    return u3 * (1.0 + u / 4.0 + u2 / 20.0 + u3 / 120.0);
  }
  return 6.0 * (std::expm1(u) - u - 0.5 * u * u);
}

LindebergReport bernoulli_lindeberg(const VectorXd& z, const VectorXd& q,
                                    const VectorXd& delta_grid, double pass_delta,
                                    double pass_threshold) {
  if (z.size() == 0 || z.size() != q.size())
    throw std::invalid_argument("weights and probabilities must be non-empty, equal length");
  check_grid(delta_grid);
  for (long i = 0; i < q.size(); ++i)
    if (!(q[i] >= 0.0 && q[i] <= 1.0)) throw std::invalid_argument("probability outside [0,1]");

  double s2 = 0.0;
  for (long i = 0; i < z.size(); ++i) s2 += z[i] * z[i] * q[i] * (1.0 - q[i]);
  if (!(s2 > 0.0)) throw DegenerateVariance("total Bernoulli variance is zero");
  double s = std::sqrt(s2);

  LindebergReport rep;
  rep.delta_grid = delta_grid;
  rep.scale = s;
  rep.pass_delta = pass_delta;
  rep.pass_threshold = pass_threshold;
  rep.N.resize(delta_grid.size());
  rep.L.resize(delta_grid.size());

  auto N_of = [&](double delta) {
    double acc = 0.0;
    for (long i = 0; i < z.size(); ++i) {
      double zt = z[i] / s;
      if (std::abs(zt) >= delta) acc += zt * zt * q[i] * (1.0 - q[i]);
    }
    return acc;
  };
  rep.lambda = z.cwiseAbs().maxCoeff() / s;

  rep.sandwich_ok = true;
  for (long g = 0; g < delta_grid.size(); ++g) {
    double delta = delta_grid[g];
    rep.N[g] = N_of(delta);
    // Exact Lindeberg sum: the summand z(Y-q) takes value z(1-q) w.p. q and
    // -zq w.p. 1-q.
    double L = 0.0;
    for (long i = 0; i < z.size(); ++i) {
      double zt = z[i] / s, qi = q[i];
      double up = zt * (1.0 - qi), down = -zt * qi;
      L += qi * up * up * (std::abs(up) >= delta ? 1.0 : 0.0);
      L += (1.0 - qi) * down * down * (std::abs(down) >= delta ? 1.0 : 0.0);
    }
    rep.L[g] = L;
    double N2 = N_of(2.0 * delta);
    double slack = 1e-12 * (1.0 + rep.N[g]);
    if (!(0.5 * N2 <= L + slack && L <= rep.N[g] + slack)) rep.sandwich_ok = false;
  }
  rep.passes = value_at(delta_grid, rep.N, pass_delta) < pass_threshold;
  return rep;
}

LindebergReport logistic_condition(const MatrixXd& X, const VectorXd& beta0,
                                   const VectorXd& delta_grid, double pass_delta,
                                   double pass_threshold) {
  if (X.rows() == 0) throw std::invalid_argument("empty design");
  if (X.cols() != beta0.size()) throw std::invalid_argument("beta0 length mismatch");
  check_grid(delta_grid);
  long n = X.rows();
  int p = static_cast<int>(X.cols());

  VectorXd qv(n);
  MatrixXd J = MatrixXd::Zero(p, p);
  for (long i = 0; i < n; ++i) {
    double q = logistic(X.row(i).dot(beta0));
    qv[i] = q;
    J += q * (1.0 - q) * X.row(i).transpose() * X.row(i);
  }
  MatrixXd Jih = inverse_sqrt(J, "logistic condition");

  VectorXd a(n);
  for (long i = 0; i < n; ++i) a[i] = (Jih * X.row(i).transpose()).norm();

  LindebergReport rep;
  rep.delta_grid = delta_grid;
  rep.pass_delta = pass_delta;
  rep.pass_threshold = pass_threshold;
  rep.N.resize(delta_grid.size());
  for (long g = 0; g < delta_grid.size(); ++g) {
    double acc = 0.0;
    for (long i = 0; i < n; ++i)
      if (a[i] >= delta_grid[g]) acc += qv[i] * (1.0 - qv[i]) * a[i] * a[i];
    rep.N[g] = acc;
  }
  rep.lambda = a.maxCoeff();
  rep.mu = X.rowwise().norm().maxCoeff() / std::sqrt(static_cast<double>(n));
  rep.passes = value_at(delta_grid, rep.N, pass_delta) < pass_threshold;
  return rep;
}

LindebergReport poisson_condition(const MatrixXd& Z, const VectorXd& beta0,
                                  const VectorXd& delta_grid, double pass_delta,
                                  double pass_threshold) {
  if (Z.rows() == 0) throw std::invalid_argument("empty design");
  if (Z.cols() != beta0.size()) throw std::invalid_argument("beta0 length mismatch");
  check_grid(delta_grid);
  long n = Z.rows();
  int p = static_cast<int>(Z.cols());

  VectorXd mu(n);
  MatrixXd J = MatrixXd::Zero(p, p);
  for (long i = 0; i < n; ++i) {
    mu[i] = std::exp(Z.row(i).dot(beta0));
    J += mu[i] * Z.row(i).transpose() * Z.row(i);
  }
  MatrixXd Jih = inverse_sqrt(J, "Poisson condition");

  VectorXd a(n);
  for (long i = 0; i < n; ++i) a[i] = (Jih * Z.row(i).transpose()).norm();

  LindebergReport rep;
  rep.delta_grid = delta_grid;
  rep.pass_delta = pass_delta;
  rep.pass_threshold = pass_threshold;
  rep.N.resize(delta_grid.size());
  for (long g = 0; g < delta_grid.size(); ++g) {
    double acc = 0.0;
    for (long i = 0; i < n; ++i)
      if (a[i] >= delta_grid[g]) acc += mu[i] * a[i] * a[i];
    rep.N[g] = acc;
  }
  rep.lambda = a.maxCoeff();
  double rho = 0.0;
  for (long i = 0; i < n; ++i) rho += mu[i] * exp_remainder_rho(a[i]);
  rep.rho_sum = rho;
  rep.passes = value_at(delta_grid, rep.N, pass_delta) < pass_threshold;
  return rep;
}

CoxConditionReport cox_conditions(const Dataset& data, const VectorXd& beta0,
                                  const VectorXd& s_grid) {
  data.validate();
  if (data.kind != ResponseKind::Survival)
    throw std::invalid_argument("cox_conditions needs survival data");
  if (s_grid.size() == 0) throw std::invalid_argument("empty time grid");
  long n = data.time.size();
  int p = static_cast<int>(data.X.cols());

  CoxConditionReport rep;
  rep.s_grid = s_grid;
  rep.mu_s.resize(s_grid.size());
  rep.J_s.reserve(s_grid.size());

  VectorXd eta = data.X * beta0;
  double m = eta.maxCoeff();
  for (long g = 0; g < s_grid.size(); ++g) {
    double s = s_grid[g];
    double S0 = 0.0;
    VectorXd S1 = VectorXd::Zero(p);
    MatrixXd S2 = MatrixXd::Zero(p, p);
    long at_risk = 0;
    for (long i = 0; i < n; ++i) {
      if (data.time[i] >= s) {
        double w = std::exp(eta[i] - m);
        VectorXd z = data.X.row(i).transpose();
        S0 += w;
        S1 += w * z;
        S2 += w * z * z.transpose();
        ++at_risk;
      }
    }
    if (at_risk == 0)
      throw EmptyRiskSet("no subjects at risk at grid time " + std::to_string(s));
    VectorXd zbar = S1 / S0;
    MatrixXd V = S2 / S0 - zbar * zbar.transpose();
    // Weighted covariance normalised per subject, averaged over at-risk mass.
    rep.J_s.push_back(MatrixXd((S0 * std::exp(m) / n) * V));
    double widest = 0.0;
    for (long i = 0; i < n; ++i)
      widest = std::max(widest, (data.X.row(i).transpose() - zbar).norm());
    rep.mu_s[g] = widest / std::sqrt(static_cast<double>(n));
  }
  rep.mu_max = rep.mu_s.maxCoeff();
  return rep;
}

}  // namespace argmin
