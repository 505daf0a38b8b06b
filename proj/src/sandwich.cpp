#include "argmin/sandwich.hpp"

#include <cmath>

#include "argmin/math.hpp"

namespace argmin {

MatrixXd SandwichCovariance::assemble() const {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
  double floor = 1e-12 * std::max(1.0, J.cwiseAbs().maxCoeff());
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= floor)
    throw SingularInformation("outer information is singular; sandwich not assemblable");
  MatrixXd mid = K + (L.size() > 0 ? L : MatrixXd::Zero(K.rows(), K.cols()));
  MatrixXd Jinv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                  es.eigenvectors().transpose();
  MatrixXd out = Jinv * mid * Jinv;
  return 0.5 * (out + out.transpose());
}

double kde_at(const VectorXd& sample, double point) {
  long n = sample.size();
  if (n < 2) throw EmptyData("density estimate needs at least two points");
  double mean = sample.mean();
  double sd = std::sqrt((sample.array() - mean).square().sum() / (n - 1));
  if (!(sd > 0.0)) throw DegenerateData("zero-spread sample in density estimate");
  double h = 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
  double acc = 0.0;
  for (long i = 0; i < n; ++i) acc += normal_pdf((sample[i] - point) / h);
  return acc / (n * h);
}

namespace {

SandwichCovariance quantile_sandwich(const VectorXd& y, double p, double that, ModelTag tag) {
  SandwichCovariance s;
  s.model = tag;
  s.n = y.size();
  VectorXd resid = y.array() - that;
  double f0 = kde_at(resid, 0.0);
  s.J = MatrixXd::Constant(1, 1, s.n * f0);
  s.K = MatrixXd::Constant(1, 1, s.n * p * (1.0 - p));
  s.L = MatrixXd::Zero(1, 1);
  s.meta.emplace_back("density_at_estimate", f0);
  return s;
}

}  // namespace

SandwichCovariance sandwich_for(ModelTag tag, const Dataset& data, const VectorXd& beta_hat,
                                const FitParams& params) {
  SandwichCovariance s;
  s.model = tag;
  switch (tag) {
    case ModelTag::Quantile:
      return quantile_sandwich(data.y, params.quantile_p, beta_hat[0], tag);

    case ModelTag::LAlpha: {
      double alpha = params.alpha;
      if (alpha == 1.0) return quantile_sandwich(data.y, 0.5, beta_hat[0], tag);
      s.n = data.y.size();
      double j = 0.0, k = 0.0;
      for (long i = 0; i < data.y.size(); ++i) {
        double r = std::abs(data.y[i] - beta_hat[0]);
        if (r > 0.0) j += alpha * (alpha - 1.0) * std::pow(r, alpha - 2.0);
        k += alpha * alpha * std::pow(r, 2.0 * (alpha - 1.0));
      }
      s.J = MatrixXd::Constant(1, 1, j);
      s.K = MatrixXd::Constant(1, 1, k);
      s.L = MatrixXd::Zero(1, 1);
      return s;
    }

    case ModelTag::Ols: {
      s.n = data.y.size();
      VectorXd r = data.y - data.X * beta_hat;
      int p = static_cast<int>(data.X.cols());
      s.J = data.X.transpose() * data.X;
      MatrixXd K = MatrixXd::Zero(p, p);
      for (long i = 0; i < r.size(); ++i)
        K += r[i] * r[i] * data.X.row(i).transpose() * data.X.row(i);
      s.K = K;  // squared residuals absorb both noise and model-error pieces
      s.L = MatrixXd::Zero(p, p);
      return s;
    }

    case ModelTag::Lad: {
      s.n = data.y.size();
      VectorXd r = data.y - data.X * beta_hat;
      double f0 = kde_at(r, 0.0);
      s.J = 2.0 * f0 * (data.X.transpose() * data.X);
      s.K = data.X.transpose() * data.X;
      s.L = MatrixXd::Zero(data.X.cols(), data.X.cols());
      s.meta.emplace_back("residual_density_at_zero", f0);
      return s;
    }

    case ModelTag::Logistic:
    case ModelTag::LogisticAgnostic: {
      s.n = data.y.size();
      int p = static_cast<int>(data.X.cols());
      MatrixXd J = MatrixXd::Zero(p, p), K = MatrixXd::Zero(p, p);
      for (long i = 0; i < data.y.size(); ++i) {
        double q = logistic(data.X.row(i).dot(beta_hat));
        MatrixXd xx = data.X.row(i).transpose() * data.X.row(i);
        J += q * (1.0 - q) * xx;
        double res = data.y[i] - q;
        K += (tag == ModelTag::Logistic ? q * (1.0 - q) : res * res) * xx;
      }
      s.J = J;
      s.K = K;
      s.L = MatrixXd::Zero(p, p);
      return s;
    }

    case ModelTag::Poisson:
    case ModelTag::PoissonAgnostic: {
      s.n = data.y.size();
      int p = static_cast<int>(data.X.cols());
      MatrixXd J = MatrixXd::Zero(p, p), K = MatrixXd::Zero(p, p);
      for (long i = 0; i < data.y.size(); ++i) {
        double mu = std::exp(data.X.row(i).dot(beta_hat));
        MatrixXd zz = data.X.row(i).transpose() * data.X.row(i);
        J += mu * zz;
        double res = data.y[i] - mu;
        K += (tag == ModelTag::Poisson ? mu : res * res) * zz;
      }
      s.J = J;
      s.K = K;
      s.L = MatrixXd::Zero(p, p);
      return s;
    }

    case ModelTag::Cox: {
      s.n = data.time.size();
      s.J = cox_objective(data).hess(beta_hat);
      s.K = s.J;
      s.L = MatrixXd::Zero(s.J.rows(), s.J.cols());
      return s;
    }

    case ModelTag::ExpHazard: {
      s.n = data.time.size();
      s.J = exp_hazard_objective(data, params.baseline, params.horizon).hess(beta_hat);
      s.K = s.J;
      s.L = MatrixXd::Zero(s.J.rows(), s.J.cols());
      return s;
    }

    case ModelTag::DoubleExponential: {
      s.n = data.y.size();
      double mu = beta_hat[0], tau = beta_hat[1];
      if (!(tau > 0.0)) throw DegenerateData("nonpositive scale in sandwich");
      VectorXd r = data.y.array() - mu;
      double f0 = kde_at(r, 0.0);
      double sgn = 0.0;
      for (long i = 0; i < r.size(); ++i) sgn += (r[i] > 0.0) - (r[i] < 0.0);
      MatrixXd J(2, 2);
      J << 2.0 * s.n * f0 / tau, sgn / (tau * tau), sgn / (tau * tau),
          static_cast<double>(s.n) / (tau * tau);
      MatrixXd K = MatrixXd::Zero(2, 2);
      for (long i = 0; i < r.size(); ++i) {
        Eigen::Vector2d score(((r[i] > 0.0) - (r[i] < 0.0)) / tau,
                              -1.0 / tau + std::abs(r[i]) / (tau * tau));
        K += score * score.transpose();
      }
      s.J = J;
      s.K = K;
      s.L = MatrixXd::Zero(2, 2);
      s.meta.emplace_back("residual_density_at_zero", f0);
      return s;
    }

    case ModelTag::MarkovPl: {
      s.n = static_cast<long>(data.path.size());
      s.J = markov_objective(data, MarkovCoupling::neighbor_agreement()).hess(beta_hat);
      s.K = s.J;
      s.L = MatrixXd::Zero(1, 1);
      return s;
    }
  }
  throw std::invalid_argument("unhandled model tag in sandwich_for");
}

}  // namespace argmin
