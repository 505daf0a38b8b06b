#include "argmin/expansion.hpp"

#include <cmath>

namespace argmin {

namespace {

void check_weights(const VectorXd& w, const VectorXd& a) {
  if (w.size() == 0 || w.size() != a.size())
    throw std::invalid_argument("weights and points must be non-empty and equal length");
  double total = 0.0;
  for (long i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0) || !std::isfinite(w[i]) || !std::isfinite(a[i]))
      throw std::invalid_argument("weights must be finite and nonnegative");
    total += w[i];
  }
  if (total <= 0.0) throw AllZeroWeights("every weight is zero");
}

// log sum w_i exp(a_i t) with max subtraction; also the tilted mean of a.
void tilted(const VectorXd& w, const VectorXd& a, double t, double& logR, double& mean,
            double& var, double& third) {
  double mx = -1e300;
  for (long i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) mx = std::max(mx, a[i] * t);
  double R = 0.0, Ra = 0.0;
  for (long i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) {
      double u = w[i] * std::exp(a[i] * t - mx);
      R += u;
      Ra += u * a[i];
    }
  logR = std::log(R) + mx;
  mean = Ra / R;
  double V = 0.0, T = 0.0;
  for (long i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) {
      double u = w[i] * std::exp(a[i] * t - mx) / R;
      double c = a[i] - mean;
      V += u * c * c;
      T += u * c * c * c;
    }
  var = V;
  third = T;
}

}  // namespace

CumulantDerivatives logsumexp_derivatives(const VectorXd& w, const VectorXd& a, double t) {
  check_weights(w, a);
  CumulantDerivatives d;
  tilted(w, a, t, d.K, d.K1, d.K2, d.K3);
  return d;
}

ExpansionReport logsumexp_expand(const VectorXd& w, const VectorXd& a, double t) {
  check_weights(w, a);
  ExpansionReport rep;
  double mean0, var0, third0;
  tilted(w, a, 0.0, rep.K0, mean0, var0, third0);
  double meant, vart, thirdt;
  tilted(w, a, t, rep.Kt, meant, vart, thirdt);
  rep.abar0 = mean0;
  rep.kpp0 = var0;
  rep.remainder = (rep.Kt - rep.K0) - rep.abar0 * t - 0.5 * rep.kpp0 * t * t;

  double mu = 0.0;
  for (long i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) mu = std::max(mu, std::abs(a[i] - rep.abar0));
  rep.mu = mu;
  double at = std::abs(t);
  rep.bound_cubic = (4.0 / 3.0) * mu * mu * mu * at * at * at;
  double u = mu * at;
  double g = u * std::exp(2.0 * u + 4.0 * u * u);
  rep.bound_tight = (2.0 / 3.0) * g * rep.kpp0 * t * t;
  double slack = 1e-12 * (1.0 + std::abs(rep.Kt) + std::abs(rep.K0));
  rep.bounds_hold = std::abs(rep.remainder) <= rep.bound_cubic + slack &&
                    std::abs(rep.remainder) <= rep.bound_tight + slack;
  return rep;
}

}  // namespace argmin
