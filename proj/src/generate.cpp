#include <cmath>
#include <vector>

#include "argmin/errors.hpp"
#include "argmin/math.hpp"
#include "argmin/scenario.hpp"

namespace argmin {

namespace {

// Probability that a unit with event rate r is censored by C ~ U(0, c).
double censor_prob(double r, double c) {
  const double u = r * c;
  if (u < 1e-8) return 1.0 - 0.5 * u;  // expansion of (1 - e^-u)/u
  return (1.0 - std::exp(-u)) / u;
}

std::vector<int> sample_markov_path(long m, int k, double beta, Rng& rng) {
  // Pairwise coupling exp(beta * 1{equal}); forward sampling through the
  // normalised suffix products keeps the joint law exact for any k.
  const double e = std::exp(beta);
  std::vector<VectorXd> suffix(m);
  suffix[m - 1] = VectorXd::Ones(k);
  for (long i = m - 2; i >= 0; --i) {
    const VectorXd& nxt = suffix[i + 1];
    const double total = nxt.sum();
    VectorXd cur(k);
    for (int a = 0; a < k; ++a) cur(a) = total + (e - 1.0) * nxt(a);
    suffix[i] = cur / cur.maxCoeff();
  }
  auto pick = [&](const VectorXd& w) {
    const double u = rng.uniform() * w.sum();
    double acc = 0.0;
    for (int a = 0; a < k; ++a) {
      acc += w(a);
      if (u <= acc) return a;
    }
    return k - 1;
  };
  std::vector<int> path(m);
  path[0] = pick(suffix[0]);
  for (long i = 1; i < m; ++i) {
    VectorXd w(k);
    for (int b = 0; b < k; ++b)
      w(b) = (path[i - 1] == b ? e : 1.0) * suffix[i](b);
    path[i] = pick(w);
  }
  std::vector<int> out(m);
  for (long i = 0; i < m; ++i) out[i] = path[i] + 1;  // states are 1..k
  return out;
}

}  // namespace

double calibrate_censoring(const ScenarioConfig& config) {
  if (config.censor_target <= 0.0) return 0.0;
  const DesignSupport sup =
      design_support(config.design, config.n, config.base_seed);
  auto avg = [&](double c) {
    double s = 0.0;
    for (std::size_t i = 0; i < sup.row.size(); ++i)
      s += sup.weight[i] *
           censor_prob(std::exp(config.beta0.dot(sup.row[i])), c);
    return s;
  };
  // avg(c) decreases from 1 to 0; bisect on log c.
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (avg(std::exp(mid)) > config.censor_target ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

Dataset generate(const ScenarioConfig& config, int rep) {
  Rng rng(mix_seed(config.base_seed, static_cast<std::uint64_t>(rep)));
  const long n = config.n;

  switch (config.model) {
    case ModelTag::Quantile:
    case ModelTag::LAlpha:
    case ModelTag::DoubleExponential: {
      const ErrorDistribution err = make_error(config.error_dist, config.t_df);
      const double center = config.beta0.size() > 0 ? config.beta0(0) : 0.0;
      VectorXd y(n);
      for (long i = 0; i < n; ++i)
        y(i) = center + config.sigma_scale * err.sample(rng);
      return Dataset::continuous(MatrixXd::Ones(n, 1), y);
    }

    case ModelTag::Ols:
    case ModelTag::Lad: {
      const ErrorDistribution err = make_error(config.error_dist, config.t_df);
      const MatrixXd X = realize_design(config, rng);
      VectorXd y(n);
      for (long i = 0; i < n; ++i) {
        const VectorXd row = X.row(i).transpose();
        y(i) = mean_value(config, row) +
               sigma_value(config, row) * err.sample(rng);
      }
      return Dataset::continuous(X, y);
    }

    case ModelTag::Logistic:
    case ModelTag::LogisticAgnostic: {
      const MatrixXd X = realize_design(config, rng);
      VectorXd y(n);
      for (long i = 0; i < n; ++i)
        y(i) = rng.uniform() < binary_prob(config, X.row(i).transpose())
                   ? 1.0
                   : 0.0;
      return Dataset::binary(X, y);
    }

    case ModelTag::Poisson:
    case ModelTag::PoissonAgnostic: {
      const MatrixXd X = realize_design(config, rng);
      VectorXd y(n);
      for (long i = 0; i < n; ++i)
        y(i) = static_cast<double>(
            rng.poisson(std::exp(config.beta0.dot(X.row(i).transpose()))));
      return Dataset::count(X, y);
    }

    case ModelTag::Cox:
    case ModelTag::ExpHazard: {
      const MatrixXd X = realize_design(config, rng);
      const double cmax = calibrate_censoring(config);
      VectorXd time(n);
      VectorXi event(n);
      for (long i = 0; i < n; ++i) {
        const double rate = std::exp(config.beta0.dot(X.row(i).transpose()));
        const double t0 = rng.exponential() / rate;
        if (cmax > 0.0) {
          const double c = cmax * rng.uniform();
          time(i) = std::min(t0, c);
          event(i) = t0 <= c ? 1 : 0;
        } else {
          time(i) = t0;
          event(i) = 1;
        }
        if (time(i) <= 0.0) time(i) = 1e-300;
      }
      return Dataset::survival(X, time, event);
    }

    case ModelTag::MarkovPl: {
      return Dataset::markov(
          sample_markov_path(n, config.markov_k, config.beta0(0), rng),
          config.markov_k);
    }
  }
  throw DataError("model has no generator");
}

}  // namespace argmin
