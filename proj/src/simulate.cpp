#include "argmin/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "argmin/errors.hpp"
#include "argmin/estimators.hpp"
#include "argmin/math.hpp"
#include "argmin/sandwich.hpp"

namespace argmin {

namespace {

constexpr std::uint64_t kQuantileStream = 0x9d2c5680u;
constexpr std::uint64_t kBayesStream = 0xb5026f5au;
constexpr std::uint64_t kCorollaryStream = 0xc07011a3u;
constexpr double kPi = 3.14159265358979323846;

// E |eps|^c for a symmetric unit-variance error law; the power substitution
// x = u^m keeps the integrand smooth for c in (-1, 0).
double abs_moment(const ErrorDistribution& err, double c) {
  if (c == 0.0) return 1.0;
  const double m = std::max(1.0, 2.0 / (c + 1.0));
  const double upper = std::pow(200.0, 1.0 / m);
  return integrate(
      [&](double u) {
        const double x = std::pow(u, m);
        return 2.0 * m * std::pow(u, m * (c + 1.0) - 1.0) * err.pdf(x);
      },
      0.0, upper, 1e-12);
}

// Upper partial mean: integral of t f(t) over [u, infinity), u >= 0.
double upper_partial_mean(const ErrorDistribution& err, double u) {
  if (u >= 200.0) return 0.0;
  return integrate([&](double t) { return t * err.pdf(t); }, u, 200.0, 1e-12);
}

MatrixXd spd_inverse(const MatrixXd& M, const char* what) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  const double floor = 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
  if (es.eigenvalues().minCoeff() <= floor) throw SingularInformation(what);
  return es.eigenvectors() *
         es.eigenvalues().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

MatrixXd spd_sqrt(const MatrixXd& M, const char* what) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  const double floor = 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
  if (es.eigenvalues().minCoeff() <= floor) throw SingularInformation(what);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

double ks_against_fitted_normal(std::vector<double> v) {
  const long m = static_cast<long>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));
  if (!(sd > 0.0)) return 1.0;
  std::sort(v.begin(), v.end());
  double d = 0.0;
  for (long i = 0; i < m; ++i) {
    const double z = normal_cdf((v[i] - mean) / sd);
    d = std::max(d, std::max(z - static_cast<double>(i) / m,
                             static_cast<double>(i + 1) / m - z));
  }
  return d;
}

struct TheoryPieces {
  MatrixXd cov;
  std::string provenance;
  MatrixXd middle;  // least squares only
};

TheoryPieces explicit_theory(const ScenarioConfig& config,
                             const VectorXd& theta0) {
  TheoryPieces out;
  const double s2 = config.sigma_scale * config.sigma_scale;
  switch (config.model) {
    case ModelTag::Quantile: {
      const ErrorDistribution err = make_error(config.error_dist, config.t_df);
      const double p = config.quantile_p;
      const double f = err.pdf(err.quantile(p));
      out.cov = MatrixXd::Constant(1, 1, p * (1.0 - p) * s2 / (f * f));
      out.provenance = "quantile variance p(1-p)/f(q_p)^2";
      return out;
    }
    case ModelTag::LAlpha: {
      const ErrorDistribution err = make_error(config.error_dist, config.t_df);
      const double a = config.alpha;
      double v;
      if (a == 1.0) {
        const double f0 = err.pdf(0.0);
        v = s2 / (4.0 * f0 * f0);
      } else {
        const double num = abs_moment(err, 2.0 * (a - 1.0));
        const double den = (a - 1.0) * abs_moment(err, a - 2.0);
        v = s2 * num / (den * den);
      }
      out.cov = MatrixXd::Constant(1, 1, v);
      out.provenance = "power-criterion moment-ratio variance";
      return out;
    }
    case ModelTag::DoubleExponential: {
      const ErrorDistribution err = make_error(config.error_dist, config.t_df);
      const double f0 = err.pdf(0.0);
      out.cov = MatrixXd::Zero(2, 2);
      out.cov(0, 0) = s2 / (4.0 * f0 * f0);
      out.cov(1, 1) = s2 * (1.0 - err.mean_abs * err.mean_abs);
      out.provenance = "location-scale double-exponential score variance";
      return out;
    }
    case ModelTag::Ols: {
      const DesignSupport sup =
          design_support(config.design, config.n, config.base_seed);
      const int p = config.design.columns();
      MatrixXd J = MatrixXd::Zero(p, p), mid = MatrixXd::Zero(p, p);
      for (std::size_t i = 0; i < sup.row.size(); ++i) {
        const VectorXd& x = sup.row[i];
        const double w = sup.weight[i];
        const double bias = mean_value(config, x) - theta0.dot(x);
        const double sig = sigma_value(config, x);
        J += w * x * x.transpose();
        mid += w * (sig * sig + bias * bias) * x * x.transpose();
      }
      const MatrixXd Jinv = spd_inverse(J, "design second moment");
      out.cov = Jinv * mid * Jinv;
      out.middle = mid;
      out.provenance = "least-squares sandwich over the design support";
      return out;
    }
    case ModelTag::Lad: {
      const ErrorDistribution err = make_error(config.error_dist, config.t_df);
      const DesignSupport sup =
          design_support(config.design, config.n, config.base_seed);
      const int p = config.design.columns();
      MatrixXd J = MatrixXd::Zero(p, p), mid = MatrixXd::Zero(p, p);
      for (std::size_t i = 0; i < sup.row.size(); ++i) {
        const VectorXd& x = sup.row[i];
        const double w = sup.weight[i];
        const double sig = sigma_value(config, x);
        const double c = (mean_value(config, x) - theta0.dot(x)) / sig;
        J += w * 2.0 * err.pdf(c) / sig * x * x.transpose();
        mid += w * x * x.transpose();
      }
      const MatrixXd Jinv = spd_inverse(J, "residual density curvature");
      out.cov = Jinv * mid * Jinv;
      out.provenance = "least-absolute-deviation sandwich";
      return out;
    }
    case ModelTag::Logistic:
    case ModelTag::LogisticAgnostic: {
      const DesignSupport sup =
          design_support(config.design, config.n, config.base_seed);
      const int p = config.design.columns();
      MatrixXd J = MatrixXd::Zero(p, p), K = MatrixXd::Zero(p, p);
      for (std::size_t i = 0; i < sup.row.size(); ++i) {
        const VectorXd& x = sup.row[i];
        const double w = sup.weight[i];
        const double pi = logistic(theta0.dot(x));
        const double q = binary_prob(config, x);
        J += w * pi * (1.0 - pi) * x * x.transpose();
        K += w * (q * (1.0 - q) + (q - pi) * (q - pi)) * x * x.transpose();
      }
      const MatrixXd Jinv = spd_inverse(J, "logistic information");
      if (!config.misspecified()) {
        out.cov = Jinv;
        out.provenance = "inverse logistic information";
      } else {
        out.cov = Jinv * K * Jinv;
        out.provenance = "logistic sandwich at the KL projection";
      }
      return out;
    }
    case ModelTag::Poisson:
    case ModelTag::PoissonAgnostic: {
      const DesignSupport sup =
          design_support(config.design, config.n, config.base_seed);
      const int p = config.design.columns();
      MatrixXd J = MatrixXd::Zero(p, p);
      for (std::size_t i = 0; i < sup.row.size(); ++i)
        J += sup.weight[i] * std::exp(theta0.dot(sup.row[i])) * sup.row[i] *
             sup.row[i].transpose();
      out.cov = spd_inverse(J, "Poisson information");
      out.provenance = "inverse Poisson information";
      return out;
    }
    default:
      throw DataError("no closed-form limit covariance for this model");
  }
}

bool uses_averaged_information(const ScenarioConfig& config) {
  return config.model == ModelTag::Cox || config.model == ModelTag::ExpHazard ||
         config.model == ModelTag::MarkovPl;
}

FitParams fit_params_for(const ScenarioConfig& config) {
  FitParams params;
  params.quantile_p = config.quantile_p;
  params.alpha = config.alpha;
  return params;
}

}  // namespace

VectorXd population_projection(const ScenarioConfig& config) {
  const DesignSupport sup =
      design_support(config.design, config.n, config.base_seed);
  const int p = config.design.columns();
  const auto check_unique = [&](const MatrixXd& H) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(H);
    if (es.eigenvalues().minCoeff() <=
        1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()))
      throw NonUniqueMinimizer("population criterion is flat");
  };

  switch (config.model) {
    case ModelTag::Ols: {
      MatrixXd J = MatrixXd::Zero(p, p);
      VectorXd b = VectorXd::Zero(p);
      for (std::size_t i = 0; i < sup.row.size(); ++i) {
        J += sup.weight[i] * sup.row[i] * sup.row[i].transpose();
        b += sup.weight[i] * mean_value(config, sup.row[i]) * sup.row[i];
      }
      check_unique(J);
      return J.ldlt().solve(b);
    }
    case ModelTag::Lad: {
      const ErrorDistribution err = make_error(config.error_dist, config.t_df);
      ConvexObjective obj;
      obj.dim = p;
      obj.smoothness = Smoothness::TwiceDifferentiable;
      obj.value = [&config, &sup, &err](const VectorXd& beta) {
        double total = 0.0;
        for (std::size_t i = 0; i < sup.row.size(); ++i) {
          const double sig = sigma_value(config, sup.row[i]);
          const double c =
              (mean_value(config, sup.row[i]) - beta.dot(sup.row[i])) / sig;
          total += sup.weight[i] * sig *
                   (c * (2.0 * err.cdf(c) - 1.0) +
                    2.0 * upper_partial_mean(err, std::abs(c)));
        }
        return total;
      };
      obj.grad = [&config, &sup, &err, p](const VectorXd& beta) {
        VectorXd g = VectorXd::Zero(p);
        for (std::size_t i = 0; i < sup.row.size(); ++i) {
          const double sig = sigma_value(config, sup.row[i]);
          const double c =
              (mean_value(config, sup.row[i]) - beta.dot(sup.row[i])) / sig;
          g -= sup.weight[i] * (2.0 * err.cdf(c) - 1.0) * sup.row[i];
        }
        return g;
      };
      obj.hess = [&config, &sup, &err, p](const VectorXd& beta) {
        MatrixXd H = MatrixXd::Zero(p, p);
        for (std::size_t i = 0; i < sup.row.size(); ++i) {
          const double sig = sigma_value(config, sup.row[i]);
          const double c =
              (mean_value(config, sup.row[i]) - beta.dot(sup.row[i])) / sig;
          H += sup.weight[i] * 2.0 * err.pdf(c) / sig * sup.row[i] *
               sup.row[i].transpose();
        }
        return H;
      };
      const SolveReport rep = solve_smooth(obj, VectorXd::Zero(p), 1e-11);
      check_unique(obj.hess(rep.argmin));
      return rep.argmin;
    }
    case ModelTag::Logistic:
    case ModelTag::LogisticAgnostic: {
      ConvexObjective obj;
      obj.dim = p;
      obj.smoothness = Smoothness::TwiceDifferentiable;
      obj.value = [&config, &sup](const VectorXd& beta) {
        double total = 0.0;
        for (std::size_t i = 0; i < sup.row.size(); ++i) {
          const double eta = beta.dot(sup.row[i]);
          total += sup.weight[i] *
                   (log1pexp(eta) - binary_prob(config, sup.row[i]) * eta);
        }
        return total;
      };
      obj.grad = [&config, &sup, p](const VectorXd& beta) {
        VectorXd g = VectorXd::Zero(p);
        for (std::size_t i = 0; i < sup.row.size(); ++i)
          g += sup.weight[i] *
               (logistic(beta.dot(sup.row[i])) -
                binary_prob(config, sup.row[i])) *
               sup.row[i];
        return g;
      };
      obj.hess = [&sup, p](const VectorXd& beta) {
        MatrixXd H = MatrixXd::Zero(p, p);
        for (std::size_t i = 0; i < sup.row.size(); ++i) {
          const double pi = logistic(beta.dot(sup.row[i]));
          H += sup.weight[i] * pi * (1.0 - pi) * sup.row[i] *
               sup.row[i].transpose();
        }
        return H;
      };
      const SolveReport rep = solve_smooth(obj, VectorXd::Zero(p), 1e-12);
      check_unique(obj.hess(rep.argmin));
      return rep.argmin;
    }
    default:
      throw DataError("population projection applies to the regression models");
  }
}

VectorXd target_parameter(const ScenarioConfig& config) {
  const double center = config.beta0.size() > 0 ? config.beta0(0) : 0.0;
  switch (config.model) {
    case ModelTag::Quantile: {
      const ErrorDistribution err = make_error(config.error_dist, config.t_df);
      return VectorXd::Constant(
          1, center + config.sigma_scale * err.quantile(config.quantile_p));
    }
    case ModelTag::LAlpha:
      return VectorXd::Constant(1, center);
    case ModelTag::DoubleExponential: {
      const ErrorDistribution err = make_error(config.error_dist, config.t_df);
      VectorXd t(2);
      t << center, config.sigma_scale * err.mean_abs;
      return t;
    }
    case ModelTag::Ols:
    case ModelTag::Lad:
      return config.mean_fn == "linear" ? config.beta0
                                        : population_projection(config);
    case ModelTag::Logistic:
    case ModelTag::LogisticAgnostic:
      return config.binary_q == "logistic" ? config.beta0
                                           : population_projection(config);
    default:
      return config.beta0;
  }
}

MatrixXd information_at(const ScenarioConfig& config, const Dataset& data,
                        const VectorXd& beta) {
  switch (config.model) {
    case ModelTag::Ols:
      return ols_objective(data.X, data.y).hess(beta);
    case ModelTag::Logistic:
    case ModelTag::LogisticAgnostic:
      return logistic_objective(data.X, data.y).hess(beta);
    case ModelTag::Poisson:
    case ModelTag::PoissonAgnostic:
      return poisson_objective(data.X, data.y).hess(beta);
    case ModelTag::Cox:
      return cox_objective(data).hess(beta);
    case ModelTag::ExpHazard:
      return exp_hazard_objective(data, nullptr, 0.0).hess(beta);
    case ModelTag::MarkovPl:
      return markov_objective(data, MarkovCoupling::neighbor_agreement())
          .hess(beta);
    default:
      throw DataError("no information matrix for this model");
  }
}

SimulationReport run_scenario(const ScenarioConfig& config) {
  config.validate();
  const VectorXd theta0 = target_parameter(config);
  const int p = static_cast<int>(theta0.size());
  const FitParams params = fit_params_for(config);
  const double sqrt_n = std::sqrt(static_cast<double>(config.n));
  const double z975 = normal_quantile(0.975);
  const bool per_rep =
      config.normalization == Normalization::PerRepInformation;
  const bool avg_info = !per_rep && uses_averaged_information(config);
  const bool track_middle = config.model == ModelTag::Ols;

  struct RepOut {
    bool ok = false;
    std::string kind;
    VectorXd stat;
    std::vector<unsigned char> covered;
    bool has_cover = false;
    MatrixXd info0;
    bool has_info0 = false;
    MatrixXd middle;
    bool has_middle = false;
  };
  std::vector<RepOut> outs(config.R);

  auto run_rep = [&](int r) {
    RepOut& out = outs[r];
    try {
      const Dataset data = generate(config, r);
      const FitResult fit = fit_model(config.model, data, params);
      if (!fit.report.converged) {
        out.kind = "NoConvergence";
        return;
      }
      if (per_rep) {
        const MatrixXd J0 = information_at(config, data, theta0);
        out.stat = spd_sqrt(J0, "per-replication information") *
                   (fit.beta - theta0);
      } else {
        out.stat = sqrt_n * (fit.beta - theta0);
      }
      if (avg_info) {
        out.info0 = information_at(config, data, config.beta0) /
                    static_cast<double>(config.n);
        out.has_info0 = true;
      }
      try {
        const SandwichCovariance sw =
            sandwich_for(config.model, data, fit.beta, params);
        const MatrixXd S = sw.assemble();
        out.covered.resize(p);
        for (int j = 0; j < p; ++j)
          out.covered[j] = std::abs(fit.beta(j) - theta0(j)) <=
                                   z975 * std::sqrt(std::max(0.0, S(j, j)))
                               ? 1
                               : 0;
        out.has_cover = true;
        if (track_middle) {
          out.middle = sw.K / static_cast<double>(config.n);
          out.has_middle = true;
        }
      } catch (const EstimationError&) {
        out.has_cover = false;
      }
      out.ok = true;
    } catch (const EstimationError& e) {
      out.kind = e.kind();
    }
  };

  const int threads = std::max(1, config.threads);
  if (threads == 1) {
    for (int r = 0; r < config.R; ++r) run_rep(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          while (true) {
            const int r = next.fetch_add(1);
            if (r >= config.R) break;
            run_rep(r);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SimulationReport report;
  report.n = config.n;
  report.R = config.R;
  report.theta0 = theta0;
  int ok = 0;
  for (const RepOut& out : outs) {
    if (out.ok)
      ++ok;
    else
      report.failures[out.kind] += 1;
  }
  report.succeeded = ok;
  if (config.R - ok > 0.05 * config.R) {
    std::string detail = "replication failures:";
    for (const auto& [kind, count] : report.failures)
      detail += " " + kind + " x" + std::to_string(count);
    throw TooManyFailures(detail);
  }
  if (ok < 2) throw TooManyFailures("fewer than two successful replications");

  MatrixXd stats(ok, p);
  {
    int at = 0;
    for (const RepOut& out : outs)
      if (out.ok) stats.row(at++) = out.stat.transpose();
  }
  report.mean_stat = stats.colwise().mean().transpose();
  {
    MatrixXd centered = stats.rowwise() - report.mean_stat.transpose();
    report.emp_cov =
        centered.transpose() * centered / static_cast<double>(ok - 1);
  }

  report.ks.resize(p);
  for (int j = 0; j < p; ++j) {
    std::vector<double> col(ok);
    for (int i = 0; i < ok; ++i) col[i] = stats(i, j);
    report.ks(j) = ks_against_fitted_normal(std::move(col));
  }

  report.coverage = VectorXd::Zero(p);
  long cover_reps = 0;
  for (const RepOut& out : outs)
    if (out.ok && out.has_cover) {
      ++cover_reps;
      for (int j = 0; j < p; ++j)
        report.coverage(j) += static_cast<double>(out.covered[j]);
    }
  if (cover_reps > 0) report.coverage /= static_cast<double>(cover_reps);

  if (per_rep) {
    report.theory_cov = MatrixXd::Identity(p, p);
    report.theory_provenance = "information-normalised identity";
  } else if (avg_info) {
    MatrixXd Jbar = MatrixXd::Zero(p, p);
    long cnt = 0;
    for (const RepOut& out : outs)
      if (out.ok && out.has_info0) {
        Jbar += out.info0;
        ++cnt;
      }
    Jbar /= static_cast<double>(cnt);
    report.theory_cov = spd_inverse(Jbar, "averaged information");
    report.theory_provenance = "averaged observed information inverse";
  } else {
    TheoryPieces pieces = explicit_theory(config, theta0);
    report.theory_cov = pieces.cov;
    report.theory_provenance = pieces.provenance;
    report.middle_theory = pieces.middle;
  }

  if (track_middle) {
    MatrixXd mid = MatrixXd::Zero(p, p);
    long cnt = 0;
    for (const RepOut& out : outs)
      if (out.ok && out.has_middle) {
        mid += out.middle;
        ++cnt;
      }
    if (cnt > 0) report.middle_hat = mid / static_cast<double>(cnt);
  }

  {
    const MatrixXd Tis = spd_sqrt(
        spd_inverse(report.theory_cov, "limit covariance"), "limit covariance");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Tis * report.emp_cov * Tis);
    report.max_rel_eig_gap =
        (es.eigenvalues().array() - 1.0).abs().maxCoeff();
  }
  return report;
}

QuantileProcessReport quantile_process_check(long n, int R,
                                             const std::vector<double>& p_grid,
                                             const std::string& error_dist,
                                             std::uint64_t base_seed,
                                             int t_df) {
  if (n < 2 || R < 2) throw DataError("quantile process needs n and R >= 2");
  if (p_grid.empty()) throw DataError("empty quantile grid");
  for (double p : p_grid)
    if (p <= 0.0 || p >= 1.0) throw DataError("grid levels must lie in (0,1)");
  const ErrorDistribution err = make_error(error_dist, t_df);
  const int m = static_cast<int>(p_grid.size());
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  VectorXd targets(m);
  for (int j = 0; j < m; ++j) targets(j) = err.quantile(p_grid[j]);

  MatrixXd Z(R, m);
  VectorXd sample(n);
  for (int r = 0; r < R; ++r) {
    Rng rng(mix_seed(mix_seed(base_seed, kQuantileStream),
                     static_cast<std::uint64_t>(r)));
    for (long i = 0; i < n; ++i) sample(i) = err.sample(rng);
    std::sort(sample.data(), sample.data() + n);
    for (int j = 0; j < m; ++j) {
      const auto [lo, hi] = quantile_interval(sample, p_grid[j]);
      Z(r, j) = sqrt_n * (0.5 * (lo + hi) - targets(j));
    }
  }

  QuantileProcessReport report;
  report.p_grid = p_grid;
  const Eigen::RowVectorXd mean = Z.colwise().mean();
  const MatrixXd centered = Z.rowwise() - mean;
  report.emp_cov = centered.transpose() * centered / static_cast<double>(R - 1);
  report.theory_cov.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double plo = std::min(p_grid[i], p_grid[j]);
      const double phi = std::max(p_grid[i], p_grid[j]);
      report.theory_cov(i, j) =
          plo * (1.0 - phi) / (err.pdf(targets(i)) * err.pdf(targets(j)));
    }
  report.max_rel_gap = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      report.max_rel_gap = std::max(
          report.max_rel_gap,
          std::abs(report.emp_cov(i, j) - report.theory_cov(i, j)) /
              std::abs(report.theory_cov(i, j)));
  return report;
}

BayesEquivalenceReport bayes_equivalence_check(
    const std::vector<long>& n_grid, int R, std::uint64_t base_seed,
    const std::function<double(double)>& prior, double C1, double C2) {
  if (n_grid.empty()) throw DataError("empty n grid");
  if (R < 1) throw DataError("R must be positive");
  BayesEquivalenceReport report;
  report.n_grid = n_grid;
  const double root2 = std::sqrt(2.0);
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    const long n = n_grid[gi];
    std::vector<double> gaps(R);
    for (int r = 0; r < R; ++r) {
      Rng rng(mix_seed(mix_seed(base_seed, kBayesStream + gi),
                       static_cast<std::uint64_t>(r)));
      VectorXd y(n);
      // unit-scale double-exponential location data at theta = 0
      for (long i = 0; i < n; ++i) y(i) = root2 * rng.laplace_unit();
      gaps[r] = posterior_mean_1d(y, prior, C1, C2).gap;
    }
    std::nth_element(gaps.begin(), gaps.begin() + R / 2, gaps.end());
    double med = gaps[R / 2];
    if (R % 2 == 0) {
      const double upper = med;
      std::nth_element(gaps.begin(), gaps.begin() + R / 2 - 1, gaps.end());
      med = 0.5 * (gaps[R / 2 - 1] + upper);
    }
    report.median_gap.push_back(med);
  }
  report.decreasing = true;
  for (std::size_t i = 1; i < report.median_gap.size(); ++i) {
    report.ratio.push_back(report.median_gap[i] /
                           report.median_gap[i - 1]);
    if (!(report.median_gap[i] < report.median_gap[i - 1]))
      report.decreasing = false;
  }
  return report;
}

CorollaryReport basic_corollary_check(const CorollaryOptions& options) {
  CorollaryReport report;
  report.instances = options.instances;
  double min_margin = std::numeric_limits<double>::infinity();

  for (int inst = 0; inst < options.instances; ++inst) {
    Rng rng(mix_seed(options.seed,
                     kCorollaryStream + static_cast<std::uint64_t>(inst)));
    const int p = 1 + static_cast<int>(rng.below(2));
    VectorXd lam(p);
    for (int j = 0; j < p; ++j) lam(j) = 0.5 + 2.5 * rng.uniform();
    MatrixXd V(p, p);
    if (p == 1) {
      V(0, 0) = lam(0);
    } else {
      const double phi = 2.0 * kPi * rng.uniform();
      MatrixXd Q(2, 2);
      Q << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
      V = Q * lam.asDiagonal() * Q.transpose();
    }
    VectorXd U(p);
    for (int j = 0; j < p; ++j) U(j) = rng.normal();
    const QuadraticModel B(V, U, rng.normal());
    const VectorXd beta = B.argmin();
    const double k = B.min_curvature();

    // convex perturbation shrinking like 1/sqrt(n_eff)
    const double n_eff = std::exp(std::log(100.0) +
                                  rng.uniform() * std::log(100.0));
    const double mscale = options.magnitude * rng.uniform() / std::sqrt(n_eff);
    const double a1 = rng.uniform(), a2 = rng.uniform();
    VectorXd w(p), v(p);
    for (int j = 0; j < p; ++j) {
      w(j) = 2.0 * rng.uniform() - 1.0;
      v(j) = 2.0 * rng.uniform() - 1.0;
    }
    const double b0 = 2.0 * rng.uniform() - 1.0;
    const auto remainder = [&](const VectorXd& s) {
      return mscale * (a1 * std::abs(w.dot(s) + b0) + a2 * log1pexp(v.dot(s)));
    };
    const std::size_t di = rng.below(3);
    const double delta = di == 0 ? 0.25 : (di == 1 ? 0.5 : 1.0);
    const double Lr = mscale * (a1 * w.norm() + a2 * v.norm());

    int G = p == 1 ? options.grid_1d : options.grid_2d;
    if (G < 3) G = 3;
    G |= 1;  // odd, so beta itself is a node
    const double W = 1.05 * std::max(delta, 2.0 * Lr / k) + 1e-12;
    const double h = 2.0 * W / (G - 1);
    const double cover = 0.5 * h * std::sqrt(static_cast<double>(p));
    const double r_beta = remainder(beta);

    double best = std::numeric_limits<double>::infinity();
    VectorXd best_s = beta;
    double sup_lb = 0.0, sup_raw = 0.0;
    VectorXd s(p);
    const long nodes = p == 1 ? G : static_cast<long>(G) * G;
    for (long node = 0; node < nodes; ++node) {
      s(0) = beta(0) + (node % G) * h - W;
      if (p == 2) s(1) = beta(1) + (node / G) * h - W;
      const double rv = remainder(s);
      const double av = B.value(s) + rv;
      if (av < best) {
        best = av;
        best_s = s;
      }
      const double dist = (s - beta).norm();
      const double dev = std::abs(rv - r_beta);
      if (dist <= delta + 1e-15) sup_lb = std::max(sup_lb, dev);
      if (dist <= delta + cover + 1e-15) sup_raw = std::max(sup_raw, dev);
    }
    const double sup_ub = sup_raw + Lr * cover;
    // value gap between the grid argmin and the true one, through the
    // gradient bound on the cube, turned into a distance via strong
    // convexity
    const double grad_cap =
        lam.maxCoeff() * W * std::sqrt(static_cast<double>(p)) + Lr;
    const double dist_lb =
        (best_s - beta).norm() - std::sqrt(2.0 * grad_cap * cover / k);
    const double threshold = 0.5 * k * delta * delta;

    if (sup_lb >= threshold * (1.0 - 1e-12)) ++report.hypothesis_met;
    if (dist_lb >= delta * (1.0 + 1e-9)) {
      ++report.dist_exceeded;
      min_margin = std::min(min_margin, sup_ub - threshold);
      if (sup_ub < threshold * (1.0 - 1e-12)) ++report.violations;
    }
  }
  report.min_margin = std::isfinite(min_margin) ? min_margin : 0.0;
  return report;
}

}  // namespace argmin
