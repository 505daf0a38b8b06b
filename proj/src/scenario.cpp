#include "argmin/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "argmin/errors.hpp"
#include "argmin/math.hpp"

namespace argmin {

namespace {

constexpr std::uint64_t kDesignStream = 0xde5160f1u;
constexpr std::uint64_t kSupportStream = 0x5a9b0c7du;
constexpr int kPseudoSupport = 4096;
constexpr double kPi = 3.14159265358979323846;

ErrorDistribution make_normal() {
  ErrorDistribution d;
  d.name = "normal";
  d.sample = [](Rng& rng) { return rng.normal(); };
  d.pdf = [](double x) { return normal_pdf(x); };
  d.cdf = [](double x) { return normal_cdf(x); };
  d.quantile = [](double p) { return normal_quantile(p); };
  d.mean_abs = std::sqrt(2.0 / kPi);
  return d;
}

ErrorDistribution make_laplace() {
  // Scale 1/sqrt(2) gives unit variance.
  const double b = 1.0 / std::sqrt(2.0);
  ErrorDistribution d;
  d.name = "double_exponential";
  d.sample = [](Rng& rng) { return rng.laplace_unit(); };
  d.pdf = [b](double x) { return std::exp(-std::abs(x) / b) / (2.0 * b); };
  d.cdf = [b](double x) {
    return x < 0.0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
  };
  d.quantile = [b](double p) {
    return p < 0.5 ? b * std::log(2.0 * p) : -b * std::log(2.0 * (1.0 - p));
  };
  d.mean_abs = b;
  return d;
}

ErrorDistribution make_t(int df) {
  if (df < 3) throw std::invalid_argument("t errors need df >= 3");
  const double s = std::sqrt((df - 2.0) / df);  // variance-one rescale
  const double logc = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                      0.5 * std::log(df * kPi);
  auto raw_pdf = [df, logc](double t) {
    return std::exp(logc - 0.5 * (df + 1.0) * std::log1p(t * t / df));
  };
  ErrorDistribution d;
  d.name = "t";
  d.sample = [df](Rng& rng) { return rng.student_t_unit(df); };
  d.pdf = [s, raw_pdf](double x) { return raw_pdf(x / s) / s; };
  d.cdf = [s, raw_pdf](double x) {
    const double t = std::abs(x) / s;
    const double tail =
        0.5 - integrate([&](double u) { return raw_pdf(u); }, 0.0, t, 1e-12);
    return x < 0.0 ? tail : 1.0 - tail;
  };
  d.quantile = [d](double p) {
    double lo = -60.0, hi = 60.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (d.cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  d.mean_abs = integrate([d](double x) { return 2.0 * x * d.pdf(x); }, 0.0,
                         60.0, 1e-12);
  return d;
}

}  // namespace

ErrorDistribution make_error(const std::string& name, int t_df) {
  if (name == "normal") return make_normal();
  if (name == "double_exponential") return make_laplace();
  if (name == "t") return make_t(t_df);
  throw DataError("unknown error distribution: " + name);
}

bool ScenarioConfig::misspecified() const {
  switch (model) {
    case ModelTag::Ols:
    case ModelTag::Lad:
      return mean_fn != "linear" || sigma_fn != "constant";
    case ModelTag::Logistic:
    case ModelTag::LogisticAgnostic:
      return binary_q != "logistic";
    default:
      return false;
  }
}

void ScenarioConfig::validate() const {
  if (n < 1) throw DataError("n must be positive");
  if (R < 100) throw DataError("replication count must be at least 100");
  const bool location = model == ModelTag::Quantile ||
                        model == ModelTag::LAlpha ||
                        model == ModelTag::DoubleExponential;
  const bool markov = model == ModelTag::MarkovPl;
  if (!location && !markov) {
    const int p = design.columns();
    if (p < 1) throw DataError("design has no columns");
    if (n < 4L * p) throw DataError("n must be at least 4x the parameter count");
    if (static_cast<int>(beta0.size()) != p)
      throw DataError("beta0 length does not match design columns");
  }
  if (model == ModelTag::Quantile &&
      (quantile_p <= 0.0 || quantile_p >= 1.0))
    throw DataError("quantile level must lie in (0,1)");
  if (model == ModelTag::LAlpha && alpha < 1.0)
    throw DataError("power must be at least 1");
  if (markov) {
    if (markov_k < 2) throw DataError("state count must be at least 2");
    if (beta0.size() != 1) throw DataError("markov model has one parameter");
    if (n < 3) throw DataError("path too short");
  }
  if (model == ModelTag::Cox && design.intercept)
    throw DataError("intercept is not identifiable in the partial likelihood");
  if (mean_fn != "linear" && mean_fn != "square")
    throw DataError("unknown mean function: " + mean_fn);
  if (sigma_fn != "constant" && sigma_fn != "one_plus_half_xsq")
    throw DataError("unknown noise scale: " + sigma_fn);
  if (binary_q != "logistic" && binary_q != "skewed_three")
    throw DataError("unknown success-probability menu: " + binary_q);
  if (sigma_scale < 0.0) throw DataError("sigma_scale must be non-negative");
  if (censor_target < 0.0 || censor_target >= 1.0)
    throw DataError("censoring target must lie in [0,1)");
  if (design.menu != "gaussian" && design.menu != "uniform" &&
      design.menu != "two_point" && design.menu != "three_point" &&
      design.menu != "binary" && design.menu != "intercept_only" &&
      design.menu != "fixed")
    throw DataError("unknown design menu: " + design.menu);
  if (design.menu == "intercept_only" &&
      (design.covariates != 0 || !design.intercept))
    throw DataError("intercept_only design has exactly one constant column");
  if (design.menu == "fixed" && design.fixed.size() == 0)
    throw DataError("fixed design requires a matrix");
  make_error(error_dist, t_df);  // rejects unknown menus
}

namespace {

VectorXd with_intercept(const DesignSpec& spec, const VectorXd& covs) {
  VectorXd row(spec.columns());
  int at = 0;
  if (spec.intercept) row(at++) = 1.0;
  for (int j = 0; j < covs.size(); ++j) row(at++) = covs(j);
  return row;
}

VectorXd draw_covariates(const DesignSpec& spec, Rng& rng) {
  VectorXd covs(spec.covariates);
  for (int j = 0; j < spec.covariates; ++j) {
    if (spec.menu == "gaussian") {
      covs(j) = rng.normal();
    } else if (spec.menu == "uniform") {
      covs(j) = 2.0 * rng.uniform() - 1.0;
    } else if (spec.menu == "two_point") {
      covs(j) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    } else if (spec.menu == "three_point") {
      covs(j) = static_cast<double>(rng.below(3)) - 1.0;
    } else if (spec.menu == "binary") {
      covs(j) = rng.uniform() < 0.5 ? 1.0 : 0.0;
    } else {
      throw std::logic_error("draw_covariates: menu has no sampler");
    }
  }
  return covs;
}

std::vector<double> menu_levels(const std::string& menu) {
  if (menu == "two_point") return {-1.0, 1.0};
  if (menu == "three_point") return {-1.0, 0.0, 1.0};
  if (menu == "binary") return {0.0, 1.0};
  return {};
}

}  // namespace

DesignSupport design_support(const DesignSpec& spec, long n,
                             std::uint64_t base_seed) {
  DesignSupport out;
  if (spec.menu == "fixed") {
    const long m = spec.fixed.rows();
    for (long i = 0; i < m; ++i) {
      out.weight.push_back(1.0 / static_cast<double>(m));
      out.row.push_back(with_intercept(spec, spec.fixed.row(i).transpose()));
    }
    return out;
  }
  if (spec.menu == "intercept_only") {
    out.weight = {1.0};
    out.row = {VectorXd::Ones(1)};
    return out;
  }
  if (spec.fixed_across_reps) {
    // The realized design is the population here; expectations are exact
    // sums over its rows.
    Rng design_rng(mix_seed(base_seed, kDesignStream));
    for (long i = 0; i < n; ++i) {
      out.weight.push_back(1.0 / static_cast<double>(n));
      out.row.push_back(with_intercept(spec, draw_covariates(spec, design_rng)));
    }
    return out;
  }
  const std::vector<double> levels = menu_levels(spec.menu);
  if (!levels.empty()) {
    const int k = static_cast<int>(levels.size());
    long combos = 1;
    for (int j = 0; j < spec.covariates; ++j) {
      combos *= k;
      if (combos > 4096) throw DataError("discrete design support too large");
    }
    for (long c = 0; c < combos; ++c) {
      VectorXd covs(spec.covariates);
      long rem = c;
      for (int j = 0; j < spec.covariates; ++j) {
        covs(j) = levels[rem % k];
        rem /= k;
      }
      out.weight.push_back(1.0 / static_cast<double>(combos));
      out.row.push_back(with_intercept(spec, covs));
    }
    return out;
  }
  // Continuous menu: deterministic pseudo-support.
  Rng rng(mix_seed(base_seed, kSupportStream));
  for (int i = 0; i < kPseudoSupport; ++i) {
    out.weight.push_back(1.0 / kPseudoSupport);
    out.row.push_back(with_intercept(spec, draw_covariates(spec, rng)));
  }
  return out;
}

MatrixXd realize_design(const ScenarioConfig& config, Rng& rep_rng) {
  const DesignSpec& spec = config.design;
  const int p = spec.columns();
  MatrixXd X(config.n, p);
  if (spec.menu == "fixed") {
    if (spec.fixed.rows() != config.n)
      throw DataError("fixed design row count must equal n");
    for (long i = 0; i < config.n; ++i)
      X.row(i) = with_intercept(spec, spec.fixed.row(i).transpose()).transpose();
    return X;
  }
  if (spec.menu == "intercept_only") {
    X.setOnes();
    return X;
  }
  if (spec.fixed_across_reps) {
    Rng design_rng(mix_seed(config.base_seed, kDesignStream));
    for (long i = 0; i < config.n; ++i)
      X.row(i) =
          with_intercept(spec, draw_covariates(spec, design_rng)).transpose();
    return X;
  }
  for (long i = 0; i < config.n; ++i)
    X.row(i) = with_intercept(spec, draw_covariates(spec, rep_rng)).transpose();
  return X;
}

double mean_value(const ScenarioConfig& config, const VectorXd& row) {
  if (config.mean_fn == "linear") return config.beta0.dot(row);
  // "square": the first non-intercept covariate, squared.
  const int j = config.design.intercept ? 1 : 0;
  if (row.size() <= j) throw DataError("square mean needs a covariate");
  return row(j) * row(j);
}

double sigma_value(const ScenarioConfig& config, const VectorXd& row) {
  if (config.sigma_fn == "constant") return config.sigma_scale;
  const int j = config.design.intercept ? 1 : 0;
  if (row.size() <= j) throw DataError("covariate noise scale needs a covariate");
  return config.sigma_scale * (1.0 + 0.5 * row(j) * row(j));
}

double binary_prob(const ScenarioConfig& config, const VectorXd& row) {
  if (config.binary_q == "logistic") return logistic(config.beta0.dot(row));
  // "skewed_three": three-level covariate mapped to {0.2, 0.5, 0.9}.
  const int j = config.design.intercept ? 1 : 0;
  if (row.size() <= j) throw DataError("skewed_three needs a covariate");
  const double x = row(j);
  if (x == -1.0) return 0.2;
  if (x == 0.0) return 0.5;
  if (x == 1.0) return 0.9;
  throw DataError("skewed_three requires a three-level covariate");
}

}  // namespace argmin
