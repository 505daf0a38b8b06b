#include "argmin/dataset.hpp"

#include <cmath>

#include "argmin/errors.hpp"

namespace argmin {

std::string model_name(ModelTag tag) {
  switch (tag) {
    case ModelTag::Quantile: return "quantile";
    case ModelTag::LAlpha: return "l_alpha";
    case ModelTag::Ols: return "ols";
    case ModelTag::Lad: return "lad";
    case ModelTag::Logistic: return "logistic";
    case ModelTag::LogisticAgnostic: return "logistic_agnostic";
    case ModelTag::Poisson: return "poisson";
    case ModelTag::PoissonAgnostic: return "poisson_agnostic";
    case ModelTag::Cox: return "cox";
    case ModelTag::ExpHazard: return "exp_hazard";
    case ModelTag::DoubleExponential: return "double_exponential";
    case ModelTag::MarkovPl: return "markov_pl";
  }
  return "unknown";
}

ModelTag model_from_name(const std::string& name) {
  if (name == "quantile" || name == "median") return ModelTag::Quantile;
  if (name == "l_alpha") return ModelTag::LAlpha;
  if (name == "ols") return ModelTag::Ols;
  if (name == "lad") return ModelTag::Lad;
  if (name == "logistic") return ModelTag::Logistic;
  if (name == "logistic_agnostic") return ModelTag::LogisticAgnostic;
  if (name == "poisson") return ModelTag::Poisson;
  if (name == "poisson_agnostic") return ModelTag::PoissonAgnostic;
  if (name == "cox") return ModelTag::Cox;
  if (name == "exp_hazard") return ModelTag::ExpHazard;
  if (name == "double_exponential") return ModelTag::DoubleExponential;
  if (name == "markov_pl") return ModelTag::MarkovPl;
  throw DataError("unknown model '" + name + "'");
}

long Dataset::n() const {
  if (kind == ResponseKind::MarkovPath) return static_cast<long>(path.size());
  if (kind == ResponseKind::Survival) return time.size();
  return y.size();
}

void Dataset::validate() const {
  switch (kind) {
    case ResponseKind::Continuous:
    case ResponseKind::Binary:
    case ResponseKind::Count: {
      if (y.size() == 0) throw DataError("empty response");
      if (!y.allFinite()) throw DataError("non-finite response value");
      if (X.size() > 0) {
        if (X.rows() != y.size()) throw DataError("design and response row counts differ");
        if (!X.allFinite()) throw DataError("non-finite design value");
        if (X.rows() < X.cols()) throw DataError("fewer rows than covariates");
      }
      if (kind == ResponseKind::Binary)
        for (long i = 0; i < y.size(); ++i)
          if (y[i] != 0.0 && y[i] != 1.0) throw DataError("binary response outside {0,1}");
      if (kind == ResponseKind::Count)
        for (long i = 0; i < y.size(); ++i)
          if (y[i] < 0.0 || y[i] != std::floor(y[i]))
            throw DataError("count response must be a nonnegative integer");
      break;
    }
    case ResponseKind::Survival: {
      if (time.size() == 0) throw DataError("empty survival data");
      if (!time.allFinite() || !X.allFinite()) throw DataError("non-finite survival value");
      if (time.size() != event.size() || time.size() != X.rows())
        throw DataError("survival columns have mismatched lengths");
      for (long i = 0; i < time.size(); ++i) {
        if (!(time[i] > 0.0)) throw DataError("survival times must be positive");
        if (event[i] != 0 && event[i] != 1) throw DataError("event flag outside {0,1}");
      }
      if (X.rows() < X.cols()) throw DataError("fewer rows than covariates");
      break;
    }
    case ResponseKind::MarkovPath: {
      if (k < 2) throw DataError("Markov state count must be at least 2");
      if (path.empty()) throw DataError("empty path");
      for (int s : path)
        if (s < 1 || s > k) throw DataError("path state outside 1..k");
      break;
    }
  }
}

Dataset Dataset::continuous(MatrixXd X, VectorXd y) {
  Dataset d;
  d.kind = ResponseKind::Continuous;
  d.X = std::move(X);
  d.y = std::move(y);
  d.validate();
  return d;
}

Dataset Dataset::binary(MatrixXd X, VectorXd y) {
  Dataset d;
  d.kind = ResponseKind::Binary;
  d.X = std::move(X);
  d.y = std::move(y);
  d.validate();
  return d;
}

Dataset Dataset::count(MatrixXd X, VectorXd y) {
  Dataset d;
  d.kind = ResponseKind::Count;
  d.X = std::move(X);
  d.y = std::move(y);
  d.validate();
  return d;
}

Dataset Dataset::survival(MatrixXd X, VectorXd time, VectorXi event) {
  Dataset d;
  d.kind = ResponseKind::Survival;
  d.X = std::move(X);
  d.time = std::move(time);
  d.event = std::move(event);
  d.validate();
  return d;
}

Dataset Dataset::markov(std::vector<int> path, int k) {
  Dataset d;
  d.kind = ResponseKind::MarkovPath;
  d.path = std::move(path);
  d.k = k;
  d.validate();
  return d;
}

}  // namespace argmin
