#ifndef ARGMIN_DATASET_HPP
#define ARGMIN_DATASET_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace argmin {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

enum class ResponseKind { Continuous, Binary, Count, Survival, MarkovPath };

enum class ModelTag {
  Quantile,
  LAlpha,
  Ols,
  Lad,
  Logistic,
  LogisticAgnostic,
  Poisson,
  PoissonAgnostic,
  Cox,
  ExpHazard,
  DoubleExponential,
  MarkovPl,
};

std::string model_name(ModelTag tag);
ModelTag model_from_name(const std::string& name);

// One rectangular sample.  X may have zero columns for pure location models.
// Survival data uses time/event; Markov paths live in `path` with states
// numbered 1..k.  validate() enforces finiteness and shape rules and throws
// DataError otherwise.
struct Dataset {
  ResponseKind kind = ResponseKind::Continuous;
  MatrixXd X;        // n x p design (covariates for survival models)
  VectorXd y;        // response for continuous / binary / count
  VectorXd time;     // survival exit times, > 0
  VectorXi event;    // 1 = observed failure, 0 = censored
  std::vector<int> path;  // Markov path, states in 1..k
  int k = 0;              // Markov state count

  long n() const;
  void validate() const;

  static Dataset continuous(MatrixXd X, VectorXd y);
  static Dataset binary(MatrixXd X, VectorXd y);
  static Dataset count(MatrixXd X, VectorXd y);
  static Dataset survival(MatrixXd X, VectorXd time, VectorXi event);
  static Dataset markov(std::vector<int> path, int k);
};

}  // namespace argmin

#endif
