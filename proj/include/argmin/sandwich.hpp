#ifndef ARGMIN_SANDWICH_HPP
#define ARGMIN_SANDWICH_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "argmin/dataset.hpp"
#include "argmin/errors.hpp"
#include "argmin/estimators.hpp"

namespace argmin {

// Unnormalised information pieces: outer J, middle K plus misspecification
// piece L.  assemble() returns J^{-1}(K+L)J^{-1}, which estimates the
// covariance of the fitted parameter.
struct SandwichCovariance {
  MatrixXd J;
  MatrixXd K;
  MatrixXd L;
  long n = 0;
  ModelTag model = ModelTag::Ols;
  std::vector<std::pair<std::string, double>> meta;  // bandwidths etc.

  MatrixXd assemble() const;
};

// Model-specific plug-in pieces at beta_hat.  Under-model tags reuse the
// information for K; the *_agnostic tags use squared-residual middles.
SandwichCovariance sandwich_for(ModelTag tag, const Dataset& data, const VectorXd& beta_hat,
                                const FitParams& params = {});

// Gaussian-kernel density estimate at a point with the n^{-1/5} reference
// bandwidth 1.06 sd n^{-1/5}; used for density-at-zero plug-ins.
double kde_at(const VectorXd& sample, double point);

}  // namespace argmin

#endif
