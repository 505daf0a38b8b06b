#ifndef ARGMIN_MATH_HPP
#define ARGMIN_MATH_HPP

#include <cmath>
#include <functional>

namespace argmin {

// log(1 + e^u) without overflow for large |u|.
inline double log1pexp(double u) {
  if (u > 0.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

inline double logistic(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  double e = std::exp(u);
  return e / (1.0 + e);
}

inline double logit(double q) { return std::log(q) - std::log1p(-q); }

inline double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014327;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865476);
}

// Inverse standard normal cdf, rational approximation refined by one Halley
// step against erfc; accurate to ~1e-15 on (0,1).
double normal_quantile(double p);

// Adaptive Simpson on [a,b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12, int max_depth = 50);

// E|Y|^c for standard normal Y and c > -1, by quadrature with a power
// substitution that removes the origin singularity for c < 0.
double normal_abs_moment(double c);

}  // namespace argmin

#endif
