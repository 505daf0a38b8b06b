#include "argmin/math.hpp"

#include <stdexcept>

namespace argmin {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p outside (0,1)");
  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= phigh) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley refinement using the exact cdf.
  double e = normal_cdf(x) - p;
  double u = e / normal_pdf(x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

namespace {

// min_depth forces subdivision before the error test is trusted; otherwise a
// wide interval whose mass sits far from the three probe points looks
// converged at zero on the first call.
double simpson(const std::function<double(double)>& f, double a, double fa, double b,
               double fb, double m, double fm, double whole, double tol, int depth,
               int min_depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || (min_depth <= 0 && std::abs(delta) <= 15.0 * tol))
    return left + right + delta / 15.0;
  return simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, min_depth - 1) +
         simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, min_depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, fa, b, fb, m, fm, whole, tol, max_depth, 8);
}

double normal_abs_moment(double c) {
  if (c <= -1.0) throw std::invalid_argument("normal_abs_moment: c <= -1 diverges");
  // E|Y|^c = 2 int_0^inf y^c phi(y) dy.  Substitute y = u^m with
  // m = max(1, 2/(c+1)) so the integrand is m u^{m(c+1)-1} phi(u^m), bounded
  // near 0 even for negative c.
  double m = std::max(1.0, 2.0 / (c + 1.0));
  double upper = std::pow(42.0, 1.0 / m);  // y = 42 puts phi below 1e-300
  auto g = [c, m](double u) {
    if (u <= 0.0) return 0.0;
    double y = std::pow(u, m);
    return m * std::pow(u, m * (c + 1.0) - 1.0) * normal_pdf(y);
  };
  return 2.0 * integrate(g, 0.0, upper, 1e-13, 60);
}

}  // namespace argmin
