#ifndef ARGMIN_RNG_HPP
#define ARGMIN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace argmin {

// splitmix64 step; used to derive per-replication seeds so that streams are
// reproducible for any worker count.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base;
  std::uint64_t a = splitmix64(s);
  s = a ^ (stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
  return splitmix64(s);
}

// All sampling is written out here rather than taken from <random>'s
// distributions so results are bit-identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on (0,1), never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Marsaglia polar method with one cached variate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

  bool bernoulli(double q) { return uniform() < q; }

  // Unit-variance double exponential (scale 1/sqrt(2)).
  double laplace_unit() {
    double e = exponential() * 0.7071067811865476;
    return bernoulli(0.5) ? e : -e;
  }

  // Student t with integer df, scaled to unit variance (df > 2).
  double student_t_unit(int df) {
    double z = normal();
    double chi2 = 0.0;
    for (int i = 0; i < df; ++i) {
      double g = normal();
      chi2 += g * g;
    }
    double t = z / std::sqrt(chi2 / df);
    return t * std::sqrt((df - 2.0) / df);
  }

  // Exact Poisson; product method, halving mean recursively to stay stable.
  long poisson(double mu) {
    if (mu <= 0.0) return 0;
    if (mu > 30.0) return poisson(0.5 * mu) + poisson(mu - 0.5 * mu);
    double limit = std::exp(-mu), prod = uniform();
    long k = 0;
    while (prod > limit) {
      prod *= uniform();
      ++k;
    }
    return k;
  }

  // Uniform integer in [0, m).
  std::uint64_t below(std::uint64_t m) {
    std::uint64_t threshold = (-m) % m;
    for (;;) {
      std::uint64_t r = eng_();
      if (r >= threshold) return r % m;
    }
  }

private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace argmin

#endif
