#pragma once

#include <random>

#include "tcs/error.hpp"

// Additive-form Tweedie family Tw*_p(theta, lambda): cumulant function,
// moments, the (mean, squared CoV) reparameterization, closure under scaling
// and addition, and a sampler for the compound Poisson range.
namespace tcs::tweedie {

inline constexpr double kDefaultThetaTolerance = 1e-9;
inline constexpr double kDefaultPoissonTolerance = 1e-9;

struct Params {
  double p = 2.0;
  double theta = -1.0;
  double lambda = 1.0;

  friend bool operator==(const Params&, const Params&) = default;
};

// Mean and squared coefficient of variation. Variance is mean^2 * nu.
struct MeanCov {
  double mean = 1.0;
  double nu = 1.0;

  double variance() const noexcept { return mean * mean * nu; }

  friend bool operator==(const MeanCov&, const MeanCov&) = default;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double inv_sq_cov = 0.0;
};

// True for p in (-inf, 0] ∪ [1, inf).
bool admissible_power(double p) noexcept;

// alpha = (2 - p) / (1 - p). Throws UnsupportedPower at p = 1.
double alpha_of(double p);

// Throws DomainError unless theta lies in the canonical domain for p:
// sign(theta) = sign(alpha - 1) away from p in {1, 2}, theta < 0 at p = 2.
void check_theta(double p, double theta);

// Validated construction.
Params make_params(double p, double theta, double lambda);

double cumulant(double p, double theta);

Moments moments(const Params& x);

MeanCov to_mean_cov(const Params& x);

// At p = 1 the convention theta = 0, lambda = mean is used, and nu must be
// 1 / mean within `poisson_tol`.
Params from_mean_cov(double p, const MeanCov& mc,
                     double poisson_tol = kDefaultPoissonTolerance);

// Distribution of k * X for X ~ x.
Params scale(double k, const Params& x);

// Distribution of the independent sum A + B; requires equal p and theta.
Params add(const Params& a, const Params& b,
           double theta_tol = kDefaultThetaTolerance);

// Cumulant generating function lambda [b(theta + t) - b(theta)].
double cgf(const Params& x, double t);

// Samples Tw*_p for p = 0 (normal), p = 1 (Poisson), 1 < p < 2 (compound
// Poisson-gamma) and p = 2 (gamma). Construction precomputes the route so a
// sampler can be reused across many draws.
class Sampler {
 public:
  explicit Sampler(const Params& x);

  template <class URBG>
  double operator()(URBG& rng) const {
    switch (route_) {
      case Route::normal: {
        std::normal_distribution<double> d(a_, b_);
        return d(rng);
      }
      case Route::poisson: {
        std::poisson_distribution<long long> d(a_);
        return static_cast<double>(d(rng));
      }
      case Route::gamma: {
        std::gamma_distribution<double> d(a_, b_);
        return d(rng);
      }
      case Route::compound: {
        std::poisson_distribution<long long> count(a_);
        const long long n = count(rng);
        if (n == 0) return 0.0;
        // Sum of n iid Gamma(shape, scale) is Gamma(n * shape, scale).
        std::gamma_distribution<double> d(static_cast<double>(n) * b_, c_);
        return d(rng);
      }
    }
    return 0.0;
  }

  // Poisson mean of the claim count for p = 1 and 1 < p < 2, else 0.
  double poisson_mean() const noexcept;

  // Probability of an exact zero draw.
  double zero_probability() const noexcept;

 private:
  enum class Route { normal, poisson, compound, gamma };
  Route route_ = Route::normal;
  double a_ = 0.0;
  double b_ = 0.0;
  double c_ = 0.0;
};

template <class URBG>
double sample(const Params& x, URBG& rng) {
  return Sampler(x)(rng);
}

}  // namespace tcs::tweedie
