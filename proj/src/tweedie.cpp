#include "tcs/tweedie.hpp"

#include <cmath>
#include <sstream>

namespace tcs::tweedie {
namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

void check_power(double p) {
  if (!admissible_power(p))
    throw DomainError("power parameter p = " + num(p) +
                      " outside (-inf, 0] U [1, inf)");
}

}  // namespace

bool admissible_power(double p) noexcept {
  return std::isfinite(p) && (p <= 0.0 || p >= 1.0);
}

double alpha_of(double p) {
  if (p == 1.0) throw UnsupportedPower("alpha is undefined at p = 1");
  return (2.0 - p) / (1.0 - p);
}

void check_theta(double p, double theta) {
  check_power(p);
  if (!std::isfinite(theta))
    throw DomainError("theta must be finite, got " + num(theta));
  if (p == 1.0) return;
  if (p == 2.0) {
    if (!(theta < 0.0))
      throw DomainError("p = 2 requires theta < 0, got " + num(theta));
    return;
  }
  // sign(theta) = sign(alpha - 1) and alpha - 1 = 1 / (1 - p).
  const bool ok = p < 1.0 ? theta > 0.0 : theta < 0.0;
  if (!ok)
    throw DomainError("theta = " + num(theta) + " has the wrong sign for p = " +
                      num(p));
}

Params make_params(double p, double theta, double lambda) {
  check_theta(p, theta);
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("index parameter lambda must be positive, got " +
                      num(lambda));
  return Params{p, theta, lambda};
}

double cumulant(double p, double theta) {
  check_theta(p, theta);
  if (p == 1.0) return std::exp(theta);
  if (p == 2.0) return -std::log(-theta);
  const double alpha = alpha_of(p);
  return (alpha - 1.0) / alpha * std::pow(theta / (alpha - 1.0), alpha);
}

Moments moments(const Params& x) {
  if (x.p == 1.0) {
    const double m = x.lambda * std::exp(x.theta);
    return {m, m, m};
  }
  const double alpha = alpha_of(x.p);
  const double base = x.theta / (alpha - 1.0);
  return {x.lambda * std::pow(base, alpha - 1.0),
          x.lambda * std::pow(base, alpha - 2.0),
          x.lambda * std::pow(base, alpha)};
}

MeanCov to_mean_cov(const Params& x) {
  const Moments m = moments(x);
  return {m.mean, 1.0 / m.inv_sq_cov};
}

Params from_mean_cov(double p, const MeanCov& mc, double poisson_tol) {
  check_power(p);
  if (!(mc.mean > 0.0) || !std::isfinite(mc.mean))
    throw DomainError("mean must be positive, got " + num(mc.mean));
  if (!(mc.nu > 0.0) || !std::isfinite(mc.nu))
    throw DomainError("squared CoV must be positive, got " + num(mc.nu));
  if (p == 1.0) {
    if (!close_rel(mc.mean * mc.nu, 1.0, poisson_tol))
      throw DomainError("p = 1 requires nu = 1 / mean (mean " + num(mc.mean) +
                        ", nu " + num(mc.nu) + ")");
    return Params{1.0, 0.0, mc.mean};
  }
  const double alpha = alpha_of(p);
  return Params{p, (alpha - 1.0) / (mc.mean * mc.nu),
                std::pow(mc.mean, alpha) * std::pow(mc.nu, alpha - 1.0)};
}

Params scale(double k, const Params& x) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw DomainError("scale factor must be positive, got " + num(k));
  if (x.p == 1.0)
    throw UnsupportedPower("a scaled Poisson variate is not Tw*_1");
  return Params{x.p, x.theta / k, x.lambda * std::pow(k, alpha_of(x.p))};
}

Params add(const Params& a, const Params& b, double theta_tol) {
  if (a.p != b.p)
    throw IncompatibleSummands("power parameters differ: " + num(a.p) +
                               " vs " + num(b.p));
  if (a.theta != b.theta && !close_rel(a.theta, b.theta, theta_tol))
    throw IncompatibleSummands("canonical parameters differ: " + num(a.theta) +
                               " vs " + num(b.theta));
  return Params{a.p, a.theta, a.lambda + b.lambda};
}

double cgf(const Params& x, double t) {
  return x.lambda * (cumulant(x.p, x.theta + t) - cumulant(x.p, x.theta));
}

Sampler::Sampler(const Params& x) {
  check_theta(x.p, x.theta);
  const Moments m = moments(x);
  if (x.p == 0.0) {
    route_ = Route::normal;
    a_ = m.mean;
    b_ = std::sqrt(m.variance);
  } else if (x.p == 1.0) {
    route_ = Route::poisson;
    a_ = m.mean;
  } else if (x.p > 1.0 && x.p < 2.0) {
    route_ = Route::compound;
    const double p = x.p;
    const double phi = m.variance / std::pow(m.mean, p);
    a_ = std::pow(m.mean, 2.0 - p) / (phi * (2.0 - p));
    b_ = (2.0 - p) / (p - 1.0);
    c_ = phi * (p - 1.0) * std::pow(m.mean, p - 1.0);
  } else if (x.p == 2.0) {
    route_ = Route::gamma;
    a_ = x.lambda;
    b_ = -1.0 / x.theta;
  } else {
    throw UnsupportedPower("sampling is not available for p = " + num(x.p));
  }
}

double Sampler::poisson_mean() const noexcept {
  return route_ == Route::poisson || route_ == Route::compound ? a_ : 0.0;
}

double Sampler::zero_probability() const noexcept {
  return route_ == Route::poisson || route_ == Route::compound ? std::exp(-a_)
                                                               : 0.0;
}

}  // namespace tcs::tweedie
