#pragma once

#include <cmath>
#include <cstdint>

namespace tcs {

// Central moments up to order four with an exact pairwise merge, so sums
// accumulated in independent blocks combine to the same result in any
// fixed merge order.
class RunningMoments {
 public:
  void push(double x) noexcept {
    RunningMoments one;
    one.n_ = 1;
    one.mean_ = x;
    merge(one);
  }

  void merge(const RunningMoments& b) noexcept {
    if (b.n_ == 0) return;
    if (n_ == 0) {
      *this = b;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(b.n_);
    const double n = na + nb;
    const double d = b.mean_ - mean_;
    const double d_n = d / n;
    const double d2 = d * d_n * na * nb;  // d^2 na nb / n

    const double m2 = m2_ + b.m2_ + d2;
    const double m3 = m3_ + b.m3_ + d2 * d_n * (na - nb) +
                      3.0 * d_n * (na * b.m2_ - nb * m2_);
    const double m4 = m4_ + b.m4_ + d2 * d_n * d_n * (na * na - na * nb + nb * nb) +
                      6.0 * d_n * d_n * (na * na * b.m2_ + nb * nb * m2_) +
                      4.0 * d_n * (na * b.m3_ - nb * m3_);
    n_ += b.n_;
    mean_ += d_n * nb;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
  }

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  // Unbiased sample variance.
  double variance() const noexcept {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double central_moment4() const noexcept {
    return n_ > 0 ? m4_ / static_cast<double>(n_) : 0.0;
  }
  double mean_standard_error() const noexcept {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }
  // Large-sample standard error of the variance estimate, sqrt((m4 - s^4)/n).
  double variance_standard_error() const noexcept {
    if (n_ < 2) return 0.0;
    const double s2 = m2_ / static_cast<double>(n_);
    const double excess = central_moment4() - s2 * s2;
    return std::sqrt(std::max(excess, 0.0) / static_cast<double>(n_));
  }

  friend bool operator==(const RunningMoments&, const RunningMoments&) = default;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

}  // namespace tcs
