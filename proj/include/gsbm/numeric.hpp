#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace gsbm {

// Neumaier-compensated running sum.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  KahanSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Accumulates sum_i sign_i * exp(log_abs_i) without overflow or underflow of
// the individual terms. The result is rescaled only once, on read.
class SignedLogAccumulator {
 public:
  void add(double log_abs, int sign) {
    if (sign == 0 || log_abs == -std::numeric_limits<double>::infinity()) return;
    if (std::isinf(log_abs) && log_abs > 0) {
      infinite_ = true;
      return;
    }
    if (log_abs > scale_) {
      const double r = std::exp(scale_ - log_abs);
      pos_ = rescaled(pos_, r);
      neg_ = rescaled(neg_, r);
      scale_ = log_abs;
    }
    const double term = std::exp(log_abs - scale_);
    (sign > 0 ? pos_ : neg_).add(term);
  }

  // Adds w * v where log_w is the log of a nonnegative weight.
  void add_weighted(double log_w, double v) {
    if (v == 0.0) return;
    add(log_w + std::log(std::abs(v)), v > 0 ? 1 : -1);
  }

  double value() const {
    if (infinite_) return std::numeric_limits<double>::infinity();
    if (scale_ == -std::numeric_limits<double>::infinity()) return 0.0;
    return (pos_.value() - neg_.value()) * std::exp(scale_);
  }

 private:
  static KahanSum rescaled(const KahanSum& s, double r) {
    KahanSum out;
    out.add(s.value() * r);
    return out;
  }

  double scale_ = -std::numeric_limits<double>::infinity();
  KahanSum pos_;
  KahanSum neg_;
  bool infinite_ = false;
};

inline double log_factorial(double n) { return std::lgamma(n + 1.0); }

inline double log_binomial(double n, double r) {
  return log_factorial(n) - log_factorial(r) - log_factorial(n - r);
}

// Exact for the small arguments used here (result below 2^53).
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  if (r > n - r) r = n - r;
  std::uint64_t out = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    out = out / i * (n - r + i) + out % i * (n - r + i) / i;
  }
  return out;
}

inline std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

inline double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace gsbm
