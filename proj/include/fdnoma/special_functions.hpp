#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdnoma {

/// Neumaier-compensated sum, accumulated from the largest magnitude down so
/// alternating binomial expansions lose as little as possible.
inline long double compensated_sum(std::vector<long double> terms) {
  std::sort(terms.begin(), terms.end(), [](long double a, long double b) { return std::fabs(a) > std::fabs(b); });
  long double sum = 0.0L;
  long double carry = 0.0L;
  for (long double t : terms) {
    const long double next = sum + t;
    if (std::fabs(sum) >= std::fabs(t))
      carry += (sum - next) + t;
    else
      carry += (t - next) + sum;
    sum = next;
  }
  return sum + carry;
}

inline long double factorial(int n) {
  long double f = 1.0L;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

inline long double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  k = std::min(k, n - k);
  long double b = 1.0L;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return std::round(b);
}

/// Upper incomplete gamma Gamma(j, x) for integer order j >= 0.
///
/// j >= 1 uses the exact finite sum (j-1)! e^{-x} sum_{k<j} x^k/k!;
/// j == 0 is the exponential integral E1(x).
template <class T = double>
T upper_incomplete_gamma_int(int j, T x) {
  if (j < 0) throw std::domain_error("upper_incomplete_gamma_int: order must be >= 0, got " + std::to_string(j));
  if (!(x > 0)) throw std::domain_error("upper_incomplete_gamma_int: argument must be > 0");
  if (j == 0) return -std::expint(-x);
  long double term = 1.0L;
  long double series = 1.0L;
  const long double lx = x;
  for (int k = 1; k < j; ++k) {
    term *= lx / k;
    series += term;
  }
  return static_cast<T>(factorial(j - 1) * std::exp(-lx) * series);
}

}  // namespace fdnoma
