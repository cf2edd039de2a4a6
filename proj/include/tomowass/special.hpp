#pragma once

// Overflow-safe special functions used by the Fock-basis constructions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tomowass::special {

inline double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

/// ln((2n)! / (2^n n!)), i.e. ln((2n-1)!!).
inline double log_double_factorial_odd(int n) {
  return log_factorial(2 * n) - n * std::numbers::ln2 - log_factorial(n);
}

/// Legendre polynomial P_m(x) by the Bonnet recurrence.
inline double legendre(int m, double x) {
  if (m == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < m; ++k) {
    const double next = ((2 * k + 1) * x * cur - k * prev) / (k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// ln cosh(x) without overflow for large |x|.
inline double log_cosh(double x) {
  const double a = std::abs(x);
  if (a < 20.0) return std::log(std::cosh(a));
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

/// ln sinh(x) for x > 0.
inline double log_sinh(double x) {
  if (x < 20.0) return std::log(std::sinh(x));
  return x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2;
}

/// ln(exp(a) + exp(b)).
inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// n * ln(t) with the 0 * ln(0) = 0 convention.
inline double n_log(int n, double log_t) { return n == 0 ? 0.0 : n * log_t; }

}  // namespace tomowass::special
