#include "fasbeam/bessel.hpp"

#include <cmath>
#include <numbers>

namespace fasbeam {
namespace {

// Ascending series, sum_m (-x^2/4)^m / (m!)^2. Terms peak near m = x/2, so
// cancellation stays below ~1e-14 for |x| <= 8.
double j0_series(double x) {
  const double q = -0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Miller's backward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalised by
// J0 + 2 sum_k J_{2k} = 1.
double j0_miller(double x) {
  const int start = 2 * ((static_cast<int>(x) + 40) / 2);
  double next = 0.0;   // J_{n+1}
  double cur = 1e-30;  // J_n
  double even_sum = 0.0;
  for (int n = start; n > 0; --n) {
    const double prev = (2.0 * n / x) * cur - next;
    next = cur;
    cur = prev;
    if ((n - 1) % 2 == 0 && n - 1 > 0) even_sum += cur;
    if (std::abs(cur) > 1e250) {
      next *= 1e-250;
      cur *= 1e-250;
      even_sum *= 1e-250;
    }
  }
  return cur / (cur + 2.0 * even_sum);
}

// Hankel asymptotic expansion, truncated at the smallest term. Good to a few
// ulp once x >= 20.
double j0_asymptotic(double x) {
  double b = 1.0;
  double p = 1.0;
  double q = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double nb = b * (-odd * odd) / (8.0 * k * x);
    if (std::abs(nb) > std::abs(b) || std::abs(nb) < 1e-17) break;
    b = nb;
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * b;
    } else {
      q += sign * b;
    }
  }
  const double chi = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) {
  const double ax = std::abs(x);
  if (ax <= 8.0) return j0_series(ax);
  if (ax < 20.0) return j0_miller(ax);
  return j0_asymptotic(ax);
}

}  // namespace fasbeam
