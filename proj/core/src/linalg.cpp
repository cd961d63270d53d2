#include "fasbeam/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace fasbeam {

double off_diagonal_norm(const RealMatrix& a) {
  double sum = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (r != c) sum += a(r, c) * a(r, c);
  return std::sqrt(sum);
}

SymmetricEigen jacobi_eigen(const RealMatrix& input, double tol, int max_sweeps) {
  const std::size_t n = input.rows();
  RealMatrix a = input;
  RealMatrix v = RealMatrix::identity(n);
  int sweep = 0;
  for (; sweep < max_sweeps && off_diagonal_norm(a) >= tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p, q) (Golub & Van Loan 8.5.2).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  SymmetricEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  out.vectors = std::move(v);
  out.sweeps = sweep;
  return out;
}

double max_abs(const ComplexMatrix& a) {
  double m = 0.0;
  for (const auto& x : a.data()) m = std::max(m, std::abs(x));
  return m;
}

std::optional<ComplexMatrix> solve(const ComplexMatrix& a_in, const ComplexMatrix& b_in,
                                   double rank_tol) {
  const std::size_t n = a_in.rows();
  ComplexMatrix a = a_in;
  ComplexMatrix b = b_in;
  const double threshold = rank_tol * max_abs(a_in);
  if (threshold == 0.0 && n > 0) return std::nullopt;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) <= threshold) return std::nullopt;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      for (std::size_t c = 0; c < b.cols(); ++c) std::swap(b(col, c), b(pivot, c));
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex f = a(r, col) / a(col, col);
      if (f == Complex{}) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      for (std::size_t c = 0; c < b.cols(); ++c) b(r, c) -= f * b(col, c);
    }
  }
  ComplexMatrix x(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t r = n; r-- > 0;) {
      Complex acc = b(r, c);
      for (std::size_t k = r + 1; k < n; ++k) acc -= a(r, k) * x(k, c);
      x(r, c) = acc / a(r, r);
    }
  }
  return x;
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex ark = a(r, k);
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

ComplexMatrix conj_transpose(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = std::conj(a(r, c));
  return out;
}

}  // namespace fasbeam
