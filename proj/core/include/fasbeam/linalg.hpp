#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fasbeam {

using Complex = std::complex<double>;

// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;

struct SymmetricEigen {
  std::vector<double> values;  // unsorted, paired with columns of vectors
  RealMatrix vectors;          // orthogonal, column j is the j-th eigenvector
  int sweeps = 0;
};

// Cyclic Jacobi rotations on a real symmetric matrix. Iterates until the
// off-diagonal Frobenius norm drops below `tol` (or `max_sweeps` sweeps).
SymmetricEigen jacobi_eigen(const RealMatrix& a, double tol = 1e-12, int max_sweeps = 100);

double off_diagonal_norm(const RealMatrix& a);

// Solves A X = B by Gaussian elimination with partial (column) pivoting.
// Returns nullopt when a pivot falls below rank_tol * max|A|.
std::optional<ComplexMatrix> solve(const ComplexMatrix& a, const ComplexMatrix& b,
                                   double rank_tol = 1e-12);

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix conj_transpose(const ComplexMatrix& a);

double max_abs(const ComplexMatrix& a);

}  // namespace fasbeam
