#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fasbeam/linalg.hpp"

// Reverse-mode differentiation over dense row-major double matrices. A tensor
// produced by an operator on at least one grad-requiring input records a tape
// node (operator name, inputs, saved activations); backward() replays those
// nodes in reverse topological order.
namespace fasbeam::ad {

namespace detail {
struct TensorImpl;
struct Node;
struct Access;
}  // namespace detail

class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, bool requires_grad = false);
  static Tensor from(std::size_t rows, std::size_t cols, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor from(const RealMatrix& m, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  std::size_t rows() const;
  std::size_t cols() const;
  std::size_t size() const;
  std::array<std::size_t, 2> shape() const { return {rows(), cols()}; }

  std::span<const double> data() const;
  // Mutable access is meant for leaves (parameters, inputs); editing a value
  // that a recorded node saved invalidates that node's backward.
  std::span<double> mutable_data();
  double operator()(std::size_t r, std::size_t c) const { return data()[r * cols() + c]; }
  double item() const;

  bool requires_grad() const;
  void set_requires_grad(bool on);
  // Empty span when the tensor does not require grad.
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  // Name of the operator that produced this tensor, "leaf" otherwise.
  const char* op() const;
  bool is_leaf() const;

  RealMatrix to_matrix() const;
  Tensor detach() const;  // copy of the value, no history

 private:
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<detail::TensorImpl> impl_;

  friend struct detail::Access;
};

// Disables tape recording on this thread for the guard's lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Populates grad of every grad-requiring tensor reachable from `loss`.
// Leaf gradients accumulate across calls until zero_grad(); intermediate
// gradients are recomputed on every call. Throws InputError unless loss is 1x1.
void backward(const Tensor& loss);

Tensor matmul(const Tensor& a, const Tensor& b);
// X + b with b (1 x cols) broadcast over rows.
Tensor add_bias(const Tensor& x, const Tensor& bias);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& x, double c);
Tensor add_scalar(const Tensor& x, double c);
Tensor relu(const Tensor& x);
Tensor log2(const Tensor& x);
Tensor sum(const Tensor& x);   // 1 x 1
Tensor mean(const Tensor& x);  // 1 x 1
Tensor row_sum(const Tensor& x);  // rows x 1

// Column-wise maximum over all rows (1 x cols). Gradient goes to the argmax
// row of each column; ties resolve to the lowest row index.
Tensor column_max(const Tensor& x);

// Rows are split into consecutive groups of `group` rows. Output row r of a
// group holds the column-wise max over the other rows of that group, or zeros
// when group == 1. Same tie rule as column_max.
Tensor group_exclusive_max(const Tensor& x, std::size_t group);

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor concat_cols(std::span<const Tensor> parts);

// c * X / ||X||_F, applied independently to consecutive blocks of
// `group_rows` rows (0 = whole tensor). Throws InputError on a zero block.
Tensor frobenius_normalize_scale(const Tensor& x, double c, std::size_t group_rows = 0);

// out[r] = x[r][cols[r]], shape rows x 1.
Tensor select_per_row(const Tensor& x, std::span<const std::size_t> cols);

// Received amplitudes h^H w for paired-real beams. `beams` stacks groups of
// `beams_per_group` rows laid out [Re w (N) | Im w (N)]; `channels` stacks
// groups of `channels_per_group` rows of complex h (N columns); the group
// counts must agree. Output row (g, u) holds [Re a_{u,r} | Im a_{u,r}] for the
// beams r of group g, shape (groups * channels_per_group) x (2 * beams_per_group).
Tensor paired_conj_inner(const Tensor& beams, const ComplexMatrix& channels,
                         std::size_t beams_per_group, std::size_t channels_per_group);

// X (rows x 2c) laid out [Re | Im] -> Re^2 + Im^2 (rows x c).
Tensor square_magnitude_paired(const Tensor& x);

}  // namespace fasbeam::ad
