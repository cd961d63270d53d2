#include "fasbeam/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_set>

#include "fasbeam/errors.hpp"

namespace fasbeam::ad {

namespace detail {

struct TensorImpl {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  std::shared_ptr<Node> node;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

using ImplPtr = std::shared_ptr<TensorImpl>;

struct Node {
  const char* op;
  std::vector<ImplPtr> inputs;
  // Reads out.grad and accumulates into the grad of inputs that require it.
  std::function<void(const TensorImpl& out)> backward;
};

struct Access {
  static const ImplPtr& impl(const Tensor& t) { return t.impl_; }
  static Tensor wrap(ImplPtr p) { return Tensor(std::move(p)); }
};

}  // namespace detail

namespace {

using detail::Access;
using detail::ImplPtr;
using detail::Node;
using detail::TensorImpl;

thread_local bool g_grad_enabled = true;

const TensorImpl& impl_of(const Tensor& t) {
  if (!t.defined()) throw ShapeError("operation on an undefined tensor");
  return *Access::impl(t);
}

std::string shape_str(const TensorImpl& t) {
  return std::to_string(t.rows) + "x" + std::to_string(t.cols);
}

// Allocates the output; records a node when any input requires grad.
Tensor make_output(std::size_t rows, std::size_t cols, const char* op,
                   std::initializer_list<const Tensor*> inputs,
                   std::function<void(const TensorImpl&)> backward_fn) {
  auto out = std::make_shared<TensorImpl>();
  out->rows = rows;
  out->cols = cols;
  out->value.assign(rows * cols, 0.0);
  bool needs = false;
  if (g_grad_enabled)
    for (const Tensor* t : inputs) needs = needs || impl_of(*t).requires_grad;
  if (needs) {
    out->requires_grad = true;
    out->grad.assign(rows * cols, 0.0);
    auto node = std::make_shared<Node>();
    node->op = op;
    for (const Tensor* t : inputs) node->inputs.push_back(Access::impl(*t));
    node->backward = std::move(backward_fn);
    out->node = std::move(node);
  }
  return Access::wrap(std::move(out));
}

Tensor make_output_n(std::size_t rows, std::size_t cols, const char* op,
                     std::span<const Tensor> inputs,
                     std::function<void(const TensorImpl&)> backward_fn) {
  auto out = std::make_shared<TensorImpl>();
  out->rows = rows;
  out->cols = cols;
  out->value.assign(rows * cols, 0.0);
  bool needs = false;
  if (g_grad_enabled)
    for (const Tensor& t : inputs) needs = needs || impl_of(t).requires_grad;
  if (needs) {
    out->requires_grad = true;
    out->grad.assign(rows * cols, 0.0);
    auto node = std::make_shared<Node>();
    node->op = op;
    for (const Tensor& t : inputs) node->inputs.push_back(Access::impl(t));
    node->backward = std::move(backward_fn);
    out->node = std::move(node);
  }
  return Access::wrap(std::move(out));
}

std::vector<double>& value_of(Tensor& t) { return Access::impl(t)->value; }

void require_same_shape(const TensorImpl& a, const TensorImpl& b, const char* op) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw ShapeError(std::string(op) + ": shapes " + shape_str(a) + " and " + shape_str(b) +
                     " differ");
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(std::size_t rows, std::size_t cols, bool requires_grad)
    : impl_(std::make_shared<detail::TensorImpl>()) {
  impl_->rows = rows;
  impl_->cols = cols;
  impl_->value.assign(rows * cols, 0.0);
  set_requires_grad(requires_grad);
}

Tensor Tensor::from(std::size_t rows, std::size_t cols, std::vector<double> values,
                    bool requires_grad) {
  if (values.size() != rows * cols)
    throw ShapeError("Tensor::from: " + std::to_string(values.size()) + " values for shape " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  Tensor t(rows, cols, false);
  t.impl_->value = std::move(values);
  t.set_requires_grad(requires_grad);
  return t;
}

Tensor Tensor::from(const RealMatrix& m, bool requires_grad) {
  return from(m.rows(), m.cols(), std::vector<double>(m.data().begin(), m.data().end()),
              requires_grad);
}

Tensor Tensor::scalar(double v, bool requires_grad) { return from(1, 1, {v}, requires_grad); }

std::size_t Tensor::rows() const { return impl_of(*this).rows; }
std::size_t Tensor::cols() const { return impl_of(*this).cols; }
std::size_t Tensor::size() const { return impl_of(*this).value.size(); }
std::span<const double> Tensor::data() const { return impl_of(*this).value; }
std::span<double> Tensor::mutable_data() {
  impl_of(*this);
  return impl_->value;
}

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() on a " + shape_str(*impl_) + " tensor");
  return impl_->value[0];
}

bool Tensor::requires_grad() const { return impl_of(*this).requires_grad; }

void Tensor::set_requires_grad(bool on) {
  impl_of(*this);
  impl_->requires_grad = on;
  if (on)
    impl_->ensure_grad();
  else
    impl_->grad.clear();
}

std::span<const double> Tensor::grad() const { return impl_of(*this).grad; }
std::span<double> Tensor::mutable_grad() {
  impl_of(*this);
  return impl_->grad;
}

void Tensor::zero_grad() {
  impl_of(*this);
  std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

const char* Tensor::op() const { return impl_of(*this).node ? impl_->node->op : "leaf"; }
bool Tensor::is_leaf() const { return impl_of(*this).node == nullptr; }

RealMatrix Tensor::to_matrix() const {
  RealMatrix m(rows(), cols());
  std::copy(impl_->value.begin(), impl_->value.end(), m.data().begin());
  return m;
}

Tensor Tensor::detach() const { return from(rows(), cols(), impl_of(*this).value, false); }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

// ---------------------------------------------------------------------------
// backward

void backward(const Tensor& loss) {
  const TensorImpl& root = impl_of(loss);
  if (root.rows != 1 || root.cols != 1)
    throw InputError("backward() needs a scalar loss, got " + shape_str(root));
  if (!root.requires_grad) return;

  // Iterative post-order DFS gives a topological order (inputs first).
  std::vector<TensorImpl*> order;
  std::unordered_set<const TensorImpl*> visited;
  std::vector<std::pair<TensorImpl*, std::size_t>> stack;
  TensorImpl* root_ptr = Access::impl(loss).get();
  stack.emplace_back(root_ptr, 0);
  visited.insert(root_ptr);
  while (!stack.empty()) {
    auto& [t, next] = stack.back();
    if (t->node && next < t->node->inputs.size()) {
      TensorImpl* child = t->node->inputs[next++].get();
      if (child->requires_grad && child->node && visited.insert(child).second)
        stack.emplace_back(child, 0);
      continue;
    }
    order.push_back(t);
    stack.pop_back();
  }

  for (TensorImpl* t : order) std::fill(t->grad.begin(), t->grad.end(), 0.0);
  root_ptr->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) (*it)->node->backward(**it);
}

// ---------------------------------------------------------------------------
// operators

Tensor matmul(const Tensor& a, const Tensor& b) {
  const TensorImpl& A = impl_of(a);
  const TensorImpl& B = impl_of(b);
  if (A.cols != B.rows)
    throw ShapeError("matmul: " + shape_str(A) + " times " + shape_str(B));
  const std::size_t m = A.rows, k = A.cols, n = B.cols;
  Tensor out = make_output(m, n, "matmul", {&a, &b}, [m, k, n](const TensorImpl& o) {
    TensorImpl& A = *o.node->inputs[0];
    TensorImpl& B = *o.node->inputs[1];
    if (A.requires_grad) {
      for (std::size_t i = 0; i < m; ++i) {
        const double* g = &o.grad[i * n];
        for (std::size_t p = 0; p < k; ++p) {
          const double* brow = &B.value[p * n];
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[j] * brow[j];
          A.grad[i * k + p] += acc;
        }
      }
    }
    if (B.requires_grad) {
      for (std::size_t i = 0; i < m; ++i) {
        const double* g = &o.grad[i * n];
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = A.value[i * k + p];
          if (aip == 0.0) continue;
          double* gb = &B.grad[p * n];
          for (std::size_t j = 0; j < n; ++j) gb[j] += aip * g[j];
        }
      }
    }
  });
  // Every output element accumulates over p in the same order regardless of
  // how many rows are stacked, so stacked and per-row products are identical.
  auto& y = value_of(out);
  for (std::size_t i = 0; i < m; ++i) {
    double* yrow = &y[i * n];
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A.value[i * k + p];
      const double* brow = &B.value[p * n];
      for (std::size_t j = 0; j < n; ++j) yrow[j] += aip * brow[j];
    }
  }
  return out;
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  const TensorImpl& X = impl_of(x);
  const TensorImpl& b = impl_of(bias);
  if (b.rows != 1 || b.cols != X.cols)
    throw ShapeError("add_bias: bias " + shape_str(b) + " for input " + shape_str(X));
  const std::size_t m = X.rows, n = X.cols;
  Tensor out = make_output(m, n, "add_bias", {&x, &bias}, [m, n](const TensorImpl& o) {
    TensorImpl& X = *o.node->inputs[0];
    TensorImpl& b = *o.node->inputs[1];
    if (X.requires_grad)
      for (std::size_t i = 0; i < m * n; ++i) X.grad[i] += o.grad[i];
    if (b.requires_grad)
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) b.grad[j] += o.grad[i * n + j];
  });
  auto& y = value_of(out);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) y[i * n + j] = X.value[i * n + j] + b.value[j];
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  const TensorImpl& A = impl_of(a);
  const TensorImpl& B = impl_of(b);
  require_same_shape(A, B, "add");
  Tensor out = make_output(A.rows, A.cols, "add", {&a, &b}, [](const TensorImpl& o) {
    for (const auto& in : o.node->inputs)
      if (in->requires_grad)
        for (std::size_t i = 0; i < o.grad.size(); ++i) in->grad[i] += o.grad[i];
  });
  auto& y = value_of(out);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = A.value[i] + B.value[i];
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  const TensorImpl& A = impl_of(a);
  const TensorImpl& B = impl_of(b);
  require_same_shape(A, B, "sub");
  Tensor out = make_output(A.rows, A.cols, "sub", {&a, &b}, [](const TensorImpl& o) {
    TensorImpl& A = *o.node->inputs[0];
    TensorImpl& B = *o.node->inputs[1];
    if (A.requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) A.grad[i] += o.grad[i];
    if (B.requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) B.grad[i] -= o.grad[i];
  });
  auto& y = value_of(out);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = A.value[i] - B.value[i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  const TensorImpl& A = impl_of(a);
  const TensorImpl& B = impl_of(b);
  require_same_shape(A, B, "mul");
  Tensor out = make_output(A.rows, A.cols, "mul", {&a, &b}, [](const TensorImpl& o) {
    TensorImpl& A = *o.node->inputs[0];
    TensorImpl& B = *o.node->inputs[1];
    if (A.requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) A.grad[i] += o.grad[i] * B.value[i];
    if (B.requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) B.grad[i] += o.grad[i] * A.value[i];
  });
  auto& y = value_of(out);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = A.value[i] * B.value[i];
  return out;
}

Tensor scale(const Tensor& x, double c) {
  const TensorImpl& X = impl_of(x);
  Tensor out = make_output(X.rows, X.cols, "scale", {&x}, [c](const TensorImpl& o) {
    TensorImpl& X = *o.node->inputs[0];
    for (std::size_t i = 0; i < o.grad.size(); ++i) X.grad[i] += c * o.grad[i];
  });
  auto& y = value_of(out);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = c * X.value[i];
  return out;
}

Tensor add_scalar(const Tensor& x, double c) {
  const TensorImpl& X = impl_of(x);
  Tensor out = make_output(X.rows, X.cols, "add_scalar", {&x}, [](const TensorImpl& o) {
    TensorImpl& X = *o.node->inputs[0];
    for (std::size_t i = 0; i < o.grad.size(); ++i) X.grad[i] += o.grad[i];
  });
  auto& y = value_of(out);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = X.value[i] + c;
  return out;
}

Tensor relu(const Tensor& x) {
  const TensorImpl& X = impl_of(x);
  Tensor out = make_output(X.rows, X.cols, "relu", {&x}, [](const TensorImpl& o) {
    TensorImpl& X = *o.node->inputs[0];
    for (std::size_t i = 0; i < o.grad.size(); ++i)
      if (X.value[i] > 0.0) X.grad[i] += o.grad[i];
  });
  auto& y = value_of(out);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = X.value[i] > 0.0 ? X.value[i] : 0.0;
  return out;
}

Tensor log2(const Tensor& x) {
  const TensorImpl& X = impl_of(x);
  Tensor out = make_output(X.rows, X.cols, "log2", {&x}, [](const TensorImpl& o) {
    TensorImpl& X = *o.node->inputs[0];
    for (std::size_t i = 0; i < o.grad.size(); ++i)
      X.grad[i] += o.grad[i] / (X.value[i] * std::numbers::ln2);
  });
  auto& y = value_of(out);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::log2(X.value[i]);
  return out;
}

Tensor sum(const Tensor& x) {
  const TensorImpl& X = impl_of(x);
  Tensor out = make_output(1, 1, "sum", {&x}, [](const TensorImpl& o) {
    TensorImpl& X = *o.node->inputs[0];
    for (double& g : X.grad) g += o.grad[0];
  });
  double acc = 0.0;
  for (double v : X.value) acc += v;
  value_of(out)[0] = acc;
  return out;
}

Tensor mean(const Tensor& x) {
  const double n = static_cast<double>(impl_of(x).value.size());
  if (n == 0) throw ShapeError("mean of an empty tensor");
  return scale(sum(x), 1.0 / n);
}

Tensor row_sum(const Tensor& x) {
  const TensorImpl& X = impl_of(x);
  const std::size_t m = X.rows, n = X.cols;
  Tensor out = make_output(m, 1, "row_sum", {&x}, [n](const TensorImpl& o) {
    TensorImpl& X = *o.node->inputs[0];
    for (std::size_t i = 0; i < o.grad.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) X.grad[i * n + j] += o.grad[i];
  });
  auto& y = value_of(out);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += X.value[i * n + j];
    y[i] = acc;
  }
  return out;
}

Tensor column_max(const Tensor& x) {
  const TensorImpl& X = impl_of(x);
  if (X.rows == 0) throw ShapeError("column_max of a tensor with no rows");
  const std::size_t m = X.rows, n = X.cols;
  std::vector<std::size_t> argmax(n, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 1; i < m; ++i)
      if (X.value[i * n + j] > X.value[argmax[j] * n + j]) argmax[j] = i;
  Tensor out = make_output(1, n, "column_max", {&x}, [argmax, n](const TensorImpl& o) {
    TensorImpl& X = *o.node->inputs[0];
    for (std::size_t j = 0; j < n; ++j) X.grad[argmax[j] * n + j] += o.grad[j];
  });
  auto& y = value_of(out);
  for (std::size_t j = 0; j < n; ++j) y[j] = X.value[argmax[j] * n + j];
  return out;
}

Tensor group_exclusive_max(const Tensor& x, std::size_t group) {
  const TensorImpl& X = impl_of(x);
  if (group == 0 || X.rows % group != 0)
    throw ShapeError("group_exclusive_max: " + std::to_string(X.rows) +
                     " rows not divisible into groups of " + std::to_string(group));
  const std::size_t m = X.rows, n = X.cols;
  // argmax[r * n + j] = source row, or m when the neighbour set is empty.
  std::vector<std::size_t> argmax(m * n, m);
  for (std::size_t g0 = 0; g0 < m; g0 += group) {
    for (std::size_t r = g0; r < g0 + group; ++r) {
      for (std::size_t j = 0; j < n; ++j) {
        std::size_t best = m;
        for (std::size_t q = g0; q < g0 + group; ++q) {
          if (q == r) continue;
          if (best == m || X.value[q * n + j] > X.value[best * n + j]) best = q;
        }
        argmax[r * n + j] = best;
      }
    }
  }
  Tensor out = make_output(m, n, "group_exclusive_max", {&x}, [argmax, m](const TensorImpl& o) {
    TensorImpl& X = *o.node->inputs[0];
    const std::size_t n = X.cols;
    for (std::size_t idx = 0; idx < argmax.size(); ++idx)
      if (argmax[idx] != m) X.grad[argmax[idx] * n + idx % n] += o.grad[idx];
  });
  auto& y = value_of(out);
  for (std::size_t idx = 0; idx < argmax.size(); ++idx)
    y[idx] = argmax[idx] == m ? 0.0 : X.value[argmax[idx] * n + idx % n];
  return out;
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows) {
  const TensorImpl& X = impl_of(x);
  const std::size_t n = X.cols;
  for (std::size_t r : rows)
    if (r >= X.rows) throw ShapeError("gather_rows: row " + std::to_string(r) + " out of range");
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  Tensor out = make_output(idx.size(), n, "gather_rows", {&x}, [idx, n](const TensorImpl& o) {
    TensorImpl& X = *o.node->inputs[0];
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) X.grad[idx[i] * n + j] += o.grad[i * n + j];
  });
  auto& y = value_of(out);
  for (std::size_t i = 0; i < idx.size(); ++i)
    std::copy_n(&X.value[idx[i] * n], n, &y[i * n]);
  return out;
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_rows of nothing");
  const std::size_t n = impl_of(parts[0]).cols;
  std::size_t m = 0;
  for (const Tensor& p : parts) {
    if (impl_of(p).cols != n) throw ShapeError("concat_rows: column counts differ");
    m += impl_of(p).rows;
  }
  Tensor out = make_output_n(m, n, "concat_rows", parts, [](const TensorImpl& o) {
    std::size_t offset = 0;
    for (const auto& in : o.node->inputs) {
      if (in->requires_grad)
        for (std::size_t i = 0; i < in->value.size(); ++i) in->grad[i] += o.grad[offset + i];
      offset += in->value.size();
    }
  });
  auto& y = value_of(out);
  std::size_t offset = 0;
  for (const Tensor& p : parts) {
    const auto& v = impl_of(p).value;
    std::copy(v.begin(), v.end(), y.begin() + static_cast<std::ptrdiff_t>(offset));
    offset += v.size();
  }
  return out;
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_cols of nothing");
  const std::size_t m = impl_of(parts[0]).rows;
  std::size_t n = 0;
  for (const Tensor& p : parts) {
    if (impl_of(p).rows != m) throw ShapeError("concat_cols: row counts differ");
    n += impl_of(p).cols;
  }
  Tensor out = make_output_n(m, n, "concat_cols", parts, [m, n](const TensorImpl& o) {
    std::size_t col0 = 0;
    for (const auto& in : o.node->inputs) {
      const std::size_t c = in->cols;
      if (in->requires_grad)
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < c; ++j) in->grad[i * c + j] += o.grad[i * n + col0 + j];
      col0 += c;
    }
  });
  auto& y = value_of(out);
  std::size_t col0 = 0;
  for (const Tensor& p : parts) {
    const TensorImpl& P = impl_of(p);
    for (std::size_t i = 0; i < m; ++i)
      std::copy_n(&P.value[i * P.cols], P.cols, &y[i * n + col0]);
    col0 += P.cols;
  }
  return out;
}

Tensor frobenius_normalize_scale(const Tensor& x, double c, std::size_t group_rows) {
  const TensorImpl& X = impl_of(x);
  const std::size_t m = X.rows, n = X.cols;
  const std::size_t g = group_rows == 0 ? m : group_rows;
  if (g == 0 || m % g != 0)
    throw ShapeError("frobenius_normalize_scale: " + std::to_string(m) +
                     " rows not divisible into blocks of " + std::to_string(g));
  const std::size_t block = g * n;
  std::vector<double> norms(m / g);
  for (std::size_t b = 0; b < norms.size(); ++b) {
    double acc = 0.0;
    for (std::size_t i = b * block; i < (b + 1) * block; ++i) acc += X.value[i] * X.value[i];
    norms[b] = std::sqrt(acc);
    if (!(norms[b] > 0.0)) throw InputError("frobenius_normalize_scale: zero-norm block");
  }
  Tensor out = make_output(m, n, "frobenius_normalize_scale", {&x},
                           [norms, c, block](const TensorImpl& o) {
                             TensorImpl& X = *o.node->inputs[0];
                             for (std::size_t b = 0; b < norms.size(); ++b) {
                               const std::size_t lo = b * block, hi = lo + block;
                               double dot = 0.0;
                               for (std::size_t i = lo; i < hi; ++i) dot += X.value[i] * o.grad[i];
                               const double s = norms[b];
                               const double k = dot / (s * s);
                               for (std::size_t i = lo; i < hi; ++i)
                                 X.grad[i] += c / s * (o.grad[i] - k * X.value[i]);
                             }
                           });
  auto& y = value_of(out);
  for (std::size_t b = 0; b < norms.size(); ++b)
    for (std::size_t i = b * block; i < (b + 1) * block; ++i) y[i] = c * X.value[i] / norms[b];
  return out;
}

Tensor select_per_row(const Tensor& x, std::span<const std::size_t> cols) {
  const TensorImpl& X = impl_of(x);
  if (cols.size() != X.rows) throw ShapeError("select_per_row: one column index per row needed");
  for (std::size_t c : cols)
    if (c >= X.cols) throw ShapeError("select_per_row: column out of range");
  std::vector<std::size_t> idx(cols.begin(), cols.end());
  const std::size_t n = X.cols;
  Tensor out = make_output(X.rows, 1, "select_per_row", {&x}, [idx, n](const TensorImpl& o) {
    TensorImpl& X = *o.node->inputs[0];
    for (std::size_t i = 0; i < idx.size(); ++i) X.grad[i * n + idx[i]] += o.grad[i];
  });
  auto& y = value_of(out);
  for (std::size_t i = 0; i < idx.size(); ++i) y[i] = X.value[i * n + idx[i]];
  return out;
}

Tensor paired_conj_inner(const Tensor& beams, const ComplexMatrix& channels,
                         std::size_t beams_per_group, std::size_t channels_per_group) {
  const TensorImpl& W = impl_of(beams);
  const std::size_t fas = channels.cols();
  if (W.cols != 2 * fas)
    throw ShapeError("paired_conj_inner: beams have " + std::to_string(W.cols) +
                     " columns, channels need " + std::to_string(2 * fas));
  if (beams_per_group == 0 || channels_per_group == 0 || W.rows % beams_per_group != 0 ||
      channels.rows() % channels_per_group != 0 ||
      W.rows / beams_per_group != channels.rows() / channels_per_group)
    throw ShapeError("paired_conj_inner: group counts of beams and channels differ");
  const std::size_t groups = W.rows / beams_per_group;
  const std::size_t R = beams_per_group, U = channels_per_group;
  const std::size_t out_cols = 2 * R;
  // Shares the channel storage with the backward closure.
  auto h = std::make_shared<ComplexMatrix>(channels);
  Tensor out = make_output(groups * U, out_cols, "paired_conj_inner", {&beams},
                           [h, groups, R, U, fas](const TensorImpl& o) {
                             TensorImpl& W = *o.node->inputs[0];
                             const std::size_t oc = 2 * R, wc = 2 * fas;
                             for (std::size_t g = 0; g < groups; ++g)
                               for (std::size_t u = 0; u < U; ++u) {
                                 const std::size_t row = g * U + u;
                                 for (std::size_t r = 0; r < R; ++r) {
                                   const double g_re = o.grad[row * oc + r];
                                   const double g_im = o.grad[row * oc + R + r];
                                   double* gw = &W.grad[(g * R + r) * wc];
                                   for (std::size_t n = 0; n < fas; ++n) {
                                     const Complex hv = (*h)(row, n);
                                     gw[n] += g_re * hv.real() - g_im * hv.imag();
                                     gw[fas + n] += g_re * hv.imag() + g_im * hv.real();
                                   }
                                 }
                               }
                           });
  auto& y = value_of(out);
  const std::size_t wc = 2 * fas;
  for (std::size_t g = 0; g < groups; ++g)
    for (std::size_t u = 0; u < U; ++u) {
      const std::size_t row = g * U + u;
      for (std::size_t r = 0; r < R; ++r) {
        const double* w = &W.value[(g * R + r) * wc];
        double re = 0.0, im = 0.0;
        for (std::size_t n = 0; n < fas; ++n) {
          const Complex hv = channels(row, n);
          // conj(h) * w with w = wr + j wi.
          re += hv.real() * w[n] + hv.imag() * w[fas + n];
          im += hv.real() * w[fas + n] - hv.imag() * w[n];
        }
        y[row * out_cols + r] = re;
        y[row * out_cols + R + r] = im;
      }
    }
  return out;
}

Tensor square_magnitude_paired(const Tensor& x) {
  const TensorImpl& X = impl_of(x);
  if (X.cols % 2 != 0) throw ShapeError("square_magnitude_paired needs an even column count");
  const std::size_t m = X.rows, c = X.cols / 2;
  Tensor out = make_output(m, c, "square_magnitude_paired", {&x}, [c](const TensorImpl& o) {
    TensorImpl& X = *o.node->inputs[0];
    for (std::size_t i = 0; i < X.rows; ++i)
      for (std::size_t q = 0; q < c; ++q) {
        const double g = o.grad[i * c + q];
        X.grad[i * 2 * c + q] += 2.0 * X.value[i * 2 * c + q] * g;
        X.grad[i * 2 * c + c + q] += 2.0 * X.value[i * 2 * c + c + q] * g;
      }
  });
  auto& y = value_of(out);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t q = 0; q < c; ++q) {
      const double re = X.value[i * 2 * c + q];
      const double im = X.value[i * 2 * c + c + q];
      y[i * c + q] = re * re + im * im;
    }
  return out;
}

}  // namespace fasbeam::ad
