#include "fasbeam/adam.hpp"

#include <cmath>

#include "fasbeam/errors.hpp"

namespace fasbeam::ad {

Adam::Adam(std::vector<Tensor> params, AdamOptions options)
    : params_(std::move(params)), options_(options), lr_(options.lr) {
  for (const Tensor& p : params_) {
    if (!p.requires_grad()) throw InputError("Adam: parameter does not require grad");
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void Adam::step() {
  ++step_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t t = 0; t < params_.size(); ++t) {
    auto value = params_[t].mutable_data();
    const auto grad = params_[t].grad();
    auto& m = m_[t];
    auto& v = v_[t];
    for (std::size_t i = 0; i < value.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      value[i] -= lr_ * m_hat / (std::sqrt(v_hat) + options_.eps);
    }
  }
  if (options_.decay_interval > 0 && step_ % options_.decay_interval == 0) lr_ *= options_.decay;
}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

}  // namespace fasbeam::ad
