#pragma once

#include <cstddef>
#include <vector>

#include "fasbeam/autodiff.hpp"

namespace fasbeam::ad {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double decay = 0.995;             // lr multiplier ...
  std::size_t decay_interval = 100;  // ... applied after every this many steps
};

// Adam with bias correction and a step-wise exponential learning-rate decay.
// Moments are kept per parameter tensor, shaped like the parameter.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamOptions options = {});

  // One update from the gradients currently stored on the parameters.
  void step();
  void zero_grad();

  double lr() const { return lr_; }
  std::size_t step_count() const { return step_; }
  const AdamOptions& options() const { return options_; }
  const std::vector<Tensor>& params() const { return params_; }
  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }

 private:
  std::vector<Tensor> params_;
  AdamOptions options_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t step_ = 0;
  double lr_;
};

}  // namespace fasbeam::ad
