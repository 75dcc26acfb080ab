#pragma once

#include <cstdint>
#include <vector>

#include "rcgan/graph.hpp"

namespace rcgan {

// Adam over a fixed parameter list. Moment tensors and the step counter are
// exposed flat so checkpoints can persist optimizer state exactly.
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Var> params, double lr, double beta1, double beta2, double eps = 1e-8);

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }
  std::uint64_t steps() const { return t_; }

  // Applies accumulated gradients (an empty grad counts as zero) and clears
  // them. Throws NumericError if an update produces a non-finite parameter.
  void step();

  void zero_grads();

  // State layout: per parameter, first-moment values then second-moment
  // values, parameters in construction order.
  std::size_t state_elements() const;
  void append_state(std::vector<double>& out) const;
  void load_state(const std::vector<double>& flat, std::size_t& cursor, std::uint64_t t);

 private:
  std::vector<Var> params_;
  std::vector<Tensor> m_, v_;
  double lr_ = 1e-4;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::uint64_t t_ = 0;
};

}  // namespace rcgan
