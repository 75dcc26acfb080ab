#pragma once

#include "rcgan/tensor.hpp"

namespace rcgan {

// Per-term coefficients of the weighted total objective.
struct LossWeights {
  double lambda_d = 1.0;
  double lambda_g = 1.0;
  double lambda_cycle = 10.0;
  double lambda_im = 0.1;
  double lambda_if = 10.0;
};

struct LossBreakdown {
  double dis = 0.0;
  double gen = 0.0;
  double cycle = 0.0;
  double ident_m = 0.0;
  double ident_f = 0.0;
  double total = 0.0;
};

// Ideal discriminator outputs: real patches are all ones, fake all zeros.
enum class TargetKind { Real, Fake };

inline Tensor target_patch(TargetKind kind, std::vector<int> dims) {
  return Tensor::full(std::move(dims), kind == TargetKind::Real ? 1.0 : 0.0);
}

}  // namespace rcgan
