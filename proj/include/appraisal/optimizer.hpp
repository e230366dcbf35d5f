#pragma once

#include <span>
#include <vector>

#include "appraisal/linalg.hpp"

namespace appraisal {

// Mutable view of one parameter tensor's storage.
struct TensorRef {
  double* data;
  Index size;
};
struct ConstTensorRef {
  const double* data;
  Index size;
};

// Adam with the AMSGrad running-max second moment and bias correction on
// both moments. One state instance owns the moments for a fixed parameter
// list; the step counter is shared across all tensors.
struct OptimState {
  double learning_rate;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step_count = 0;

  struct Moments {
    Vector m;     // first moment
    Vector v;     // second moment
    Vector vhat;  // running max of v
  };
  std::vector<Moments> slots;  // one per parameter tensor, lazily sized
};

// theta <- theta - lr * (m / (1 - b1^t)) / (sqrt(vhat / (1 - b2^t)) + eps)
void adam_amsgrad_step(std::span<const TensorRef> params, std::span<const ConstTensorRef> grads,
                       OptimState& state);

}  // namespace appraisal
