#include "appraisal/optimizer.hpp"

#include <cmath>

#include "appraisal/errors.hpp"

namespace appraisal {

void adam_amsgrad_step(std::span<const TensorRef> params, std::span<const ConstTensorRef> grads,
                       OptimState& state) {
  if (params.size() != grads.size())
    throw Error(Errc::shape_mismatch, "parameter/gradient list sizes differ");

  if (state.slots.empty()) {
    state.slots.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.slots[i].m = Vector::Zero(params[i].size);
      state.slots[i].v = Vector::Zero(params[i].size);
      state.slots[i].vhat = Vector::Zero(params[i].size);
    }
  }
  if (state.slots.size() != params.size())
    throw Error(Errc::shape_mismatch, "optimizer state built for a different parameter list");

  ++state.step_count;
  const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size != grads[i].size || params[i].size != state.slots[i].m.size())
      throw Error(Errc::shape_mismatch, "parameter tensor " + std::to_string(i) + " shape mismatch");

    auto theta = Eigen::Map<Vector>(params[i].data, params[i].size);
    auto g = Eigen::Map<const Vector>(grads[i].data, grads[i].size);
    auto& slot = state.slots[i];

    slot.m = state.beta1 * slot.m + (1.0 - state.beta1) * g;
    slot.v = state.beta2 * slot.v + (1.0 - state.beta2) * g.array().square().matrix();
    slot.vhat = slot.vhat.cwiseMax(slot.v);

    theta.array() -= state.learning_rate * (slot.m.array() / bias1) /
                     ((slot.vhat.array() / bias2).sqrt() + state.epsilon);
  }
}

}  // namespace appraisal
