#include "missdiff/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace missdiff {

AdamState AdamState::init(const std::vector<Tensor*>& params) {
  AdamState state;
  state.m.reserve(params.size());
  state.v.reserve(params.size());
  for (const Tensor* p : params) {
    state.m.push_back(Tensor::zeros(p->shape));
    state.v.push_back(Tensor::zeros(p->shape));
  }
  return state;
}

void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
               AdamState& state, double lr) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: parameter/gradient/state count mismatch");
  state.step += 1;
  const double b1 = state.config.beta1, b2 = state.config.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    const Tensor& g = grads[k];
    if (!p.same_shape(g) || !p.same_shape(state.m[k]))
      throw std::invalid_argument("adam_step: shape mismatch");
    for (size_t i = 0; i < p.data.size(); ++i) {
      const double gi = g.data[i];
      const double mi = b1 * state.m[k].data[i] + (1.0 - b1) * gi;
      const double vi = b2 * state.v[k].data[i] + (1.0 - b2) * gi * gi;
      state.m[k].data[i] = static_cast<float>(mi);
      state.v[k].data[i] = static_cast<float>(vi);
      const double mhat = mi / bc1;
      const double vhat = vi / bc2;
      p.data[i] = static_cast<float>(p.data[i] - lr * mhat / (std::sqrt(vhat) + state.config.eps));
    }
  }
}

std::vector<int> LrSchedule::milestones() const {
  const double fracs[] = {0.25, 0.5, 0.75, 0.9};
  std::vector<int> out;
  for (double f : fracs)
    out.push_back(static_cast<int>(std::ceil(f * total_epochs)));
  return out;
}

double lr_at(const LrSchedule& schedule, int epoch) {
  if (epoch < 0 || epoch >= schedule.total_epochs)
    throw std::out_of_range("lr_at: epoch outside [0, total_epochs)");
  int passed = 0;
  for (int m : schedule.milestones())
    if (m <= epoch) ++passed;
  return schedule.base_lr * std::pow(schedule.decay, passed);
}

}  // namespace missdiff
