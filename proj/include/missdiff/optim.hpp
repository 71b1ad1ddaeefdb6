#pragma once

#include <cstdint>
#include <vector>

#include "missdiff/tensor.hpp"

namespace missdiff {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Per-parameter first/second moment accumulators plus the shared step count.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  int64_t step = 0;
  AdamConfig config;

  static AdamState init(const std::vector<Tensor*>& params);
};

// Bias-corrected Adam update, applied in place. `grads` aligns with `params`.
void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
               AdamState& state, double lr);

// Step-decay schedule: the base rate is cut by `decay` at fixed fractions of
// the epoch budget, milestones at ceil(f * total_epochs) for
// f in {0.25, 0.5, 0.75, 0.9}.
struct LrSchedule {
  double base_lr = 5e-4;
  int total_epochs = 250;
  double decay = 0.1;

  std::vector<int> milestones() const;
};

// Learning rate for `epoch` in [0, total_epochs). Throws out of range.
double lr_at(const LrSchedule& schedule, int epoch);

}  // namespace missdiff
