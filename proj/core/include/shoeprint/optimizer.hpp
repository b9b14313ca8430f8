#pragma once

#include <map>
#include <string>
#include <vector>

#include "shoeprint/tensor.hpp"

namespace shoeprint {

struct OptimizerConfig {
  double learning_rate = 0.001;
  double beta1 = 0.99;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long long decay_step = 10000;
  double decay_factor = 0.5;
  double weight_decay = 1e-4;  // L2 strength, applied only to the decay set
};

// Staircase schedule: lr0 * factor^floor(step / decay_step), step counted
// from 0.
double lr_at(long long step, const OptimizerConfig& config);

struct AdamState {
  long long step = 0;  // completed updates
  std::map<std::string, Tensor> m, v;
};

// One Adam update with bias correction; epsilon sits outside the square
// root. L2 decay is folded into the gradient (g += lambda * theta) for the
// parameters named in decay_params before the moment updates.
void adam_step(std::map<std::string, Tensor>& params, const std::map<std::string, Tensor>& grads,
               const std::vector<std::string>& decay_params, AdamState& state,
               const OptimizerConfig& config);

}  // namespace shoeprint
