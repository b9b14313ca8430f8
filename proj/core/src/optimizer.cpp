#include "shoeprint/optimizer.hpp"

#include <cmath>
#include <set>

namespace shoeprint {

double lr_at(long long step, const OptimizerConfig& config) {
  if (step < 0) throw ConfigError("lr_at: step must be >= 0");
  if (config.decay_step < 1) throw ConfigError("lr_at: decay_step must be >= 1");
  const long long stairs = step / config.decay_step;
  return config.learning_rate * std::pow(config.decay_factor, static_cast<double>(stairs));
}

void adam_step(std::map<std::string, Tensor>& params, const std::map<std::string, Tensor>& grads,
               const std::vector<std::string>& decay_params, AdamState& state,
               const OptimizerConfig& config) {
  const std::set<std::string> decay_set(decay_params.begin(), decay_params.end());
  for (const std::string& name : decay_set) {
    if (!params.count(name)) {
      throw ConfigError("adam_step: decay parameter '" + name + "' does not exist");
    }
  }

  const double lr = lr_at(state.step, config);
  state.step += 1;
  const double beta1_t = std::pow(config.beta1, static_cast<double>(state.step));
  const double beta2_t = std::pow(config.beta2, static_cast<double>(state.step));

  for (auto& [name, param] : params) {
    const auto grad_it = grads.find(name);
    if (grad_it == grads.end()) {
      throw ConfigError("adam_step: missing gradient for parameter '" + name + "'");
    }
    const Tensor& grad = grad_it->second;
    if (!grad.same_shape(param)) {
      throw ShapeError("adam_step: gradient shape " + grad.shape_string() +
                       " does not match parameter '" + name + "' " + param.shape_string());
    }

    Tensor& m = state.m.try_emplace(name, Tensor::zeros_like(param)).first->second;
    Tensor& v = state.v.try_emplace(name, Tensor::zeros_like(param)).first->second;
    const bool decays = decay_set.count(name) > 0 && config.weight_decay != 0.0;

    for (long long i = 0; i < param.size(); ++i) {
      const size_t idx = static_cast<size_t>(i);
      double g = grad.data[idx];
      if (decays) g += config.weight_decay * param.data[idx];
      m.data[idx] = config.beta1 * m.data[idx] + (1.0 - config.beta1) * g;
      v.data[idx] = config.beta2 * v.data[idx] + (1.0 - config.beta2) * g * g;
      const double m_hat = m.data[idx] / (1.0 - beta1_t);
      const double v_hat = v.data[idx] / (1.0 - beta2_t);
      param.data[idx] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace shoeprint
