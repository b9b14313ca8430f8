#include "shoeprint/loss.hpp"

#include <cmath>

#include "shoeprint/error.hpp"

namespace shoeprint {

LossResult clf_loss(const EvaluationBatch& batch, const ClfConfig& config) {
  if (config.threshold_years < 0) throw ConfigError("clf_loss: threshold must be >= 0");
  if (!config.override_epsilon_band && (config.epsilon < 1e-4 || config.epsilon > 0.3)) {
    throw ConfigError("clf_loss: epsilon " + std::to_string(config.epsilon) +
                      " outside the supported band [0.0001, 0.3]");
  }

  const double n = static_cast<double>(batch.size());
  const double threshold = static_cast<double>(config.threshold_years);
  LossResult result;
  result.grad.assign(batch.size(), 0.0);
  for (size_t i = 0; i < batch.size(); ++i) {
    const double residual = batch.actual[i] - batch.predicted[i];
    const double d = std::abs(residual);
    // d(d)/d(prediction) = -sign(residual); zero residual has subgradient 0
    const double dsign = residual > 0.0 ? -1.0 : (residual < 0.0 ? 1.0 : 0.0);
    if (d <= threshold) {
      result.value += d * config.epsilon;
      result.grad[i] = dsign * config.epsilon / n;
    } else {
      result.value += d * d * d + config.epsilon;
      result.grad[i] = dsign * 3.0 * d * d / n;
    }
  }
  result.value /= n;
  return result;
}

LossResult mse_loss(const EvaluationBatch& batch) {
  const double n = static_cast<double>(batch.size());
  LossResult result;
  result.grad.assign(batch.size(), 0.0);
  for (size_t i = 0; i < batch.size(); ++i) {
    const double residual = batch.actual[i] - batch.predicted[i];
    result.value += residual * residual;
    result.grad[i] = -2.0 * residual / n;
  }
  result.value /= n;
  return result;
}

LossResult cross_entropy_loss(const Tensor& probabilities, const std::vector<int>& labels) {
  require_rank(probabilities, 2, "cross_entropy probabilities");
  const int n = probabilities.shape[0], k = probabilities.shape[1];
  if (static_cast<int>(labels.size()) != n) {
    throw ShapeError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(n) + " rows");
  }
  LossResult result;
  result.grad.assign(static_cast<size_t>(probabilities.size()), 0.0);
  for (int i = 0; i < n; ++i) {
    const int label = labels[static_cast<size_t>(i)];
    if (label < 0 || label >= k) throw ConfigError("cross_entropy: label out of range");
    const double p = std::max(probabilities.at(i, label), 1e-12);
    result.value -= std::log(p);
    result.grad[static_cast<size_t>(i) * k + label] = -1.0 / (p * static_cast<double>(n));
  }
  result.value /= static_cast<double>(n);
  return result;
}

}  // namespace shoeprint
