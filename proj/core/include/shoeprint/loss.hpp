#pragma once

#include <vector>

#include "shoeprint/metrics.hpp"
#include "shoeprint/tensor.hpp"

namespace shoeprint {

struct ClfConfig {
  int threshold_years = 2;  // residuals at or below this stay on the linear branch
  double epsilon = 0.1;
  bool override_epsilon_band = false;  // allow epsilon outside [1e-4, 0.3]
};

struct LossResult {
  double value = 0.0;
  std::vector<double> grad;  // d loss / d prediction
};

// Piecewise residual loss, mean over the batch: a residual d at or below the
// threshold costs d*epsilon, above it costs d^3 + epsilon. Subgradient 0 at
// d = 0.
LossResult clf_loss(const EvaluationBatch& batch, const ClfConfig& config);

LossResult mse_loss(const EvaluationBatch& batch);

// Mean negative log-likelihood on probability rows [n, k]; grad is with
// respect to the probabilities.
LossResult cross_entropy_loss(const Tensor& probabilities, const std::vector<int>& labels);

}  // namespace shoeprint
