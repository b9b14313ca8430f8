#pragma once

#include <cstdint>

#include "shoeprint/gradcheck.hpp"
#include "shoeprint/graph.hpp"
#include "shoeprint/train.hpp"

namespace shoeprint {

struct GraphCheckOptions {
  int total_coords = 120;     // sampled coordinates, spread over all parameters
  double epsilon = 1e-5;      // central-difference step
  double tolerance = 1e-4;    // max acceptable relative error
  int batch = 2;              // batchnorm needs at least 2
  std::uint64_t seed = 0;
  LossKind loss = LossKind::clf;
  ClfConfig clf{};
};

// Finite-difference check of every parameter tensor against the analytic
// whole-graph backward pass, on seeded random inputs. Regression targets are
// placed far from the piecewise-loss kinks. Coordinates are allocated to
// tensors proportionally to their volume (at least one each).
GradCheckReport check_graph_gradients(ModelGraph& graph, const GraphCheckOptions& options = {});

}  // namespace shoeprint
