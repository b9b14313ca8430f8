#pragma once

#include <cstdint>
#include <vector>

#include "shoeprint/graph.hpp"
#include "shoeprint/loss.hpp"
#include "shoeprint/manifest.hpp"
#include "shoeprint/optimizer.hpp"

namespace shoeprint {

enum class LossKind { clf, mse, cross_entropy };

LossKind loss_kind_from_string(const std::string& text);
std::string to_string(LossKind kind);

// One training example: one normalized [0,1] image per graph input slot.
struct Sample {
  std::vector<std::vector<double>> inputs;
  double age = 0.0;
  Gender gender = Gender::male;
  long long subject_id = 0;
  Split split = Split::train;
};

struct SampleSet {
  int input_count = 1;
  std::vector<std::array<int, 3>> input_hwc;
  std::vector<Sample> samples;

  std::vector<size_t> split_indices(Split split) const;
};

// Decodes every manifest image once. Single-input graphs take one sample per
// row; two-input graphs pair each subject's left and right prints (matched
// by provenance and path order within the subject).
SampleSet load_samples(const DatasetManifest& manifest, const ModelGraph& graph);

struct TrainOptions {
  int epochs = 1;
  int batch_size = 16;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::clf;
  ClfConfig clf{};
  OptimizerConfig optimizer{};
  long long max_steps = 0;       // 0 = uncapped
  double stop_loss_ratio = 0.0;  // early stop once eval loss < ratio * initial (0 = off)
  long long probe_every = 25;    // steps between early-stop probes
};

struct TrainHistory {
  std::vector<double> train_loss;  // mean batch loss per epoch
  std::vector<double> val_loss;    // -1 when the split has no rows
  long long steps = 0;
  double initial_loss = 0.0;  // infer-mode loss on the train split before any update
  double final_loss = 0.0;
  bool stopped_early = false;
};

TrainHistory train(ModelGraph& graph, AdamState& state, const SampleSet& samples,
                   const TrainOptions& options);

// Infer-mode loss over one split.
double evaluate_loss(ModelGraph& graph, const SampleSet& samples, Split split, LossKind kind,
                     const ClfConfig& clf_config, int batch_size = 32);

// Infer-mode age predictions over one split.
EvaluationBatch evaluate_regression(ModelGraph& graph, const SampleSet& samples, Split split,
                                    int batch_size = 32);

// Infer-mode gender predictions (class 0 = male, 1 = female; argmax, male on
// ties).
ClassificationCounts evaluate_classification(ModelGraph& graph, const SampleSet& samples,
                                             Split split, int batch_size = 32);

}  // namespace shoeprint
