#include "shoeprint/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "shoeprint/image.hpp"
#include "shoeprint/rng.hpp"

namespace shoeprint {
namespace {

std::vector<double> normalized_pixels(const ShoeprintImage& image) {
  std::vector<double> values(image.pixels.size());
  for (size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<double>(image.pixels[i]) / 255.0;
  }
  return values;
}

void check_image_dims(const ShoeprintImage& image, const std::array<int, 3>& want,
                      const std::string& path) {
  if (image.height != want[0] || image.width != want[1] || want[2] != 1) {
    throw ShapeError("image " + path + " is " + std::to_string(image.height) + "x" +
                     std::to_string(image.width) + ", the architecture expects " +
                     std::to_string(want[0]) + "x" + std::to_string(want[1]));
  }
}

// Stacks the chosen samples into one tensor per input slot.
std::vector<Tensor> make_batch(const SampleSet& set, const std::vector<size_t>& which) {
  std::vector<Tensor> inputs;
  const int n = static_cast<int>(which.size());
  for (int slot = 0; slot < set.input_count; ++slot) {
    const auto& hwc = set.input_hwc[static_cast<size_t>(slot)];
    Tensor t({n, hwc[0], hwc[1], hwc[2]});
    const size_t per_image = t.data.size() / static_cast<size_t>(n);
    for (int i = 0; i < n; ++i) {
      const auto& pixels = set.samples[which[static_cast<size_t>(i)]].inputs[static_cast<size_t>(slot)];
      std::copy(pixels.begin(), pixels.end(), t.data.begin() + static_cast<long long>(i) * per_image);
    }
    inputs.push_back(std::move(t));
  }
  return inputs;
}

LossResult head_loss(const ModelGraph& graph, const Tensor& output, const SampleSet& set,
                     const std::vector<size_t>& which, LossKind kind,
                     const ClfConfig& clf_config) {
  if (kind == LossKind::cross_entropy) {
    if (graph.head != HeadKind::classification) {
      throw ConfigError("cross-entropy needs a classification head");
    }
    std::vector<int> labels;
    labels.reserve(which.size());
    for (size_t idx : which) {
      labels.push_back(set.samples[idx].gender == Gender::male ? 0 : 1);
    }
    return cross_entropy_loss(output, labels);
  }
  if (graph.head != HeadKind::regression) {
    throw ConfigError(to_string(kind) + " loss needs a regression head");
  }
  std::vector<double> actual, predicted;
  actual.reserve(which.size());
  predicted.reserve(which.size());
  for (size_t i = 0; i < which.size(); ++i) {
    actual.push_back(set.samples[which[i]].age);
    predicted.push_back(output.data[i]);
  }
  const EvaluationBatch batch(std::move(actual), std::move(predicted));
  return kind == LossKind::clf ? clf_loss(batch, clf_config) : mse_loss(batch);
}

Tensor head_gradient(const Tensor& output, const LossResult& loss) {
  Tensor grad(output.shape);
  if (grad.data.size() != loss.grad.size()) {
    throw ShapeError("loss gradient does not match the head output");
  }
  std::copy(loss.grad.begin(), loss.grad.end(), grad.data.begin());
  return grad;
}

}  // namespace

LossKind loss_kind_from_string(const std::string& text) {
  if (text == "clf") return LossKind::clf;
  if (text == "mse") return LossKind::mse;
  if (text == "cross-entropy" || text == "ce") return LossKind::cross_entropy;
  throw ConfigError("unknown loss '" + text + "' (expected clf, mse, or cross-entropy)");
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::clf: return "clf";
    case LossKind::mse: return "mse";
    case LossKind::cross_entropy: return "cross-entropy";
  }
  throw ConfigError("bad LossKind value");
}

std::vector<size_t> SampleSet::split_indices(Split split) const {
  std::vector<size_t> indices;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].split == split) indices.push_back(i);
  }
  return indices;
}

SampleSet load_samples(const DatasetManifest& manifest, const ModelGraph& graph) {
  SampleSet set;
  set.input_count = graph.input_count;
  set.input_hwc = graph.input_hwc;

  if (graph.input_count == 1) {
    for (const auto& row : manifest.rows) {
      const auto path = manifest.image_path(row);
      const ShoeprintImage image = read_pgm(path);
      check_image_dims(image, set.input_hwc[0], path.string());
      Sample sample;
      sample.inputs.push_back(normalized_pixels(image));
      sample.age = static_cast<double>(row.age);
      sample.gender = row.gender;
      sample.subject_id = row.subject_id;
      sample.split = row.split;
      set.samples.push_back(std::move(sample));
    }
    return set;
  }

  if (graph.input_count != 2) {
    throw ConfigError("architectures with " + std::to_string(graph.input_count) +
                      " inputs are not supported by the sample loader");
  }

  // Pair each subject's left and right prints.
  std::map<long long, std::vector<const ManifestRow*>> by_subject;
  for (const auto& row : manifest.rows) {
    if (row.side == Side::pair) {
      throw ConfigError("two-input architectures need separate left/right rows, got a pair row '" +
                        row.path + "'");
    }
    by_subject[row.subject_id].push_back(&row);
  }
  for (auto& [subject, rows] : by_subject) {
    auto order = [](const ManifestRow* a, const ManifestRow* b) {
      if (a->provenance != b->provenance) return a->provenance < b->provenance;
      return a->path < b->path;
    };
    std::vector<const ManifestRow*> lefts, rights;
    for (const ManifestRow* row : rows) {
      (row->side == Side::left ? lefts : rights).push_back(row);
    }
    std::sort(lefts.begin(), lefts.end(), order);
    std::sort(rights.begin(), rights.end(), order);
    if (lefts.size() != rights.size()) {
      throw ConfigError("subject " + std::to_string(subject) + " has " +
                        std::to_string(lefts.size()) + " left and " +
                        std::to_string(rights.size()) + " right prints; cannot pair them");
    }
    for (size_t i = 0; i < lefts.size(); ++i) {
      if (lefts[i]->split != rights[i]->split) {
        throw ConfigError("subject " + std::to_string(subject) +
                          " has left/right prints in different splits");
      }
      Sample sample;
      for (const ManifestRow* row : {lefts[i], rights[i]}) {
        const auto path = manifest.image_path(*row);
        const ShoeprintImage image = read_pgm(path);
        check_image_dims(image, set.input_hwc[sample.inputs.size()], path.string());
        sample.inputs.push_back(normalized_pixels(image));
      }
      sample.age = static_cast<double>(lefts[i]->age);
      sample.gender = lefts[i]->gender;
      sample.subject_id = subject;
      sample.split = lefts[i]->split;
      set.samples.push_back(std::move(sample));
    }
  }
  return set;
}

double evaluate_loss(ModelGraph& graph, const SampleSet& samples, Split split, LossKind kind,
                     const ClfConfig& clf_config, int batch_size) {
  const auto indices = samples.split_indices(split);
  if (indices.empty()) throw ConfigError("no samples in split '" + to_string(split) + "'");
  double weighted = 0.0;
  for (size_t begin = 0; begin < indices.size(); begin += static_cast<size_t>(batch_size)) {
    const size_t end = std::min(indices.size(), begin + static_cast<size_t>(batch_size));
    const std::vector<size_t> which(indices.begin() + static_cast<long long>(begin),
                                    indices.begin() + static_cast<long long>(end));
    const Tensor out = graph_forward(graph, make_batch(samples, which), Mode::infer, 0);
    weighted += head_loss(graph, out, samples, which, kind, clf_config).value *
                static_cast<double>(which.size());
  }
  return weighted / static_cast<double>(indices.size());
}

TrainHistory train(ModelGraph& graph, AdamState& state, const SampleSet& samples,
                   const TrainOptions& options) {
  if (options.epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (options.batch_size < 2) throw ConfigError("train: batch size must be >= 2 for batchnorm");

  const auto train_indices = samples.split_indices(Split::train);
  if (train_indices.empty()) throw ConfigError("train: no samples in the train split");
  const bool has_val = !samples.split_indices(Split::val).empty();

  TrainHistory history;
  history.initial_loss =
      evaluate_loss(graph, samples, Split::train, options.loss, options.clf, options.batch_size);
  double last_probe = history.initial_loss;

  for (int epoch = 0; epoch < options.epochs && !history.stopped_early; ++epoch) {
    std::vector<size_t> order = train_indices;
    Rng shuffle_rng(hash_combine(options.seed, 0x65706f63ULL + static_cast<std::uint64_t>(epoch)));
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<size_t>(shuffle_rng.uniform_int(0, static_cast<long long>(i) - 1))]);
    }

    double epoch_loss = 0.0;
    long long epoch_batches = 0;
    for (size_t begin = 0; begin < order.size(); begin += static_cast<size_t>(options.batch_size)) {
      const size_t end = std::min(order.size(), begin + static_cast<size_t>(options.batch_size));
      if (end - begin < 2) break;  // leftover too small for batchnorm
      const std::vector<size_t> which(order.begin() + static_cast<long long>(begin),
                                      order.begin() + static_cast<long long>(end));

      ForwardCache cache;
      const std::uint64_t step_seed = hash_combine(options.seed, graph.global_step);
      const Tensor out =
          graph_forward(graph, make_batch(samples, which), Mode::train, step_seed, &cache);
      const LossResult loss = head_loss(graph, out, samples, which, options.loss, options.clf);
      const auto grads = graph_backward(graph, cache, head_gradient(out, loss));
      adam_step(graph.params, grads, graph.decay_params, state, options.optimizer);
      graph.global_step += 1;
      history.steps += 1;
      epoch_loss += loss.value;
      epoch_batches += 1;

      if (options.stop_loss_ratio > 0.0 && options.probe_every > 0 &&
          history.steps % options.probe_every == 0) {
        last_probe = evaluate_loss(graph, samples, Split::train, options.loss, options.clf,
                                   options.batch_size);
        if (last_probe < options.stop_loss_ratio * history.initial_loss) {
          history.stopped_early = true;
          break;
        }
      }
      if (options.max_steps > 0 && history.steps >= options.max_steps) {
        history.stopped_early = true;
        break;
      }
    }

    history.train_loss.push_back(epoch_batches ? epoch_loss / static_cast<double>(epoch_batches)
                                               : history.initial_loss);
    history.val_loss.push_back(
        has_val ? evaluate_loss(graph, samples, Split::val, options.loss, options.clf,
                                options.batch_size)
                : -1.0);
  }

  history.final_loss =
      evaluate_loss(graph, samples, Split::train, options.loss, options.clf, options.batch_size);
  return history;
}

EvaluationBatch evaluate_regression(ModelGraph& graph, const SampleSet& samples, Split split,
                                    int batch_size) {
  if (graph.head != HeadKind::regression) {
    throw ConfigError("evaluate_regression needs a regression head");
  }
  const auto indices = samples.split_indices(split);
  if (indices.empty()) throw ConfigError("no samples in split '" + to_string(split) + "'");
  std::vector<double> actual, predicted;
  for (size_t begin = 0; begin < indices.size(); begin += static_cast<size_t>(batch_size)) {
    const size_t end = std::min(indices.size(), begin + static_cast<size_t>(batch_size));
    const std::vector<size_t> which(indices.begin() + static_cast<long long>(begin),
                                    indices.begin() + static_cast<long long>(end));
    const Tensor out = graph_forward(graph, make_batch(samples, which), Mode::infer, 0);
    for (size_t i = 0; i < which.size(); ++i) {
      actual.push_back(samples.samples[which[i]].age);
      predicted.push_back(out.data[i]);
    }
  }
  return EvaluationBatch(std::move(actual), std::move(predicted));
}

ClassificationCounts evaluate_classification(ModelGraph& graph, const SampleSet& samples,
                                             Split split, int batch_size) {
  if (graph.head != HeadKind::classification) {
    throw ConfigError("evaluate_classification needs a classification head");
  }
  const auto indices = samples.split_indices(split);
  if (indices.empty()) throw ConfigError("no samples in split '" + to_string(split) + "'");
  ClassificationCounts counts;
  for (size_t begin = 0; begin < indices.size(); begin += static_cast<size_t>(batch_size)) {
    const size_t end = std::min(indices.size(), begin + static_cast<size_t>(batch_size));
    const std::vector<size_t> which(indices.begin() + static_cast<long long>(begin),
                                    indices.begin() + static_cast<long long>(end));
    const Tensor out = graph_forward(graph, make_batch(samples, which), Mode::infer, 0);
    for (size_t i = 0; i < which.size(); ++i) {
      const Gender predicted =
          out.at(static_cast<int>(i), 0) >= out.at(static_cast<int>(i), 1) ? Gender::male
                                                                           : Gender::female;
      counts.add(samples.samples[which[i]].gender, predicted);
    }
  }
  return counts;
}

}  // namespace shoeprint
