#include "shoeprint/graphcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "shoeprint/error.hpp"
#include "shoeprint/loss.hpp"
#include "shoeprint/rng.hpp"

namespace shoeprint {

namespace {

LossResult loss_at_head(const ModelGraph& graph, const Tensor& output,
                        const std::vector<double>& ages, const std::vector<int>& labels,
                        const GraphCheckOptions& options) {
  if (options.loss == LossKind::cross_entropy) {
    if (graph.head != HeadKind::classification) {
      throw ConfigError("cross-entropy checks need a classification head");
    }
    return cross_entropy_loss(output, labels);
  }
  if (graph.head != HeadKind::regression) {
    throw ConfigError(to_string(options.loss) + " checks need a regression head");
  }
  EvaluationBatch batch(ages, output.data);
  return options.loss == LossKind::clf ? clf_loss(batch, options.clf) : mse_loss(batch);
}

}  // namespace

GradCheckReport check_graph_gradients(ModelGraph& graph, const GraphCheckOptions& options) {
  if (options.batch < 2) throw ConfigError("gradient checks need batch >= 2 for batchnorm");

  std::vector<Tensor> inputs;
  for (int slot = 0; slot < graph.input_count; ++slot) {
    const auto& hwc = graph.input_hwc[static_cast<size_t>(slot)];
    Tensor t({options.batch, hwc[0], hwc[1], hwc[2]});
    Rng rng(hash_combine(options.seed, 0x696e7075u + static_cast<std::uint64_t>(slot)));
    for (double& v : t.data) v = rng.uniform();
    inputs.push_back(std::move(t));
  }

  // Targets sit well away from the piecewise-loss kinks at |d| = 0 and
  // |d| = threshold: a fresh head predicts near its bias initialization.
  std::vector<double> ages;
  std::vector<int> labels;
  for (int i = 0; i < options.batch; ++i) {
    ages.push_back(i % 2 ? 25.0 : 55.0);
    labels.push_back(i % 2);
  }

  const std::uint64_t run_seed = hash_combine(options.seed, 0x72756eu);
  const auto loss_value = [&]() {
    const Tensor output = graph_forward(graph, inputs, Mode::train, run_seed);
    return loss_at_head(graph, output, ages, labels, options).value;
  };

  const std::vector<BnStats> saved_stats = graph.bn_stats;
  ForwardCache cache;
  const Tensor output = graph_forward(graph, inputs, Mode::train, run_seed, &cache);
  const LossResult base = loss_at_head(graph, output, ages, labels, options);
  Tensor grad_head(output.shape);
  std::copy(base.grad.begin(), base.grad.end(), grad_head.data.begin());
  const std::map<std::string, Tensor> grads = graph_backward(graph, cache, grad_head);

  // Proportional coordinate budget with largest-remainder rounding.
  std::vector<std::string> names;
  long long total_volume = 0;
  for (const auto& [name, tensor] : graph.params) {
    names.push_back(name);
    total_volume += static_cast<long long>(tensor.data.size());
  }
  const long long budget = std::max<long long>(options.total_coords,
                                               static_cast<long long>(names.size()));
  std::vector<long long> coords(names.size(), 0);
  std::vector<std::pair<double, size_t>> remainders;
  long long assigned = 0;
  for (size_t i = 0; i < names.size(); ++i) {
    const double exact = static_cast<double>(budget) *
                         static_cast<double>(graph.params.at(names[i]).data.size()) /
                         static_cast<double>(total_volume);
    coords[i] = std::max<long long>(1, static_cast<long long>(std::floor(exact)));
    assigned += coords[i];
    remainders.push_back({exact - std::floor(exact), i});
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (size_t i = 0; assigned < budget && i < remainders.size(); ++i, ++assigned) {
    ++coords[remainders[i].second];
  }

  std::vector<GradCheckReport> reports;
  for (size_t i = 0; i < names.size(); ++i) {
    const std::string& name = names[i];
    auto grad_it = grads.find(name);
    if (grad_it == grads.end()) {
      throw VerificationError("backward produced no gradient for parameter '" + name + "'");
    }
    reports.push_back(finite_difference_check(
        name, graph.params.at(name).data, grad_it->second.data, loss_value, options.epsilon,
        options.tolerance, static_cast<int>(coords[i]),
        hash_combine(options.seed, fnv1a64(name)), /*skip_nonsmooth=*/true));
  }
  graph.bn_stats = saved_stats;
  return merge_reports(reports, options.tolerance);
}

}  // namespace shoeprint
