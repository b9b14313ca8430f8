#include "shoeprint/graph.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "shoeprint/rng.hpp"

namespace shoeprint {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void accumulate(Tensor& into, const Tensor& grad) {
  if (into.data.empty()) {
    into = grad;
    return;
  }
  if (!into.same_shape(grad)) {
    throw ShapeError("gradient accumulation shape mismatch: " + into.shape_string() + " vs " +
                     grad.shape_string());
  }
  for (long long i = 0; i < grad.size(); ++i) into.data[static_cast<size_t>(i)] += grad.data[static_cast<size_t>(i)];
}

const Tensor& param_of(const ModelGraph& graph, const std::string& name) {
  const auto it = graph.params.find(name);
  if (it == graph.params.end()) throw ConfigError("graph references unknown parameter '" + name + "'");
  return it->second;
}

std::uint64_t node_seed(std::uint64_t run_seed, int node_id) {
  return hash_combine(run_seed, 0x6e6f6465ULL + static_cast<std::uint64_t>(node_id));
}

}  // namespace

ArchConfig ArchConfig::full_scale() {
  ArchConfig cfg;
  cfg.print_h = 224;
  cfg.print_w = 112;
  cfg.base_filters = 32;
  cfg.blocks = 5;
  cfg.convs_per_block = 3;
  cfg.fc_widths = {384, 384, 384};
  cfg.fc_scale = 1.0;
  return cfg;
}

ArchConfig ArchConfig::desk_scale() { return ArchConfig{}; }

ArchConfig ArchConfig::tiny_scale() {
  ArchConfig cfg;
  cfg.print_h = 16;
  cfg.print_w = 8;
  cfg.base_filters = 2;
  cfg.blocks = 3;
  cfg.convs_per_block = 2;
  cfg.fc_widths = {8, 8, 8};
  cfg.fc_scale = 48.0;
  return cfg;
}

std::string canonical_config_string(const std::string& arch, const ArchConfig& config) {
  std::ostringstream out;
  out << "arch=" << arch;
  out << ";print=" << config.print_h << 'x' << config.print_w;
  out << ";base_filters=" << config.base_filters;
  out << ";blocks=" << config.blocks;
  out << ";convs_per_block=" << config.convs_per_block;
  out << ";fc=";
  for (size_t i = 0; i < config.fc_widths.size(); ++i) {
    if (i) out << ',';
    out << config.fc_widths[i];
  }
  out << ";dropout=";
  for (size_t i = 0; i < config.dropout_rates.size(); ++i) {
    if (i) out << ',';
    out << format_double(config.dropout_rates[i]);
  }
  out << ";fc_scale=" << format_double(config.fc_scale);
  out << ";bn_momentum=" << format_double(config.bn_momentum);
  out << ";bn_eps=" << format_double(config.bn_eps);
  out << ";noise_sigma=" << format_double(config.noise_sigma);
  out << ";init_seed=" << config.init_seed;
  return out.str();
}

std::array<std::uint8_t, 32> arch_fingerprint(const ModelGraph& graph) {
  const std::string canon = canonical_config_string(graph.arch, graph.config);
  std::array<std::uint8_t, 32> digest{};
  for (int lane = 0; lane < 4; ++lane) {
    const std::string salted = canon + '#' + std::to_string(lane);
    const std::uint64_t h = fnv1a64(salted);
    for (int b = 0; b < 8; ++b) {
      digest[static_cast<size_t>(lane * 8 + b)] = static_cast<std::uint8_t>(h >> (8 * b));
    }
  }
  return digest;
}

void validate_graph(const ModelGraph& graph) {
  if (graph.nodes.empty()) throw ConfigError("graph has no nodes");
  if (graph.input_count < 1) throw ConfigError("graph must take at least one input");
  if (static_cast<int>(graph.input_hwc.size()) != graph.input_count) {
    throw ConfigError("graph input shape table does not match input count");
  }

  std::vector<int> slot_uses(static_cast<size_t>(graph.input_count), 0);
  std::vector<bool> consumed(graph.nodes.size(), false);

  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    const LayerNode& node = graph.nodes[i];
    if (node.kind == NodeKind::input) {
      if (!node.inputs.empty()) throw ConfigError("input node '" + node.name + "' has producers");
      if (node.input_slot < 0 || node.input_slot >= graph.input_count) {
        throw ConfigError("input node '" + node.name + "' uses a bad slot");
      }
      slot_uses[static_cast<size_t>(node.input_slot)] += 1;
    } else {
      if (node.inputs.empty()) throw ConfigError("node '" + node.name + "' has no producers");
      for (int producer : node.inputs) {
        if (producer < 0 || producer >= static_cast<int>(i)) {
          throw ConfigError("node '" + node.name + "' references node " +
                            std::to_string(producer) + " which is not earlier in the graph");
        }
        consumed[static_cast<size_t>(producer)] = true;
      }
    }
    if (node.kind == NodeKind::conv || node.kind == NodeKind::dense ||
        node.kind == NodeKind::batchnorm) {
      param_of(graph, node.weights);
      if (node.kind != NodeKind::conv) param_of(graph, node.bias);
    }
    if (node.kind == NodeKind::batchnorm) {
      if (node.bn_slot < 0 || node.bn_slot >= static_cast<int>(graph.bn_stats.size())) {
        throw ConfigError("node '" + node.name + "' uses a bad batchnorm slot");
      }
    }
  }

  for (int slot = 0; slot < graph.input_count; ++slot) {
    if (slot_uses[static_cast<size_t>(slot)] != 1) {
      throw ConfigError("graph input slot " + std::to_string(slot) + " is used " +
                        std::to_string(slot_uses[static_cast<size_t>(slot)]) + " times");
    }
  }
  for (size_t i = 0; i + 1 < graph.nodes.size(); ++i) {
    if (!consumed[i]) {
      throw ConfigError("node '" + graph.nodes[i].name + "' feeds nothing");
    }
  }
  if (graph.bn_slot_names.size() != graph.bn_stats.size()) {
    throw ConfigError("batchnorm slot names out of sync with running stats");
  }
}

long long param_count(const ModelGraph& graph) {
  long long count = 0;
  for (const auto& [name, tensor] : graph.params) count += tensor.size();
  return count;
}

Tensor graph_forward(ModelGraph& graph, const std::vector<Tensor>& inputs, Mode mode,
                     std::uint64_t seed, ForwardCache* cache) {
  if (static_cast<int>(inputs.size()) != graph.input_count) {
    throw ShapeError("graph expects " + std::to_string(graph.input_count) + " inputs, got " +
                     std::to_string(inputs.size()));
  }
  const int batch = inputs[0].shape[0];
  for (int slot = 0; slot < graph.input_count; ++slot) {
    const Tensor& in = inputs[static_cast<size_t>(slot)];
    require_rank(in, 4, "graph input");
    const auto& want = graph.input_hwc[static_cast<size_t>(slot)];
    if (in.shape[0] != batch || in.shape[1] != want[0] || in.shape[2] != want[1] ||
        in.shape[3] != want[2]) {
      throw ShapeError("graph input " + std::to_string(slot) + " is " + in.shape_string() +
                       ", expected [" + std::to_string(batch) + "x" + std::to_string(want[0]) +
                       "x" + std::to_string(want[1]) + "x" + std::to_string(want[2]) + "]");
    }
  }

  ForwardCache local;
  ForwardCache& fc = cache ? *cache : local;
  fc.mode = mode;
  fc.seed = seed;
  fc.out.assign(graph.nodes.size(), Tensor());
  fc.bn.assign(graph.bn_stats.size(), BnCache());
  fc.pool_argmax.assign(graph.nodes.size(), {});

  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    const LayerNode& node = graph.nodes[i];
    const auto in = [&](size_t which) -> const Tensor& {
      return fc.out[static_cast<size_t>(node.inputs[which])];
    };
    switch (node.kind) {
      case NodeKind::input:
        fc.out[i] = inputs[static_cast<size_t>(node.input_slot)];
        break;
      case NodeKind::conv:
        fc.out[i] = conv2d(in(0), param_of(graph, node.weights), node.conv);
        break;
      case NodeKind::batchnorm:
        fc.out[i] = batchnorm(in(0), param_of(graph, node.weights), param_of(graph, node.bias),
                              graph.bn_stats[static_cast<size_t>(node.bn_slot)],
                              graph.config.bn_momentum, graph.config.bn_eps, mode,
                              mode == Mode::train ? &fc.bn[static_cast<size_t>(node.bn_slot)]
                                                  : nullptr);
        break;
      case NodeKind::relu:
        fc.out[i] = relu(in(0));
        break;
      case NodeKind::maxpool:
        fc.out[i] = maxpool2d(in(0), node.pool_window, node.pool_stride, &fc.pool_argmax[i]);
        break;
      case NodeKind::concat: {
        std::vector<const Tensor*> parts;
        parts.reserve(node.inputs.size());
        for (int producer : node.inputs) parts.push_back(&fc.out[static_cast<size_t>(producer)]);
        fc.out[i] = concat_channels(parts);
        break;
      }
      case NodeKind::dense:
        fc.out[i] = dense(in(0), param_of(graph, node.weights), param_of(graph, node.bias));
        break;
      case NodeKind::dropout:
        fc.out[i] = dropout(in(0), node.rate, mode, node_seed(seed, static_cast<int>(i)));
        break;
      case NodeKind::global_pool:
        fc.out[i] = global_avg_pool(in(0));
        break;
      case NodeKind::sigmoid:
        fc.out[i] = sigmoid(in(0));
        break;
      case NodeKind::scale:
        fc.out[i] = channel_scale(in(0), in(1));
        break;
      case NodeKind::noise:
        fc.out[i] = mode == Mode::train
                        ? add_gaussian_noise(in(0), node.rate, node_seed(seed, static_cast<int>(i)))
                        : in(0);
        break;
      case NodeKind::softmax:
        fc.out[i] = softmax_rows(in(0));
        break;
    }
  }
  return fc.out.back();
}

std::map<std::string, Tensor> graph_backward(const ModelGraph& graph, const ForwardCache& cache,
                                             const Tensor& grad_head) {
  if (cache.mode != Mode::train) {
    throw ConfigError("graph_backward needs a train-mode forward cache");
  }
  if (cache.out.size() != graph.nodes.size()) {
    throw ConfigError("forward cache does not match the graph");
  }

  std::vector<Tensor> node_grad(graph.nodes.size());
  node_grad.back() = grad_head;
  if (!grad_head.same_shape(cache.out.back())) {
    throw ShapeError("head gradient " + grad_head.shape_string() + " does not match output " +
                     cache.out.back().shape_string());
  }

  std::map<std::string, Tensor> param_grads;
  const auto add_param_grad = [&](const std::string& name, Tensor&& grad) {
    accumulate(param_grads[name], grad);
  };

  for (int id = static_cast<int>(graph.nodes.size()) - 1; id >= 0; --id) {
    const LayerNode& node = graph.nodes[static_cast<size_t>(id)];
    Tensor& upstream = node_grad[static_cast<size_t>(id)];
    if (upstream.data.empty()) continue;  // not on any path to the head

    const auto in_out = [&](size_t which) -> const Tensor& {
      return cache.out[static_cast<size_t>(node.inputs[which])];
    };
    const auto send = [&](size_t which, Tensor&& grad) {
      accumulate(node_grad[static_cast<size_t>(node.inputs[which])], grad);
    };

    switch (node.kind) {
      case NodeKind::input:
        break;
      case NodeKind::conv: {
        Tensor grad_in, grad_w;
        conv2d_backward(in_out(0), param_of(graph, node.weights), node.conv, upstream, &grad_in,
                        &grad_w);
        add_param_grad(node.weights, std::move(grad_w));
        send(0, std::move(grad_in));
        break;
      }
      case NodeKind::batchnorm: {
        Tensor grad_in, grad_gamma, grad_beta;
        batchnorm_backward(upstream, cache.bn[static_cast<size_t>(node.bn_slot)],
                           param_of(graph, node.weights), &grad_in, &grad_gamma, &grad_beta);
        add_param_grad(node.weights, std::move(grad_gamma));
        add_param_grad(node.bias, std::move(grad_beta));
        send(0, std::move(grad_in));
        break;
      }
      case NodeKind::relu:
        send(0, relu_backward(in_out(0), upstream));
        break;
      case NodeKind::maxpool:
        send(0, maxpool2d_backward(in_out(0).shape, cache.pool_argmax[static_cast<size_t>(id)],
                                   upstream));
        break;
      case NodeKind::concat: {
        std::vector<int> counts;
        counts.reserve(node.inputs.size());
        for (int producer : node.inputs) {
          counts.push_back(cache.out[static_cast<size_t>(producer)].shape[3]);
        }
        std::vector<Tensor> parts = split_channels(upstream, counts);
        for (size_t which = 0; which < parts.size(); ++which) {
          send(which, std::move(parts[which]));
        }
        break;
      }
      case NodeKind::dense: {
        Tensor grad_in, grad_w, grad_b;
        dense_backward(in_out(0), param_of(graph, node.weights), upstream, &grad_in, &grad_w,
                       &grad_b);
        add_param_grad(node.weights, std::move(grad_w));
        add_param_grad(node.bias, std::move(grad_b));
        send(0, std::move(grad_in));
        break;
      }
      case NodeKind::dropout:
        send(0, dropout_backward(upstream, node.rate, cache.mode, node_seed(cache.seed, id)));
        break;
      case NodeKind::global_pool:
        send(0, global_avg_pool_backward(in_out(0).shape, upstream));
        break;
      case NodeKind::sigmoid:
        send(0, sigmoid_backward(cache.out[static_cast<size_t>(id)], upstream));
        break;
      case NodeKind::scale: {
        Tensor grad_features, grad_gates;
        channel_scale_backward(in_out(0), in_out(1), upstream, &grad_features, &grad_gates);
        send(0, std::move(grad_features));
        send(1, std::move(grad_gates));
        break;
      }
      case NodeKind::noise:
        send(0, std::move(upstream));
        break;
      case NodeKind::softmax:
        send(0, softmax_rows_backward(cache.out[static_cast<size_t>(id)], upstream));
        break;
    }
  }

  return param_grads;
}

}  // namespace shoeprint
