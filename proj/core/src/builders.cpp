#include "shoeprint/builders.hpp"

#include <cmath>

#include "shoeprint/rng.hpp"

namespace shoeprint {
namespace {

constexpr double kRegressionBiasInit = 40.0;  // rough midpoint of the age range

struct NodeMeta {
  int h = 0, w = 0, c = 0;  // h == 0 means a rank-2 [batch, c] activation
};

// Assembles a ModelGraph while tracking activation extents, creating and
// He-initializing parameters on first use. Re-using a parameter name ties
// the weights.
class GraphAssembler {
 public:
  GraphAssembler(const std::string& arch, const ArchConfig& config, HeadKind head) {
    graph_.arch = arch;
    graph_.config = config;
    graph_.head = head;
  }

  int input(int slot, int h, int w, int c) {
    LayerNode node;
    node.kind = NodeKind::input;
    node.name = "input" + std::to_string(slot);
    node.input_slot = slot;
    graph_.input_hwc.push_back({h, w, c});
    graph_.input_count = static_cast<int>(graph_.input_hwc.size());
    return push(node, {h, w, c});
  }

  int conv(const std::string& param, int in, int filters, int filter_size, Padding padding) {
    const NodeMeta& m = meta_at(in);
    param_or_create(param, {filter_size, filter_size, m.c, filters},
                    he_std(filter_size * filter_size * m.c));
    LayerNode node;
    node.kind = NodeKind::conv;
    node.name = param;
    node.inputs = {in};
    node.conv = {filters, filter_size, 1, padding};
    node.weights = param;
    NodeMeta out = m;
    out.c = filters;
    if (padding == Padding::valid) {
      out.h = m.h - filter_size + 1;
      out.w = m.w - filter_size + 1;
      if (out.h < 1 || out.w < 1) {
        throw ConfigError("conv '" + param + "' does not fit a " + std::to_string(m.h) + "x" +
                          std::to_string(m.w) + " activation");
      }
    }
    return push(node, out);
  }

  int batchnorm(const std::string& prefix, int in, const std::string& slot_name) {
    const NodeMeta& m = meta_at(in);
    param_or_create_const(prefix + ".gamma", {m.c}, 1.0);
    param_or_create_const(prefix + ".beta", {m.c}, 0.0);
    LayerNode node;
    node.kind = NodeKind::batchnorm;
    node.name = slot_name;
    node.inputs = {in};
    node.weights = prefix + ".gamma";
    node.bias = prefix + ".beta";
    node.bn_slot = static_cast<int>(graph_.bn_stats.size());
    graph_.bn_stats.emplace_back(m.c);
    graph_.bn_slot_names.push_back(slot_name);
    return push(node, m);
  }

  int relu(int in) {
    LayerNode node;
    node.kind = NodeKind::relu;
    node.name = "relu";
    node.inputs = {in};
    return push(node, meta_at(in));
  }

  int pool(int in) {
    const NodeMeta& m = meta_at(in);
    if (m.h < 2 || m.w < 2) {
      throw ConfigError("input too small for the pooling depth: prints must be at least " +
                        std::to_string(1 << graph_.config.blocks) + " pixels on each side");
    }
    LayerNode node;
    node.kind = NodeKind::maxpool;
    node.name = "pool";
    node.inputs = {in};
    node.pool_window = 2;
    node.pool_stride = 2;
    return push(node, {m.h / 2, m.w / 2, m.c});
  }

  int concat(const std::vector<int>& parts) {
    const NodeMeta& first = meta_at(parts.at(0));
    NodeMeta out = first;
    out.c = 0;
    for (int part : parts) out.c += meta_at(part).c;
    LayerNode node;
    node.kind = NodeKind::concat;
    node.name = "concat";
    node.inputs = parts;
    return push(node, out);
  }

  int dense(const std::string& prefix, int in, int units, double bias_init = 0.0) {
    const NodeMeta& m = meta_at(in);
    const int features = m.h == 0 ? m.c : m.h * m.w * m.c;
    param_or_create(prefix + ".w", {features, units}, he_std(features));
    param_or_create_const(prefix + ".b", {units}, bias_init);
    LayerNode node;
    node.kind = NodeKind::dense;
    node.name = prefix;
    node.inputs = {in};
    node.weights = prefix + ".w";
    node.bias = prefix + ".b";
    return push(node, {0, 0, units});
  }

  int dropout(int in, double rate) {
    LayerNode node;
    node.kind = NodeKind::dropout;
    node.name = "dropout";
    node.inputs = {in};
    node.rate = rate;
    return push(node, meta_at(in));
  }

  int global_pool(int in) {
    const NodeMeta& m = meta_at(in);
    LayerNode node;
    node.kind = NodeKind::global_pool;
    node.name = "gap";
    node.inputs = {in};
    return push(node, {0, 0, m.c});
  }

  int sigmoid(int in) {
    LayerNode node;
    node.kind = NodeKind::sigmoid;
    node.name = "sigmoid";
    node.inputs = {in};
    return push(node, meta_at(in));
  }

  int scale(int features, int gates) {
    LayerNode node;
    node.kind = NodeKind::scale;
    node.name = "scale";
    node.inputs = {features, gates};
    return push(node, meta_at(features));
  }

  int noise(int in, double sigma) {
    LayerNode node;
    node.kind = NodeKind::noise;
    node.name = "noise";
    node.inputs = {in};
    node.rate = sigma;
    return push(node, meta_at(in));
  }

  int softmax(int in) {
    LayerNode node;
    node.kind = NodeKind::softmax;
    node.name = "softmax";
    node.inputs = {in};
    return push(node, meta_at(in));
  }

  int channels_of(int node) const { return meta_at(node).c; }

  ModelGraph finish(std::vector<std::string> decay_params) {
    graph_.decay_params = std::move(decay_params);
    validate_graph(graph_);
    return std::move(graph_);
  }

 private:
  int push(LayerNode node, NodeMeta meta) {
    graph_.nodes.push_back(std::move(node));
    meta_.push_back(meta);
    return static_cast<int>(graph_.nodes.size()) - 1;
  }

  const NodeMeta& meta_at(int node) const { return meta_.at(static_cast<size_t>(node)); }

  double he_std(int fan_in) const { return std::sqrt(2.0 / static_cast<double>(fan_in)); }

  void param_or_create(const std::string& name, std::vector<int> shape, double stddev) {
    const auto it = graph_.params.find(name);
    if (it != graph_.params.end()) {
      if (it->second.shape != shape) {
        throw ConfigError("tied parameter '" + name + "' re-used with a different shape");
      }
      return;
    }
    Tensor tensor(std::move(shape));
    Rng rng(hash_combine(graph_.config.init_seed, fnv1a64(name)));
    for (double& v : tensor.data) v = rng.gaussian(0.0, stddev);
    graph_.params.emplace(name, std::move(tensor));
  }

  void param_or_create_const(const std::string& name, std::vector<int> shape, double value) {
    if (graph_.params.count(name)) return;
    Tensor tensor(std::move(shape));
    for (double& v : tensor.data) v = value;
    graph_.params.emplace(name, std::move(tensor));
  }

  ModelGraph graph_;
  std::vector<NodeMeta> meta_;
};

void check_common(const ArchConfig& config) {
  if (config.blocks < 1) throw ConfigError("architecture needs at least one block");
  if (config.convs_per_block < 1) throw ConfigError("blocks need at least one conv");
  if (config.base_filters < 1) throw ConfigError("base_filters must be >= 1");
  if (config.fc_widths.empty()) throw ConfigError("at least one fully connected layer is required");
  if (config.fc_widths.size() != config.dropout_rates.size()) {
    throw ConfigError("fc_widths and dropout_rates must have the same length");
  }
  for (double rate : config.dropout_rates) {
    if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rates must be in [0, 1)");
  }
}

int block_filters(const ArchConfig& config, int block) {
  return config.base_filters << (block - 1);
}

// One [conv3x3 -> bn -> relu] * convs_per_block -> pool block.
int plain_block(GraphAssembler& a, const ArchConfig& config, int in, int block,
                const std::string& param_prefix, const std::string& slot_prefix) {
  int cur = in;
  const int filters = block_filters(config, block);
  const std::string pp = param_prefix.empty() ? "" : param_prefix + ".";
  const std::string sp = slot_prefix.empty() ? "" : slot_prefix + ".";
  const std::string blk = "block" + std::to_string(block);
  for (int c = 1; c <= config.convs_per_block; ++c) {
    cur = a.conv(pp + blk + ".conv" + std::to_string(c) + ".w", cur, filters, 3, Padding::same);
    cur = a.batchnorm(pp + blk + ".bn" + std::to_string(c), cur,
                      sp + blk + ".bn" + std::to_string(c));
    cur = a.relu(cur);
  }
  return a.pool(cur);
}

int fc_head(GraphAssembler& a, int in, const std::vector<int>& widths,
            const std::vector<double>& rates) {
  int cur = in;
  for (size_t j = 0; j < widths.size(); ++j) {
    cur = a.dense("fc" + std::to_string(j + 1), cur, widths[j]);
    cur = a.relu(cur);
    cur = a.dropout(cur, rates[j]);
  }
  return cur;
}

std::vector<std::string> default_decay(const std::vector<int>& fc_widths) {
  // L2 acts on the second fully connected layer when there is one
  return {fc_widths.size() >= 2 ? "fc2.w" : "fc1.w"};
}

// Shared skip-dense trunk: block k sees the previous block's output plus all
// earlier block outputs, max-pooled to the current resolution and passed
// through a channel-preserving 1x1 projection.
int skip_dense_trunk(GraphAssembler& a, const ArchConfig& config, int stem_out) {
  std::vector<int> block_out;
  int cur = stem_out;
  for (int k = 1; k <= config.blocks; ++k) {
    if (k >= 2) {
      std::vector<int> parts;
      for (int i = 1; i <= k - 2; ++i) {
        int skip = block_out[static_cast<size_t>(i - 1)];
        for (int hop = 0; hop < k - 1 - i; ++hop) skip = a.pool(skip);
        parts.push_back(a.conv("block" + std::to_string(k) + ".skip" + std::to_string(i) + ".w",
                               skip, block_filters(config, i), 1, Padding::valid));
      }
      parts.push_back(block_out.back());
      cur = parts.size() > 1 ? a.concat(parts) : parts[0];
    }
    cur = plain_block(a, config, cur, k, "", "");
    block_out.push_back(cur);
  }

  if (config.blocks == 1) return block_out[0];
  std::vector<int> merged;
  for (int i = 1; i < config.blocks; ++i) {
    int skip = block_out[static_cast<size_t>(i - 1)];
    for (int hop = 0; hop < config.blocks - i; ++hop) skip = a.pool(skip);
    merged.push_back(a.conv("merge.skip" + std::to_string(i) + ".w", skip,
                            block_filters(config, i), 1, Padding::valid));
  }
  merged.push_back(block_out.back());
  return a.concat(merged);
}

ModelGraph build_skip_dense_regressor(const ArchConfig& config, const std::string& name,
                                      int input_w) {
  check_common(config);
  GraphAssembler a(name, config, HeadKind::regression);
  const int in = a.input(0, config.print_h, input_w, 1);
  int cur = a.relu(a.batchnorm("stem.bn", in, "stem.bn"));
  cur = skip_dense_trunk(a, config, cur);
  cur = fc_head(a, cur, config.fc_widths, config.dropout_rates);
  a.dense("head", cur, 1, kRegressionBiasInit);
  return a.finish(default_decay(config.fc_widths));
}

}  // namespace

ModelGraph build_shoenet(const ArchConfig& config) {
  return build_skip_dense_regressor(config, "shoenet", 2 * config.print_w);
}

ModelGraph build_lr_cnn(const ArchConfig& config) {
  return build_skip_dense_regressor(config, "lr", config.print_w);
}

ModelGraph build_fusion(const ArchConfig& config, int merge_after_block, const std::string& name) {
  check_common(config);
  if (merge_after_block < 1 || merge_after_block > config.blocks) {
    throw ConfigError("fusion merge point must be within [1, blocks]");
  }
  GraphAssembler a(name, config, HeadKind::regression);
  const int in_left = a.input(0, config.print_h, config.print_w, 1);
  const int in_right = a.input(1, config.print_h, config.print_w, 1);

  int left = a.relu(a.batchnorm("left.stem.bn", in_left, "left.stem.bn"));
  int right = a.relu(a.batchnorm("right.stem.bn", in_right, "right.stem.bn"));
  for (int k = 1; k <= merge_after_block; ++k) {
    left = plain_block(a, config, left, k, "left", "left");
    right = plain_block(a, config, right, k, "right", "right");
  }
  int cur = a.concat({left, right});
  for (int k = merge_after_block + 1; k <= config.blocks; ++k) {
    cur = plain_block(a, config, cur, k, "trunk", "trunk");
  }
  cur = fc_head(a, cur, config.fc_widths, config.dropout_rates);
  a.dense("head", cur, 1, kRegressionBiasInit);
  return a.finish(default_decay(config.fc_widths));
}

ModelGraph build_mirror(const ArchConfig& config, int share_level_block, const std::string& name) {
  check_common(config);
  if (share_level_block < 1 || share_level_block > config.blocks) {
    throw ConfigError("recalibration level must be within [1, blocks]");
  }
  GraphAssembler a(name, config, HeadKind::regression);
  const int in_left = a.input(0, config.print_h, config.print_w, 1);
  const int in_right = a.input(1, config.print_h, config.print_w, 1);

  // Trunk parameters carry no branch prefix, so both branches share them;
  // only the batchnorm running statistics stay per-branch.
  int left = a.relu(a.batchnorm("stem.bn", in_left, "left.stem.bn"));
  int right = a.relu(a.batchnorm("stem.bn", in_right, "right.stem.bn"));
  for (int k = 1; k <= config.blocks; ++k) {
    left = plain_block(a, config, left, k, "", "left");
    right = plain_block(a, config, right, k, "", "right");
    if (k == share_level_block) {
      const int channels = a.channels_of(left);
      const int bottleneck = channels < 4 ? 1 : channels / 4;
      const auto gate_from = [&](int descriptor_src) {
        int d = a.global_pool(descriptor_src);
        d = a.noise(d, config.noise_sigma);
        d = a.relu(a.dense("recal.fc1", d, bottleneck));
        return a.sigmoid(a.dense("recal.fc2", d, channels));
      };
      // each branch is gated by the other branch's descriptor
      const int gate_for_left = gate_from(right);
      const int gate_for_right = gate_from(left);
      left = a.scale(left, gate_for_left);
      right = a.scale(right, gate_for_right);
    }
  }
  int cur = a.concat({left, right});
  cur = fc_head(a, cur, config.fc_widths, config.dropout_rates);
  a.dense("head", cur, 1, kRegressionBiasInit);
  return a.finish(default_decay(config.fc_widths));
}

ModelGraph build_gender_net(const ArchConfig& config) {
  check_common(config);
  if (config.fc_scale <= 0.0) throw ConfigError("fc_scale must be positive");
  GraphAssembler a("gender", config, HeadKind::classification);
  const int in = a.input(0, config.print_h, config.print_w, 1);
  int cur = a.relu(a.batchnorm("stem.bn", in, "stem.bn"));
  cur = skip_dense_trunk(a, config, cur);

  const std::vector<int> base_widths = {512, 384, 256};
  std::vector<int> widths;
  for (int w : base_widths) {
    widths.push_back(
        std::max(1, static_cast<int>(std::lround(static_cast<double>(w) / config.fc_scale))));
  }
  const std::vector<double> rates =
      config.dropout_rates.size() == widths.size()
          ? config.dropout_rates
          : std::vector<double>(widths.size(), config.dropout_rates[0]);
  cur = fc_head(a, cur, widths, rates);
  const int logits = a.dense("head", cur, 2);
  a.softmax(logits);
  return a.finish(default_decay(widths));
}

ModelGraph build_arch(const std::string& name, const ArchConfig& config) {
  const int mid = (config.blocks + 1) / 2;
  if (name == "shoenet") return build_shoenet(config);
  if (name == "lr") return build_lr_cnn(config);
  if (name == "fm-early") return build_fusion(config, 1, name);
  if (name == "fm-in") return build_fusion(config, mid, name);
  if (name == "fm-late") return build_fusion(config, config.blocks, name);
  if (name == "mm-early") return build_mirror(config, 1, name);
  if (name == "mm-mid") return build_mirror(config, mid, name);
  if (name == "mm-late") return build_mirror(config, config.blocks, name);
  if (name == "gender") return build_gender_net(config);
  std::string known;
  for (const auto& arch : known_arch_names()) known += (known.empty() ? "" : ", ") + arch;
  throw ConfigError("unknown architecture '" + name + "' (known: " + known + ")");
}

const std::vector<std::string>& known_arch_names() {
  static const std::vector<std::string> names = {
      "shoenet", "lr",      "fm-early", "fm-in",  "fm-late",
      "mm-early", "mm-mid", "mm-late",  "gender",
  };
  return names;
}

}  // namespace shoeprint
