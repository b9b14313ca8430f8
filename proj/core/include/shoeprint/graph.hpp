#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "shoeprint/layers.hpp"
#include "shoeprint/tensor.hpp"

namespace shoeprint {

enum class NodeKind {
  input,
  conv,
  batchnorm,
  relu,
  maxpool,
  concat,
  dense,
  dropout,
  global_pool,
  sigmoid,
  scale,    // channel-wise gating: inputs = {features, gates}
  noise,    // additive Gaussian on the activations, train mode only
  softmax,
};

enum class HeadKind { regression, classification };

struct LayerNode {
  NodeKind kind = NodeKind::input;
  std::string name;
  std::vector<int> inputs;  // producer node ids, all smaller than this node's id

  ConvSpec conv{};          // conv nodes
  std::string weights;      // conv kernel / dense weights / batchnorm gamma
  std::string bias;         // dense bias / batchnorm beta
  int bn_slot = -1;         // batchnorm running-stats slot
  int pool_window = 0;
  int pool_stride = 0;
  double rate = 0.0;        // dropout rate or noise sigma
  int input_slot = 0;       // input nodes: which graph input feeds this node
};

// Structural description of one architecture instance. All fields shape the
// generated graph and are folded into the checkpoint fingerprint.
struct ArchConfig {
  int print_h = 64;           // single-print canvas
  int print_w = 32;
  int base_filters = 8;       // block 1 width; doubles each block
  int blocks = 3;
  int convs_per_block = 3;
  std::vector<int> fc_widths = {64, 64, 64};
  std::vector<double> dropout_rates = {0.30, 0.40, 0.50};
  double fc_scale = 6.0;      // divisor applied to the gender head widths
  double bn_momentum = 0.9;
  double bn_eps = 1e-5;
  double noise_sigma = 0.1;   // descriptor noise in the mirrored twins
  std::uint64_t init_seed = 0;

  static ArchConfig full_scale();  // 224x112 prints, 32 base filters, 5 blocks
  static ArchConfig desk_scale();  // defaults above
  static ArchConfig tiny_scale();  // small enough for exhaustive gradient checks
};

std::string canonical_config_string(const std::string& arch, const ArchConfig& config);

struct ModelGraph {
  std::string arch;
  ArchConfig config;
  HeadKind head = HeadKind::regression;
  int input_count = 1;
  std::vector<std::array<int, 3>> input_hwc;  // expected extents per input slot

  std::vector<LayerNode> nodes;
  std::map<std::string, Tensor> params;
  std::vector<BnStats> bn_stats;
  std::vector<std::string> bn_slot_names;
  std::vector<std::string> decay_params;  // default L2 set
  std::uint64_t global_step = 0;

  int head_node() const { return static_cast<int>(nodes.size()) - 1; }
};

// 32-byte digest of the canonical config string.
std::array<std::uint8_t, 32> arch_fingerprint(const ModelGraph& graph);

// Structural checks: edges point backwards, referenced parameters exist,
// batchnorm slots are consistent, every interior node feeds a later one.
void validate_graph(const ModelGraph& graph);

long long param_count(const ModelGraph& graph);

struct ForwardCache {
  std::vector<Tensor> out;  // one activation per node
  std::vector<BnCache> bn;
  std::vector<std::vector<long long>> pool_argmax;
  Mode mode = Mode::infer;
  std::uint64_t seed = 0;
};

// Runs the graph in node order. Train mode draws dropout masks and noise
// from (seed, node id) and updates batchnorm running statistics.
Tensor graph_forward(ModelGraph& graph, const std::vector<Tensor>& inputs, Mode mode,
                     std::uint64_t seed, ForwardCache* cache = nullptr);

// Walks the cache backwards from d loss / d head output; returns gradients
// keyed by parameter name. Parameters referenced by several nodes (tied
// weights) accumulate the sum of their contributions.
std::map<std::string, Tensor> graph_backward(const ModelGraph& graph, const ForwardCache& cache,
                                             const Tensor& grad_head);

}  // namespace shoeprint
