#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "shoeprint/builders.hpp"
#include "shoeprint/checkpoint.hpp"
#include "shoeprint/error.hpp"
#include "shoeprint/graphcheck.hpp"
#include "shoeprint/loss.hpp"
#include "shoeprint/rng.hpp"

using namespace shoeprint;

namespace {

std::vector<Tensor> random_inputs(const ModelGraph& graph, int batch, std::uint64_t seed) {
  std::vector<Tensor> inputs;
  Rng rng(seed);
  for (const auto& hwc : graph.input_hwc) {
    Tensor t({batch, hwc[0], hwc[1], hwc[2]});
    for (auto& v : t.data) v = rng.uniform(0.0, 1.0);
    inputs.push_back(std::move(t));
  }
  return inputs;
}

// Activation channel count per node, derived from the graph structure alone.
int channels_at(const ModelGraph& graph, int id) {
  const LayerNode& node = graph.nodes[static_cast<size_t>(id)];
  switch (node.kind) {
    case NodeKind::input:
      return graph.input_hwc[static_cast<size_t>(node.input_slot)][2];
    case NodeKind::conv:
      return graph.params.at(node.weights).shape[3];
    case NodeKind::concat: {
      int total = 0;
      for (int in : node.inputs) total += channels_at(graph, in);
      return total;
    }
    case NodeKind::dense:
      return graph.params.at(node.weights).shape[1];
    case NodeKind::scale:
      return channels_at(graph, node.inputs[0]);
    default:
      return channels_at(graph, node.inputs[0]);
  }
}

}  // namespace

TEST_CASE("every architecture builds a valid graph at each scale") {
  for (const auto& name : known_arch_names()) {
    for (const auto& config :
         {ArchConfig::tiny_scale(), ArchConfig::desk_scale()}) {
      const ModelGraph graph = build_arch(name, config);
      CHECK(graph.arch == name);
      CHECK_NOTHROW(validate_graph(graph));
      CHECK(param_count(graph) > 0);
      const bool two_prints = name.rfind("fm-", 0) == 0 || name.rfind("mm-", 0) == 0;
      CHECK(graph.input_count == (two_prints ? 2 : 1));
      CHECK(graph.head == (name == "gender" ? HeadKind::classification : HeadKind::regression));
    }
  }
  CHECK_THROWS_AS(build_arch("alexnet", ArchConfig::desk_scale()), ConfigError);
}

TEST_CASE("paper-scale trunk doubles its filters from 32 to 512") {
  const ModelGraph graph = build_shoenet(ArchConfig::full_scale());
  for (int block = 1; block <= 5; ++block) {
    const auto& kernel = graph.params.at("block" + std::to_string(block) + ".conv1.w");
    CHECK(kernel.shape[3] == 32 << (block - 1));
  }
}

TEST_CASE("paper-scale skip concat feeding block three carries 96 channels") {
  const ModelGraph graph = build_shoenet(ArchConfig::full_scale());
  // first concat node in build order merges block1's projected skip with block2's output
  int first_concat = -1;
  for (size_t id = 0; id < graph.nodes.size(); ++id) {
    if (graph.nodes[id].kind == NodeKind::concat) {
      first_concat = static_cast<int>(id);
      break;
    }
  }
  REQUIRE(first_concat >= 0);
  CHECK(channels_at(graph, first_concat) == 96);
}

TEST_CASE("fusion variants trade shared depth for duplicated branches") {
  const auto config = ArchConfig::desk_scale();
  const size_t early = build_arch("fm-early", config).nodes.size();
  const size_t mid = build_arch("fm-in", config).nodes.size();
  const size_t late = build_arch("fm-late", config).nodes.size();
  CHECK(early < mid);
  CHECK(mid < late);
}

TEST_CASE("tied twin graphs have fewer distinct parameters than their fusion counterparts") {
  const auto config = ArchConfig::desk_scale();
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"mm-early", "fm-early"}, {"mm-mid", "fm-in"}, {"mm-late", "fm-late"}};
  for (const auto& [mirror, fusion] : pairs) {
    const ModelGraph m = build_arch(mirror, config);
    const ModelGraph f = build_arch(fusion, config);
    CHECK(m.params.size() < f.params.size());
  }
}

TEST_CASE("gender head widths scale the 512/384/256 stack") {
  const ModelGraph graph = build_gender_net(ArchConfig::desk_scale());  // fc_scale 6
  CHECK(graph.params.at("fc1.w").shape[1] == 85);
  CHECK(graph.params.at("fc2.w").shape[1] == 64);
  CHECK(graph.params.at("fc3.w").shape[1] == 43);
  CHECK(graph.params.at("head.w").shape[1] == 2);
  CHECK(graph.nodes.back().kind == NodeKind::softmax);

  auto unscaled = ArchConfig::full_scale();
  const ModelGraph paper = build_gender_net(unscaled);  // fc_scale 1
  CHECK(paper.params.at("fc1.w").shape[1] == 512);
  CHECK(paper.params.at("fc2.w").shape[1] == 384);
  CHECK(paper.params.at("fc3.w").shape[1] == 256);
}

TEST_CASE("regression heads start near the cohort age midpoint and decay fc2 only") {
  for (const auto& name : known_arch_names()) {
    const ModelGraph graph = build_arch(name, ArchConfig::desk_scale());
    if (graph.head == HeadKind::regression) {
      CHECK(graph.params.at("head.b").data[0] == 40.0);
    }
    CHECK(graph.decay_params == std::vector<std::string>{"fc2.w"});
  }
}

TEST_CASE("architecture fingerprints are frozen and sense every config change") {
  const ModelGraph graph = build_shoenet(ArchConfig::desk_scale());
  CHECK(fingerprint_hex(arch_fingerprint(graph)) ==
        "262d8d819c9e4f39d92e8d819c9f4f39c0298d819c9c4f39732b8d819c9d4f39");

  auto seeded = ArchConfig::desk_scale();
  seeded.init_seed = 7;
  CHECK(fingerprint_hex(arch_fingerprint(build_shoenet(seeded))) ==
        "0bc7f35f9c8d8dfd58c5f35f9c8c8dfd71caf35f9c8f8dfdbec8f35f9c8e8dfd");

  auto taller = ArchConfig::desk_scale();
  taller.print_h = 128;
  CHECK(fingerprint_hex(arch_fingerprint(build_shoenet(taller))) !=
        fingerprint_hex(arch_fingerprint(graph)));
  CHECK(fingerprint_hex(arch_fingerprint(build_lr_cnn(ArchConfig::desk_scale()))) !=
        fingerprint_hex(arch_fingerprint(graph)));
}

TEST_CASE("initialization is seed-deterministic per parameter name") {
  const ModelGraph a = build_shoenet(ArchConfig::desk_scale());
  const ModelGraph b = build_shoenet(ArchConfig::desk_scale());
  auto seeded = ArchConfig::desk_scale();
  seeded.init_seed = 1;
  const ModelGraph c = build_shoenet(seeded);
  for (const auto& [name, tensor] : a.params) {
    CHECK(tensor.data == b.params.at(name).data);
  }
  CHECK(a.params.at("fc1.w").data != c.params.at("fc1.w").data);
  // constant-initialized tensors ignore the seed
  CHECK(a.params.at("stem.bn.gamma").data == c.params.at("stem.bn.gamma").data);
}

TEST_CASE("builders reject inconsistent configurations") {
  auto config = ArchConfig::desk_scale();
  config.blocks = 0;
  CHECK_THROWS_AS(build_shoenet(config), ConfigError);

  config = ArchConfig::desk_scale();
  config.fc_widths = {64, 64};
  CHECK_THROWS_AS(build_shoenet(config), ConfigError);  // dropout list length mismatch

  config = ArchConfig::desk_scale();
  config.print_h = 4;  // three pooling stages cannot fit
  CHECK_THROWS_AS(build_shoenet(config), ConfigError);

  config = ArchConfig::desk_scale();
  config.dropout_rates = {0.3, 0.4, 1.0};
  CHECK_THROWS_AS(build_shoenet(config), ConfigError);

  CHECK_THROWS_AS(build_fusion(ArchConfig::desk_scale(), 0, "fm-test"), ConfigError);
  CHECK_THROWS_AS(build_fusion(ArchConfig::desk_scale(), 9, "fm-test"), ConfigError);
  CHECK_THROWS_AS(build_mirror(ArchConfig::desk_scale(), 0, "mm-test"), ConfigError);
}

TEST_CASE("graph validation flags forward edges and missing parameters") {
  ModelGraph graph = build_shoenet(ArchConfig::tiny_scale());
  CHECK_NOTHROW(validate_graph(graph));

  ModelGraph forward_edge = graph;
  forward_edge.nodes[5].inputs = {static_cast<int>(forward_edge.nodes.size()) - 1};
  CHECK_THROWS_AS(validate_graph(forward_edge), ConfigError);

  ModelGraph missing_param = graph;
  missing_param.params.erase("fc1.w");
  CHECK_THROWS_AS(validate_graph(missing_param), ConfigError);
}

TEST_CASE("inference is deterministic and training jitters the activations") {
  ModelGraph graph = build_shoenet(ArchConfig::tiny_scale());
  const auto inputs = random_inputs(graph, 2, 5);
  const Tensor a = graph_forward(graph, inputs, Mode::infer, 1);
  const Tensor b = graph_forward(graph, inputs, Mode::infer, 2);
  CHECK(a.data == b.data);  // infer ignores the seed

  ModelGraph fresh = build_shoenet(ArchConfig::tiny_scale());
  const Tensor t1 = graph_forward(fresh, inputs, Mode::train, 1);
  ModelGraph fresh2 = build_shoenet(ArchConfig::tiny_scale());
  const Tensor t2 = graph_forward(fresh2, inputs, Mode::train, 1);
  CHECK(t1.data == t2.data);  // same seed, same dropout draw
}

TEST_CASE("graphs reject wrong input bundles") {
  ModelGraph graph = build_fusion(ArchConfig::tiny_scale(), 1, "fm-early");
  auto inputs = random_inputs(graph, 2, 6);
  auto one = std::vector<Tensor>{inputs[0]};
  CHECK_THROWS_AS(graph_forward(graph, one, Mode::infer, 0), ShapeError);
  inputs[1] = Tensor({2, 3, 3, 1});
  CHECK_THROWS_AS(graph_forward(graph, inputs, Mode::infer, 0), ShapeError);
}

TEST_CASE("forward and backward stay finite for every architecture") {
  for (const auto& name : known_arch_names()) {
    ModelGraph graph = build_arch(name, ArchConfig::desk_scale());
    const auto inputs = random_inputs(graph, 2, 11);
    ForwardCache cache;
    const Tensor out = graph_forward(graph, inputs, Mode::train, 3, &cache);
    for (double v : out.data) CHECK(std::isfinite(v));

    Tensor grad_head(out.shape);
    for (auto& v : grad_head.data) v = 1.0;
    const auto grads = graph_backward(graph, cache, grad_head);
    CHECK(grads.size() == graph.params.size());
    for (const auto& [param, grad] : grads) {
      CHECK(grad.shape == graph.params.at(param).shape);
      for (double v : grad.data) CHECK(std::isfinite(v));
    }
  }
}

TEST_CASE("twin branches agree exactly on identical quiet inputs") {
  auto config = ArchConfig::tiny_scale();
  config.noise_sigma = 0.0;
  ModelGraph graph = build_mirror(config, 2, "mm-mid");
  Tensor print({2, config.print_h, config.print_w, 1});
  Rng rng(21);
  for (auto& v : print.data) v = rng.uniform(0.0, 1.0);
  ForwardCache cache;
  graph_forward(graph, {print, print}, Mode::infer, 0, &cache);

  // the two gate vectors come from mirrored subgraphs fed the same descriptor
  std::vector<int> gate_nodes;
  for (size_t id = 0; id < graph.nodes.size(); ++id) {
    if (graph.nodes[id].kind == NodeKind::sigmoid) gate_nodes.push_back(static_cast<int>(id));
  }
  REQUIRE(gate_nodes.size() == 2);
  const Tensor& gate_a = cache.out[static_cast<size_t>(gate_nodes[0])];
  const Tensor& gate_b = cache.out[static_cast<size_t>(gate_nodes[1])];
  CHECK(gate_a.data == gate_b.data);
  for (double g : gate_a.data) {
    CHECK(g > 0.0);
    CHECK(g < 1.0);
  }

  // the gated branch activations stay identical too
  std::vector<int> scale_nodes;
  for (size_t id = 0; id < graph.nodes.size(); ++id) {
    if (graph.nodes[id].kind == NodeKind::scale) scale_nodes.push_back(static_cast<int>(id));
  }
  REQUIRE(scale_nodes.size() == 2);
  CHECK(cache.out[static_cast<size_t>(scale_nodes[0])].data ==
        cache.out[static_cast<size_t>(scale_nodes[1])].data);
}

TEST_CASE("whole-graph gradients match central differences on small graphs") {
  for (const auto& name : known_arch_names()) {
    ModelGraph graph = build_arch(name, ArchConfig::tiny_scale());
    CHECK(param_count(graph) <= 5000);
    GraphCheckOptions options;
    options.loss = graph.head == HeadKind::classification ? LossKind::cross_entropy : LossKind::clf;
    const auto report = check_graph_gradients(graph, options);
    CHECK(report.entries.size() >= 100);
    CHECK(report.max_rel_error < 1e-4);
    CHECK(report.passed);
  }
}

TEST_CASE("gradient check drives a small graph through squared error too") {
  ModelGraph graph = build_lr_cnn(ArchConfig::tiny_scale());
  GraphCheckOptions options;
  options.loss = LossKind::mse;
  const auto report = check_graph_gradients(graph, options);
  CHECK(report.passed);
}
