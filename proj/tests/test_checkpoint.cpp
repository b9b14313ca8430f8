#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "shoeprint/builders.hpp"
#include "shoeprint/checkpoint.hpp"
#include "shoeprint/error.hpp"
#include "shoeprint/rng.hpp"

using namespace shoeprint;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "shoeprint_ckpt_tests";
  fs::create_directories(dir);
  return dir;
}

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

ModelGraph perturbed_graph() {
  ModelGraph graph = build_shoenet(ArchConfig::tiny_scale());
  Rng rng(404);
  for (auto& [name, tensor] : graph.params) {
    for (auto& v : tensor.data) v += rng.uniform(-0.01, 0.01);
  }
  for (auto& stats : graph.bn_stats) {
    for (auto& m : stats.mean) m = rng.uniform(-0.5, 0.5);
    for (auto& v : stats.var) v = rng.uniform(0.5, 1.5);
  }
  graph.global_step = 1234;
  return graph;
}

}  // namespace

TEST_CASE("checkpoints restore parameters, statistics, and step") {
  const fs::path path = temp_dir() / "roundtrip.ckpt";
  ModelGraph saved = perturbed_graph();
  AdamState no_moments;
  save_checkpoint(saved, no_moments, path);

  ModelGraph fresh = build_shoenet(ArchConfig::tiny_scale());
  AdamState state;
  restore_checkpoint(fresh, &state, read_checkpoint(path));

  CHECK(fresh.global_step == 1234);
  CHECK(state.step == 1234);
  for (const auto& [name, tensor] : saved.params) {
    const Tensor& restored = fresh.params.at(name);
    for (size_t i = 0; i < tensor.data.size(); ++i) {
      CHECK(restored.data[i] == static_cast<double>(static_cast<float>(tensor.data[i])));
    }
    // untrained moments come back as zeros
    for (double m : state.m.at(name).data) CHECK(m == 0.0);
  }
  for (size_t slot = 0; slot < saved.bn_stats.size(); ++slot) {
    for (size_t c = 0; c < saved.bn_stats[slot].mean.size(); ++c) {
      CHECK(fresh.bn_stats[slot].mean[c] ==
            static_cast<double>(static_cast<float>(saved.bn_stats[slot].mean[c])));
      CHECK(fresh.bn_stats[slot].var[c] ==
            static_cast<double>(static_cast<float>(saved.bn_stats[slot].var[c])));
    }
  }
}

TEST_CASE("a save-restore-save cycle is byte identical") {
  const fs::path first = temp_dir() / "cycle_a.ckpt";
  const fs::path second = temp_dir() / "cycle_b.ckpt";
  ModelGraph graph = perturbed_graph();
  AdamState state;
  save_checkpoint(graph, state, first);

  ModelGraph reloaded = build_shoenet(ArchConfig::tiny_scale());
  AdamState restored;
  restore_checkpoint(reloaded, &restored, read_checkpoint(first));
  save_checkpoint(reloaded, restored, second);

  CHECK(file_bytes(first) == file_bytes(second));
}

TEST_CASE("optimizer moments survive the round trip") {
  const fs::path path = temp_dir() / "moments.ckpt";
  ModelGraph graph = build_shoenet(ArchConfig::tiny_scale());
  AdamState state;
  state.step = 7;
  graph.global_step = 7;
  Rng rng(11);
  for (const auto& [name, tensor] : graph.params) {
    Tensor m(tensor.shape), v(tensor.shape);
    for (auto& x : m.data) x = rng.uniform(-0.1, 0.1);
    for (auto& x : v.data) x = rng.uniform(0.0, 0.01);
    state.m[name] = std::move(m);
    state.v[name] = std::move(v);
  }
  save_checkpoint(graph, state, path);

  ModelGraph fresh = build_shoenet(ArchConfig::tiny_scale());
  AdamState out;
  restore_checkpoint(fresh, &out, read_checkpoint(path));
  CHECK(out.step == 7);
  for (const auto& [name, m] : state.m) {
    for (size_t i = 0; i < m.data.size(); ++i) {
      CHECK(out.m.at(name).data[i] == static_cast<double>(static_cast<float>(m.data[i])));
      CHECK(out.v.at(name).data[i] ==
            static_cast<double>(static_cast<float>(state.v.at(name).data[i])));
    }
  }
}

TEST_CASE("file size follows the declared layout arithmetic") {
  const fs::path path = temp_dir() / "sized.ckpt";
  ModelGraph graph = build_shoenet(ArchConfig::tiny_scale());
  AdamState state;
  save_checkpoint(graph, state, path);

  long long expected = 8 + 4 + 32 + 8 + 4;  // magic, version, fingerprint, step, entry count
  const auto entry_size = [](const std::string& name, long long volume) {
    return 2LL + static_cast<long long>(name.size()) + 1 + /*extents*/ 0 + 12 * volume;
  };
  long long extents_bytes = 0;
  for (const auto& [name, tensor] : graph.params) {
    expected += entry_size(name, tensor.size());
    extents_bytes += 4LL * tensor.rank();
  }
  for (size_t slot = 0; slot < graph.bn_stats.size(); ++slot) {
    const auto& slot_name = graph.bn_slot_names[slot];
    const long long channels = static_cast<long long>(graph.bn_stats[slot].mean.size());
    expected += entry_size(slot_name + ".running_mean", channels);
    expected += entry_size(slot_name + ".running_var", channels);
    extents_bytes += 8;  // one u32 extent each
  }
  expected += extents_bytes;
  CHECK(static_cast<long long>(fs::file_size(path)) == expected);
}

TEST_CASE("restoring into a different architecture is rejected") {
  const fs::path path = temp_dir() / "mismatch.ckpt";
  ModelGraph graph = build_shoenet(ArchConfig::tiny_scale());
  AdamState state;
  save_checkpoint(graph, state, path);
  const Checkpoint ckpt = read_checkpoint(path);

  ModelGraph other_arch = build_lr_cnn(ArchConfig::tiny_scale());
  CHECK_THROWS_AS(restore_checkpoint(other_arch, nullptr, ckpt), ConfigError);

  auto resized = ArchConfig::tiny_scale();
  resized.print_h = 32;
  ModelGraph other_size = build_shoenet(resized);
  CHECK_THROWS_AS(restore_checkpoint(other_size, nullptr, ckpt), ConfigError);
}

TEST_CASE("corrupt or truncated checkpoint files raise io errors") {
  const fs::path good = temp_dir() / "good.ckpt";
  ModelGraph graph = build_shoenet(ArchConfig::tiny_scale());
  AdamState state;
  save_checkpoint(graph, state, good);
  const std::string bytes = file_bytes(good);

  const fs::path truncated = temp_dir() / "truncated.ckpt";
  {
    std::ofstream out(truncated, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(read_checkpoint(truncated), IoError);

  const fs::path bad_magic = temp_dir() / "bad_magic.ckpt";
  {
    std::string copy = bytes;
    copy[0] = 'X';
    std::ofstream out(bad_magic, std::ios::binary);
    out.write(copy.data(), static_cast<std::streamsize>(copy.size()));
  }
  CHECK_THROWS_AS(read_checkpoint(bad_magic), IoError);

  const fs::path trailing = temp_dir() / "trailing.ckpt";
  {
    std::string copy = bytes + "extra";
    std::ofstream out(trailing, std::ios::binary);
    out.write(copy.data(), static_cast<std::streamsize>(copy.size()));
  }
  CHECK_THROWS_AS(read_checkpoint(trailing), IoError);

  CHECK_THROWS_AS(read_checkpoint(temp_dir() / "missing.ckpt"), IoError);
}

TEST_CASE("checkpoint entries are sorted and complete") {
  const fs::path path = temp_dir() / "entries.ckpt";
  ModelGraph graph = build_shoenet(ArchConfig::tiny_scale());
  AdamState state;
  save_checkpoint(graph, state, path);
  const Checkpoint ckpt = read_checkpoint(path);

  CHECK(ckpt.entries.size() == graph.params.size() + 2 * graph.bn_stats.size());
  for (size_t i = 1; i < ckpt.entries.size(); ++i) {
    CHECK(ckpt.entries[i - 1].name < ckpt.entries[i].name);
  }
  CHECK(fingerprint_hex(ckpt.fingerprint) == fingerprint_hex(arch_fingerprint(graph)));
}
