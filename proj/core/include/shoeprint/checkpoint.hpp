#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shoeprint/graph.hpp"
#include "shoeprint/optimizer.hpp"

namespace shoeprint {

// Binary checkpoint layout, all integers little-endian, values float32:
//   magic "SHNET1\0\0" | format version u32 | fingerprint 32 bytes |
//   global step u64 | entry count u32 |
//   per entry: name length u16, name bytes, rank u8, extents u32 each,
//              row-major float32 payload |
//   optimizer block: per entry in the same order, m then v payloads.
// Entries are the graph parameters plus each batchnorm slot's running mean
// and variance (named "<slot>.running_mean"/"<slot>.running_var"), sorted by
// name.
struct CheckpointEntry {
  std::string name;
  std::vector<int> shape;
  std::vector<float> values;
  std::vector<float> m, v;  // optimizer moments, zero for running stats
};

struct Checkpoint {
  std::uint32_t version = 1;
  std::array<std::uint8_t, 32> fingerprint{};
  std::uint64_t global_step = 0;
  std::vector<CheckpointEntry> entries;
};

void save_checkpoint(const ModelGraph& graph, const AdamState& state,
                     const std::filesystem::path& path);

// Parses and structurally validates; does not need a graph.
Checkpoint read_checkpoint(const std::filesystem::path& path);

// Verifies the fingerprint against the graph, then installs parameters,
// running statistics, global step, and (when state is non-null) optimizer
// moments. Missing or unknown entries are errors.
void restore_checkpoint(ModelGraph& graph, AdamState* state, const Checkpoint& checkpoint);

std::string fingerprint_hex(const std::array<std::uint8_t, 32>& fingerprint);

}  // namespace shoeprint
