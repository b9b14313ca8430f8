#include "shoeprint/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>

namespace shoeprint {
namespace {

constexpr char kMagic[8] = {'S', 'H', 'N', 'E', 'T', '1', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::string& out, const void* data, size_t n) {
  out.append(static_cast<const char*>(data), n);
}

void put_u16(std::string& out, std::uint16_t v) {
  const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  put_bytes(out, bytes, 2);
}

void put_u32(std::string& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  put_bytes(out, bytes, 4);
}

void put_u64(std::string& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  put_bytes(out, bytes, 8);
}

void put_f32(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

void put_f32_array(std::string& out, const std::vector<float>& values) {
  for (float v : values) put_f32(out, v);
}

struct Reader {
  const std::string& bytes;
  size_t pos = 0;
  const std::filesystem::path& path;

  void need(size_t n) const {
    if (pos + n > bytes.size()) throw IoError("truncated checkpoint " + path.string());
  }
  std::uint16_t u16() {
    need(2);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
    pos += 2;
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }
  std::uint32_t u32() {
    need(4);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
    pos += 4;
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  }
  std::uint64_t u64() {
    std::uint64_t lo = u32();
    std::uint64_t hi = u32();
    return lo | (hi << 32);
  }
  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  std::string str(size_t n) {
    need(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
};

std::vector<float> to_f32(const std::vector<double>& values) {
  std::vector<float> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) out[i] = static_cast<float>(values[i]);
  return out;
}

// Gathers parameters plus running statistics, sorted by name.
std::vector<CheckpointEntry> collect_entries(const ModelGraph& graph, const AdamState& state) {
  std::vector<CheckpointEntry> entries;
  for (const auto& [name, tensor] : graph.params) {
    CheckpointEntry entry;
    entry.name = name;
    entry.shape = tensor.shape;
    entry.values = to_f32(tensor.data);
    const auto m_it = state.m.find(name);
    const auto v_it = state.v.find(name);
    entry.m = m_it != state.m.end() ? to_f32(m_it->second.data)
                                    : std::vector<float>(entry.values.size(), 0.0f);
    entry.v = v_it != state.v.end() ? to_f32(v_it->second.data)
                                    : std::vector<float>(entry.values.size(), 0.0f);
    entries.push_back(std::move(entry));
  }
  for (size_t slot = 0; slot < graph.bn_stats.size(); ++slot) {
    const BnStats& stats = graph.bn_stats[slot];
    const std::string& slot_name = graph.bn_slot_names[slot];
    for (const auto& [suffix, values] :
         {std::pair{".running_mean", &stats.mean}, std::pair{".running_var", &stats.var}}) {
      CheckpointEntry entry;
      entry.name = slot_name + suffix;
      entry.shape = {static_cast<int>(values->size())};
      entry.values = to_f32(*values);
      entry.m.assign(entry.values.size(), 0.0f);
      entry.v.assign(entry.values.size(), 0.0f);
      entries.push_back(std::move(entry));
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const CheckpointEntry& a, const CheckpointEntry& b) { return a.name < b.name; });
  return entries;
}

}  // namespace

std::string fingerprint_hex(const std::array<std::uint8_t, 32>& fingerprint) {
  static const char digits[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(64);
  for (std::uint8_t byte : fingerprint) {
    hex.push_back(digits[byte >> 4]);
    hex.push_back(digits[byte & 0xf]);
  }
  return hex;
}

void save_checkpoint(const ModelGraph& graph, const AdamState& state,
                     const std::filesystem::path& path) {
  const auto entries = collect_entries(graph, state);
  if (entries.size() > 0xffffffffULL) throw IoError("too many checkpoint entries");

  std::string out;
  put_bytes(out, kMagic, 8);
  put_u32(out, kVersion);
  const auto fingerprint = arch_fingerprint(graph);
  put_bytes(out, fingerprint.data(), fingerprint.size());
  put_u64(out, graph.global_step);
  put_u32(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& entry : entries) {
    if (entry.name.size() > 0xffff) throw IoError("checkpoint entry name too long");
    put_u16(out, static_cast<std::uint16_t>(entry.name.size()));
    put_bytes(out, entry.name.data(), entry.name.size());
    out.push_back(static_cast<char>(entry.shape.size()));
    for (int extent : entry.shape) put_u32(out, static_cast<std::uint32_t>(extent));
    put_f32_array(out, entry.values);
  }
  for (const auto& entry : entries) {
    put_f32_array(out, entry.m);
    put_f32_array(out, entry.v);
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("failed writing " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

  Reader r{bytes, 0, path};
  if (r.str(8) != std::string(kMagic, 8)) {
    throw IoError(path.string() + " is not a checkpoint (bad magic)");
  }
  Checkpoint ckpt;
  ckpt.version = r.u32();
  if (ckpt.version != kVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(ckpt.version) + " in " +
                  path.string());
  }
  for (auto& byte : ckpt.fingerprint) byte = static_cast<std::uint8_t>(r.str(1)[0]);
  ckpt.global_step = r.u64();
  const std::uint32_t count = r.u32();
  ckpt.entries.resize(count);
  for (auto& entry : ckpt.entries) {
    const std::uint16_t name_len = r.u16();
    entry.name = r.str(name_len);
    const std::uint8_t rank = static_cast<std::uint8_t>(r.str(1)[0]);
    entry.shape.resize(rank);
    long long volume = 1;
    for (auto& extent : entry.shape) {
      extent = static_cast<int>(r.u32());
      if (extent < 1) throw IoError("bad extent in checkpoint entry '" + entry.name + "'");
      volume *= extent;
    }
    entry.values.resize(static_cast<size_t>(volume));
    for (auto& v : entry.values) v = r.f32();
  }
  for (auto& entry : ckpt.entries) {
    entry.m.resize(entry.values.size());
    for (auto& v : entry.m) v = r.f32();
    entry.v.resize(entry.values.size());
    for (auto& v : entry.v) v = r.f32();
  }
  if (r.pos != bytes.size()) {
    throw IoError("trailing bytes after checkpoint payload in " + path.string());
  }
  return ckpt;
}

void restore_checkpoint(ModelGraph& graph, AdamState* state, const Checkpoint& checkpoint) {
  const auto expected = arch_fingerprint(graph);
  if (checkpoint.fingerprint != expected) {
    throw ConfigError("checkpoint fingerprint " + fingerprint_hex(checkpoint.fingerprint) +
                      " does not match architecture fingerprint " + fingerprint_hex(expected));
  }

  std::map<std::string, size_t> slot_by_name;
  for (size_t slot = 0; slot < graph.bn_slot_names.size(); ++slot) {
    slot_by_name[graph.bn_slot_names[slot]] = slot;
  }

  std::set<std::string> seen;
  for (const auto& entry : checkpoint.entries) {
    seen.insert(entry.name);
    const auto param_it = graph.params.find(entry.name);
    if (param_it != graph.params.end()) {
      Tensor& param = param_it->second;
      if (param.shape != entry.shape) {
        throw ConfigError("checkpoint entry '" + entry.name + "' has shape " +
                          shape_string(entry.shape) + ", graph expects " + param.shape_string());
      }
      for (size_t i = 0; i < entry.values.size(); ++i) {
        param.data[i] = static_cast<double>(entry.values[i]);
      }
      if (state) {
        Tensor m(param.shape), v(param.shape);
        for (size_t i = 0; i < entry.values.size(); ++i) {
          m.data[i] = static_cast<double>(entry.m[i]);
          v.data[i] = static_cast<double>(entry.v[i]);
        }
        state->m[entry.name] = std::move(m);
        state->v[entry.name] = std::move(v);
      }
      continue;
    }

    const bool is_mean = entry.name.ends_with(".running_mean");
    const bool is_var = entry.name.ends_with(".running_var");
    if (is_mean || is_var) {
      const std::string slot_name =
          entry.name.substr(0, entry.name.size() - (is_mean ? 13 : 12));
      const auto slot_it = slot_by_name.find(slot_name);
      if (slot_it == slot_by_name.end()) {
        throw ConfigError("checkpoint entry '" + entry.name +
                          "' names an unknown batchnorm slot");
      }
      auto& values = is_mean ? graph.bn_stats[slot_it->second].mean
                             : graph.bn_stats[slot_it->second].var;
      if (values.size() != entry.values.size()) {
        throw ConfigError("checkpoint entry '" + entry.name + "' length does not match the graph");
      }
      for (size_t i = 0; i < entry.values.size(); ++i) {
        values[i] = static_cast<double>(entry.values[i]);
      }
      continue;
    }
    throw ConfigError("checkpoint entry '" + entry.name + "' is not part of this architecture");
  }

  for (const auto& [name, tensor] : graph.params) {
    if (!seen.count(name)) throw ConfigError("checkpoint is missing parameter '" + name + "'");
  }
  for (const auto& slot_name : graph.bn_slot_names) {
    if (!seen.count(slot_name + ".running_mean") || !seen.count(slot_name + ".running_var")) {
      throw ConfigError("checkpoint is missing running statistics for '" + slot_name + "'");
    }
  }

  graph.global_step = checkpoint.global_step;
  if (state) state->step = static_cast<long long>(checkpoint.global_step);
}

}  // namespace shoeprint
