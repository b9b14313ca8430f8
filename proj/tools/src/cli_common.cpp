#include "cli_common.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "shoeprint/builders.hpp"
#include "shoeprint/error.hpp"
#include "shoeprint/svg.hpp"
#include "shoeprint/synth.hpp"

namespace shoeprint::cli {

CommandArgs::CommandArgs(CLI::App* cmd, std::string command_name)
    : cmd_(cmd), command_name_(std::move(command_name)) {
  defaults_.set("command", command_name_);
  cmd_->add_option("--config", config_path_,
                   "Configuration file or a previous run's resolved-config record");
}

CLI::Option* CommandArgs::add(const std::string& flag, const std::string& key,
                              const std::string& fallback, const std::string& help) {
  storage_.push_back(fallback);
  std::string* slot = &storage_.back();
  CLI::Option* option = cmd_->add_option(flag, *slot, help);
  bindings_.push_back({key, option, slot, false});
  defaults_.set(key, fallback);
  return option;
}

CLI::Option* CommandArgs::add_switch(const std::string& flag, const std::string& key,
                                     const std::string& help) {
  storage_.push_back("0");
  std::string* slot = &storage_.back();
  CLI::Option* option = cmd_->add_flag(flag, help);
  bindings_.push_back({key, option, slot, true});
  defaults_.set(key, "0");
  return option;
}

ConfigMap CommandArgs::resolve() const {
  ConfigMap resolved = defaults_;
  bool seed_pinned = false;

  if (!config_path_.empty()) {
    const ConfigMap file = read_config_file(config_path_);
    std::set<std::string> known;
    for (const auto& [key, value] : defaults_.values) known.insert(key);
    for (const auto& [key, value] : file.values) {
      if (!known.count(key)) {
        throw ConfigError("unknown key '" + key + "' in " + config_path_);
      }
      if (key == "command") {
        if (value != command_name_) {
          throw ConfigError(config_path_ + " records command '" + value + "', not '" +
                            command_name_ + "'");
        }
        continue;
      }
      resolved.set(key, value);
      if (key == "seed") seed_pinned = true;
    }
  }

  for (const Binding& binding : bindings_) {
    if (binding.option->count() == 0) continue;
    resolved.set(binding.key, binding.is_switch ? "1" : *binding.slot);
    if (binding.key == "seed") seed_pinned = true;
  }

  if (resolved.has("seed") && !seed_pinned && resolved.get("seed").empty()) {
    const char* env = std::getenv("SHOEPRINT_LAB_SEED");
    resolved.set("seed", env && *env ? env : "0");
  }
  if (resolved.has("seed")) {
    resolved.set_int("seed", seed_of(resolved));  // normalize to a plain integer
  }
  return resolved;
}

void add_global_args(CommandArgs& args) {
  args.add("--seed", "seed", "",
           "Run seed (falls back to SHOEPRINT_LAB_SEED, then 0)");
  args.add("--threads", "threads", "1",
           "Worker threads; chunked reductions make any count bit-reproducible");
}

std::uint64_t seed_of(const ConfigMap& resolved) {
  const std::string text = resolved.get("seed");
  if (text.empty()) return 0;
  try {
    size_t used = 0;
    const unsigned long long value = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ConfigError("seed: '" + text + "' is not an unsigned integer");
  }
}

int threads_of(const ConfigMap& resolved) {
  const long long threads = resolved.get_int("threads");
  if (threads < 1 || threads > 512) {
    throw ConfigError("threads: expected 1..512, got " + std::to_string(threads));
  }
  return static_cast<int>(threads);
}

void add_model_args(CommandArgs& args, const std::string& section, bool with_loss) {
  std::string names;
  for (const std::string& name : known_arch_names()) {
    names += names.empty() ? name : "|" + name;
  }
  args.add("--arch", section + ".arch", "", "Architecture: " + names);
  args.add("--scale", section + ".scale", "desk", "Model scale: desk|tiny|full");
  if (with_loss) {
    args.add("--loss", section + ".loss", "auto",
             "Loss: clf|mse|ce (auto: ce for gender, clf otherwise)");
    args.add("--clf-threshold", section + ".clf_threshold", "2",
             "Residual (years) at or below which CLF stays linear");
    args.add("--clf-epsilon", section + ".clf_epsilon", "0.1", "CLF epsilon term");
  }
}

ArchConfig arch_config_of(const ConfigMap& resolved, const std::string& section) {
  const std::string scale = resolved.get(section + ".scale");
  ArchConfig config;
  if (scale == "desk") {
    config = ArchConfig::desk_scale();
  } else if (scale == "tiny") {
    config = ArchConfig::tiny_scale();
  } else if (scale == "full") {
    config = ArchConfig::full_scale();
  } else {
    throw ConfigError(section + ".scale: expected desk|tiny|full, got '" + scale + "'");
  }
  config.init_seed = seed_of(resolved);
  return config;
}

LossKind loss_of(const ConfigMap& resolved, const std::string& section,
                 const std::string& arch) {
  std::string text = resolved.get(section + ".loss");
  if (text == "auto") text = arch == "gender" ? "ce" : "clf";
  const LossKind kind = loss_kind_from_string(text);
  if ((kind == LossKind::cross_entropy) != (arch == "gender")) {
    throw ConfigError("loss '" + text + "' does not fit arch '" + arch +
                      "': the gender head pairs with ce, regression heads with clf or mse");
  }
  return kind;
}

ClfConfig clf_of(const ConfigMap& resolved, const std::string& section) {
  ClfConfig config;
  config.threshold_years = static_cast<int>(resolved.get_int(section + ".clf_threshold"));
  config.epsilon = resolved.get_double(section + ".clf_epsilon");
  return config;
}

char version_for_arch(const std::string& arch) {
  if (arch == "shoenet") return 'e';  // pair compositions
  if (arch == "lr") return 'b';       // segmentation-normalized singles
  if (arch == "gender") return 'f';   // gender-balanced
  return 'a';                         // two-input models pair the raw sides
}

char version_of(const ConfigMap& resolved, const std::string& section,
                const std::string& arch) {
  const std::string text = resolved.get(section + ".version");
  if (text == "auto") return version_for_arch(arch);
  if (text.size() == 1 && text[0] >= 'a' && text[0] <= 'g') return text[0];
  throw ConfigError(section + ".version: expected a..g or auto, got '" + text + "'");
}

std::filesystem::path manifest_path_in(const std::string& data_dir, char version) {
  return std::filesystem::path(data_dir) / version_manifest_name(version);
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      current += c;
    }
  }
  parts.push_back(current);
  parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
  return parts;
}

namespace {

int cs_index(const std::string& token) {
  if (token.size() < 3 || token.compare(0, 2, "cs") != 0) return -1;
  int j = 0;
  for (size_t i = 2; i < token.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(token[i]))) return -1;
    j = j * 10 + (token[i] - '0');
  }
  return j <= 10 ? j : -1;
}

}  // namespace

std::vector<std::string> expand_metric_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  for (const std::string& raw : split_list(text, ',')) {
    const size_t dots = raw.find("..");
    if (dots != std::string::npos) {
      const int lo = cs_index(raw.substr(0, dots));
      const int hi = cs_index(raw.substr(dots + 2));
      if (lo < 0 || hi < 0 || lo > hi) {
        throw ConfigError("metrics: bad range '" + raw + "' (expected csJ..csK, J <= K <= 10)");
      }
      for (int j = lo; j <= hi; ++j) tokens.push_back("cs" + std::to_string(j));
      continue;
    }
    if (raw == "mae" || raw == "mse" || raw == "mcs2" || raw == "mcs3" || cs_index(raw) >= 0) {
      tokens.push_back(raw);
      continue;
    }
    throw ConfigError("metrics: unknown token '" + raw + "'");
  }
  if (tokens.empty()) throw ConfigError("metrics: empty list");
  return tokens;
}

void write_regression_outputs(const EvaluationBatch& batch,
                              const std::vector<std::string>& tokens,
                              const std::filesystem::path& out_dir) {
  std::vector<std::pair<std::string, double>> rows;
  for (const std::string& token : tokens) {
    double value = 0.0;
    if (token == "mae") {
      value = mae(batch);
    } else if (token == "mse") {
      value = mse(batch);
    } else if (token == "mcs2") {
      value = mcs_score(batch, 2);
    } else if (token == "mcs3") {
      value = mcs_score(batch, 3);
    } else {
      value = cs_score(batch, cs_index(token));
    }
    rows.emplace_back(token, value);
  }
  write_metrics_csv(rows, out_dir / "metrics.csv");

  std::vector<std::string> labels;
  SvgSeries curve{"CS", {}};
  std::ofstream csv(out_dir / "cs_curve.csv", std::ios::binary);
  if (!csv) throw IoError("cannot open '" + (out_dir / "cs_curve.csv").string() + "'");
  csv << "j,cs\n";
  char line[48];
  for (int j = 0; j <= 10; ++j) {
    const double cs = cs_score(batch, j);
    std::snprintf(line, sizeof line, "%d,%.4f\n", j, cs);
    csv << line;
    labels.push_back(std::to_string(j));
    curve.values.push_back(cs);
  }
  if (!csv) throw IoError("failed writing '" + (out_dir / "cs_curve.csv").string() + "'");
  write_line_plot_svg((out_dir / "cs_curve.svg").string(), "Cumulative score by tolerance",
                      labels, {curve});
}

void write_record(const ConfigMap& resolved, const std::filesystem::path& path) {
  write_config_file(resolved, path.string());
}

}  // namespace shoeprint::cli
