#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shoeprint/config.hpp"
#include "shoeprint/graph.hpp"
#include "shoeprint/train.hpp"

namespace shoeprint::cli {

// One subcommand's flag set. Every flag is bound as a string so defaults, a
// --config record, and explicitly passed flags merge into a single ConfigMap
// with a fixed precedence: defaults < config file < flags. The resolved map
// is what runs, and serializing it next to the outputs gives a record that
// reproduces the run when passed back through --config.
class CommandArgs {
 public:
  CommandArgs(CLI::App* cmd, std::string command_name);

  CLI::Option* add(const std::string& flag, const std::string& key, const std::string& fallback,
                   const std::string& help);
  // Boolean flag, stored as "0"/"1".
  CLI::Option* add_switch(const std::string& flag, const std::string& key,
                          const std::string& help);

  ConfigMap resolve() const;

 private:
  struct Binding {
    std::string key;
    CLI::Option* option = nullptr;
    std::string* slot = nullptr;
    bool is_switch = false;
  };

  CLI::App* cmd_;
  std::string command_name_;
  std::deque<std::string> storage_;  // stable addresses for CLI11 bindings
  std::string config_path_;
  std::vector<Binding> bindings_;
  ConfigMap defaults_;
};

// --seed and --threads, common to every command.
void add_global_args(CommandArgs& args);

std::uint64_t seed_of(const ConfigMap& resolved);
int threads_of(const ConfigMap& resolved);

// --arch/--scale (and optionally --loss) shared by train and gradcheck.
void add_model_args(CommandArgs& args, const std::string& section, bool with_loss);

ArchConfig arch_config_of(const ConfigMap& resolved, const std::string& section);

// Loss with the per-task default (gender: cross-entropy, otherwise CLF) and
// the compatibility rule: the gender head pairs with ce and only with ce.
LossKind loss_of(const ConfigMap& resolved, const std::string& section, const std::string& arch);

ClfConfig clf_of(const ConfigMap& resolved, const std::string& section);

// Which dataset version a model trains on when --version is "auto".
char version_for_arch(const std::string& arch);
char version_of(const ConfigMap& resolved, const std::string& section, const std::string& arch);

std::filesystem::path manifest_path_in(const std::string& data_dir, char version);

std::vector<std::string> split_list(const std::string& text, char sep);

// Metric tokens: mae, mse, mcs2, mcs3, csJ, and the range form "cs0..cs10".
std::vector<std::string> expand_metric_tokens(const std::string& text);

// metrics.csv for the requested tokens, plus the full CS curve as
// cs_curve.csv and cs_curve.svg.
void write_regression_outputs(const EvaluationBatch& batch,
                              const std::vector<std::string>& tokens,
                              const std::filesystem::path& out_dir);

void write_record(const ConfigMap& resolved, const std::filesystem::path& path);

}  // namespace shoeprint::cli
