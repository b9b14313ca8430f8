#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "cli_common.hpp"
#include "commands.hpp"
#include "shoeprint/builders.hpp"
#include "shoeprint/checkpoint.hpp"
#include "shoeprint/error.hpp"
#include "shoeprint/parallel.hpp"

namespace shoeprint::cli {

namespace {

// --out names the checkpoint file; a directory gets a model.ckpt inside.
// History and the resolved-config sidecar live next to it.
struct OutPaths {
  std::filesystem::path checkpoint;
  std::filesystem::path history;
  std::filesystem::path record;
};

OutPaths out_paths(const std::string& out) {
  std::filesystem::path ckpt(out);
  if (out.back() == '/' || std::filesystem::is_directory(ckpt)) ckpt /= "model.ckpt";
  std::filesystem::path base = ckpt;
  if (base.extension() == ".ckpt") base.replace_extension();
  return {ckpt, base.string() + ".history.csv", base.string() + ".config"};
}

void write_history(const TrainHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "epoch,train_loss,val_loss\n";
  char line[96];
  for (size_t i = 0; i < history.train_loss.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.6f,", i + 1, history.train_loss[i]);
    out << line;
    if (history.val_loss[i] >= 0.0) {
      std::snprintf(line, sizeof line, "%.6f", history.val_loss[i]);
      out << line;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void run(const ConfigMap& resolved) {
  set_worker_threads(threads_of(resolved));
  const std::string arch = resolved.get("train.arch");
  if (arch.empty()) throw ConfigError("train.arch: required");
  if (resolved.get("train.data").empty()) throw ConfigError("train.data: required");
  if (resolved.get("train.out").empty()) throw ConfigError("train.out: required");

  ModelGraph graph = build_arch(arch, arch_config_of(resolved, "train"));
  const LossKind loss = loss_of(resolved, "train", arch);
  const char version = version_of(resolved, "train", arch);

  const DatasetManifest manifest =
      read_manifest(manifest_path_in(resolved.get("train.data"), version));
  const SampleSet samples = load_samples(manifest, graph);

  TrainOptions options;
  options.epochs = static_cast<int>(resolved.get_int("train.epochs"));
  options.batch_size = static_cast<int>(resolved.get_int("train.batch"));
  options.seed = seed_of(resolved);
  options.loss = loss;
  options.clf = clf_of(resolved, "train");
  options.optimizer.learning_rate = resolved.get_double("train.lr");
  options.max_steps = resolved.get_int("train.max_steps");
  options.stop_loss_ratio = resolved.get_double("train.stop_ratio");
  if (options.epochs < 0) throw ConfigError("train.epochs: negative");

  AdamState state;
  const TrainHistory history = train(graph, state, samples, options);
  if (!std::isfinite(history.final_loss)) {
    throw VerificationError("training diverged: final loss is not finite");
  }

  const OutPaths paths = out_paths(resolved.get("train.out"));
  if (paths.checkpoint.has_parent_path()) {
    std::filesystem::create_directories(paths.checkpoint.parent_path());
  }
  save_checkpoint(graph, state, paths.checkpoint);
  write_history(history, paths.history);

  ConfigMap record = resolved;
  record.set("train.loss", to_string(loss));
  record.set("train.version", std::string(1, version));
  write_record(record, paths.record);

  std::printf("trained %s for %lld steps: loss %.4f -> %.4f%s\n", arch.c_str(), history.steps,
              history.initial_loss, history.final_loss,
              history.stopped_early ? " (early stop)" : "");
}

}  // namespace

void register_train(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  auto args = std::make_shared<CommandArgs>(cmd, "train");
  add_model_args(*args, "train", true);
  args->add("--data", "train.data", "", "Dataset directory (synth output)");
  args->add("--out", "train.out", "", "Checkpoint path (or a directory for model.ckpt)");
  args->add("--version", "train.version", "auto",
            "Dataset version a..g (auto picks by architecture)");
  args->add("--epochs", "train.epochs", "10", "Training epochs");
  args->add("--batch", "train.batch", "16", "Batch size (at least 2 for batchnorm)");
  args->add("--lr", "train.lr", "0.001", "Adam learning rate");
  args->add("--max-steps", "train.max_steps", "0", "Hard step cap (0 = epochs only)");
  args->add("--stop-ratio", "train.stop_ratio", "0",
            "Stop once probed loss falls below this fraction of the initial loss (0 = off)");
  add_global_args(*args);
  cmd->callback([args] { run(args->resolve()); });
}

}  // namespace shoeprint::cli
