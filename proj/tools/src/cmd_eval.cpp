#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>

#include "cli_common.hpp"
#include "commands.hpp"
#include "shoeprint/builders.hpp"
#include "shoeprint/checkpoint.hpp"
#include "shoeprint/error.hpp"
#include "shoeprint/parallel.hpp"

namespace shoeprint::cli {

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& ckpt) {
  std::filesystem::path base = ckpt;
  if (base.extension() == ".ckpt") base.replace_extension();
  return base.string() + ".config";
}

void run(const ConfigMap& resolved) {
  set_worker_threads(threads_of(resolved));
  const std::string ckpt_path = resolved.get("eval.ckpt");
  const std::string data_dir = resolved.get("eval.data");
  if (ckpt_path.empty()) throw ConfigError("eval.ckpt: required");
  if (data_dir.empty()) throw ConfigError("eval.data: required");
  const std::filesystem::path out_dir(resolved.get("eval.out"));
  std::filesystem::create_directories(out_dir);

  // The training record next to the checkpoint names the architecture; the
  // fingerprint check on restore guards against a stale or edited sidecar.
  const ConfigMap trained = read_config_file(sidecar_path(ckpt_path).string());
  const std::string arch = trained.get("train.arch");
  ModelGraph graph = build_arch(arch, arch_config_of(trained, "train"));
  restore_checkpoint(graph, nullptr, read_checkpoint(ckpt_path));

  std::string version_text = resolved.get("eval.version");
  if (version_text == "auto") version_text = trained.get_or("train.version", "auto");
  char version = 0;
  if (version_text == "auto") {
    version = version_for_arch(arch);
  } else if (version_text.size() == 1 && version_text[0] >= 'a' && version_text[0] <= 'g') {
    version = version_text[0];
  } else {
    throw ConfigError("eval.version: expected a..g or auto, got '" + version_text + "'");
  }

  const Split split = split_from_string(resolved.get("eval.split"));
  const DatasetManifest manifest = read_manifest(manifest_path_in(data_dir, version));
  const SampleSet samples = load_samples(manifest, graph);
  const int batch_size = static_cast<int>(resolved.get_int("eval.batch"));

  if (graph.head == HeadKind::regression) {
    EvaluationBatch batch = evaluate_regression(graph, samples, split, batch_size);
    if (resolved.get_int("eval.round_years") != 0) {
      std::vector<double> rounded = batch.predicted;
      for (double& p : rounded) p = std::round(p);
      batch = EvaluationBatch(batch.actual, std::move(rounded));
    }
    write_regression_outputs(batch, expand_metric_tokens(resolved.get("eval.metrics")), out_dir);
    std::printf("evaluated %s on %zu %s samples: mae %.4f, mcs2 %.4f\n", arch.c_str(),
                batch.size(), to_string(split).c_str(), mae(batch), mcs_score(batch, 2));
  } else {
    const ClassificationCounts counts =
        evaluate_classification(graph, samples, split, batch_size);
    const ClassificationReport report = classification_report(counts);
    write_metrics_csv({{"accuracy", report.accuracy},
                       {"male_precision", report.male.precision},
                       {"male_recall", report.male.recall},
                       {"male_f1", report.male.f1},
                       {"female_precision", report.female.precision},
                       {"female_recall", report.female.recall},
                       {"female_f1", report.female.f1}},
                      out_dir / "metrics.csv");
    std::printf("evaluated %s on %lld %s samples: accuracy %.4f\n", arch.c_str(), counts.total(),
                to_string(split).c_str(), report.accuracy);
  }

  ConfigMap record = resolved;
  record.set("eval.version", std::string(1, version));
  write_record(record, out_dir / "resolved_config.txt");
}

}  // namespace

void register_eval(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand("eval", "Evaluate a checkpoint against a dataset split");
  auto args = std::make_shared<CommandArgs>(cmd, "eval");
  args->add("--ckpt", "eval.ckpt", "", "Checkpoint file (reads its .config sidecar)");
  args->add("--data", "eval.data", "", "Dataset directory");
  args->add("--out", "eval.out", ".", "Output directory");
  args->add("--metrics", "eval.metrics", "mae,mse,mcs2,mcs3",
            "Regression metric tokens, e.g. mae,mcs2,cs0..cs10");
  args->add("--split", "eval.split", "test", "Manifest split: train|val|test");
  args->add("--version", "eval.version", "auto",
            "Dataset version a..g (auto: the version the model trained on)");
  args->add("--batch", "eval.batch", "32", "Inference batch size");
  args->add_switch("--round-years", "eval.round_years",
                   "Round predictions to whole years before computing metrics");
  add_global_args(*args);
  cmd->callback([args] { run(args->resolve()); });
}

}  // namespace shoeprint::cli
