#include <cstdio>
#include <filesystem>
#include <memory>

#include "cli_common.hpp"
#include "commands.hpp"
#include "shoeprint/error.hpp"
#include "shoeprint/manifest.hpp"

namespace shoeprint::cli {

namespace {

void parse_range(const std::string& text, int* lo, int* hi) {
  const size_t colon = text.find(':');
  if (colon != std::string::npos) {
    try {
      size_t used = 0;
      *lo = std::stoi(text.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument(text);
      const std::string upper = text.substr(colon + 1);
      *hi = std::stoi(upper, &used);
      if (used != upper.size()) throw std::invalid_argument(text);
      if (0 <= *lo && *lo <= *hi && *hi <= 200) return;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("range: expected LO:HI with 0 <= LO <= HI <= 200, got '" + text + "'");
}

void run(const ConfigMap& resolved) {
  const std::string mode = resolved.get("baseline.mode");
  if (mode != "random") throw ConfigError("baseline mode: only 'random' exists, got '" + mode + "'");
  const std::string data_dir = resolved.get("baseline.data");
  if (data_dir.empty()) throw ConfigError("baseline.data: required");
  const std::filesystem::path out_dir(resolved.get("baseline.out"));
  std::filesystem::create_directories(out_dir);

  int lo = 0, hi = 0;
  parse_range(resolved.get("baseline.range"), &lo, &hi);
  const Split split = split_from_string(resolved.get("baseline.split"));
  const std::string version_text = resolved.get("baseline.version");
  if (version_text.size() != 1 || version_text[0] < 'a' || version_text[0] > 'g') {
    throw ConfigError("baseline.version: expected a..g, got '" + version_text + "'");
  }

  const DatasetManifest manifest = read_manifest(manifest_path_in(data_dir, version_text[0]));
  std::vector<double> actual;
  for (const ManifestRow& row : manifest.rows) {
    if (row.split == split) actual.push_back(row.age);
  }
  if (actual.empty()) {
    throw ConfigError("no " + to_string(split) + " rows in the " + version_text + " manifest");
  }
  const long long cap = resolved.get_int("baseline.n");
  if (cap < 0 || cap > static_cast<long long>(actual.size())) {
    throw ConfigError("baseline.n: expected 0 (all) to " + std::to_string(actual.size()));
  }
  if (cap > 0) actual.resize(static_cast<size_t>(cap));

  const std::vector<double> predicted =
      random_baseline(static_cast<int>(actual.size()), lo, hi, seed_of(resolved));
  const EvaluationBatch batch(std::move(actual), predicted);
  write_regression_outputs(batch, expand_metric_tokens(resolved.get("baseline.metrics")),
                           out_dir);
  std::printf("random baseline over [%d, %d] on %zu %s ages: mae %.4f, mcs2 %.4f\n", lo, hi,
              batch.size(), to_string(split).c_str(), mae(batch), mcs_score(batch, 2));

  write_record(resolved, out_dir / "resolved_config.txt");
}

}  // namespace

void register_baseline(CLI::App& app) {
  CLI::App* cmd =
      app.add_subcommand("baseline", "Evaluate a chance baseline against the true ages");
  auto args = std::make_shared<CommandArgs>(cmd, "baseline");
  args->add("mode", "baseline.mode", "random", "Baseline kind (random)");
  args->add("--range", "baseline.range", "7:80", "Inclusive guess range LO:HI");
  args->add("--n", "baseline.n", "0", "Evaluate only the first N rows (0 = all)");
  args->add("--data", "baseline.data", "", "Dataset directory");
  args->add("--out", "baseline.out", ".", "Output directory");
  args->add("--split", "baseline.split", "test", "Manifest split: train|val|test");
  args->add("--version", "baseline.version", "a", "Dataset version a..g");
  args->add("--metrics", "baseline.metrics", "mae,mse,mcs2,mcs3", "Metric tokens");
  add_global_args(*args);
  cmd->callback([args] { run(args->resolve()); });
}

}  // namespace shoeprint::cli
