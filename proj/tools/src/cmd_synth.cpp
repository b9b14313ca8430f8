#include <cctype>
#include <filesystem>
#include <memory>
#include <set>

#include "cli_common.hpp"
#include "commands.hpp"
#include "shoeprint/error.hpp"
#include "shoeprint/parallel.hpp"
#include "shoeprint/synth.hpp"

namespace shoeprint::cli {

namespace {

std::string normalize_versions(const std::string& text) {
  std::set<char> letters;
  for (const std::string& part : split_list(text, ',')) {
    if (part.size() != 1 || part[0] < 'a' || part[0] > 'g') {
      std::string lowered = part;
      for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (lowered.size() == 1 && lowered[0] >= 'a' && lowered[0] <= 'g') {
        letters.insert(lowered[0]);
        continue;
      }
      throw ConfigError("versions: expected letters a..g, got '" + part + "'");
    }
    letters.insert(part[0]);
  }
  if (letters.empty()) throw ConfigError("versions: empty list");
  std::string normalized;
  for (char c : letters) {
    if (!normalized.empty()) normalized += ',';
    normalized += c;
  }
  return normalized;
}

void run(const ConfigMap& resolved) {
  set_worker_threads(threads_of(resolved));
  const std::uint64_t seed = seed_of(resolved);
  const std::string out_dir = resolved.get("synth.out");
  if (out_dir.empty()) throw ConfigError("synth.out: required");
  const long long subjects = resolved.get_int("synth.subjects");
  if (subjects < 1) throw ConfigError("synth.subjects: need at least 1");
  const std::string versions = normalize_versions(resolved.get("synth.versions"));
  const double val_frac = resolved.get_double("synth.val_frac");
  const double test_frac = resolved.get_double("synth.test_frac");

  SynthConfig config;
  const std::string age_dist = resolved.get("synth.age_dist");
  if (age_dist == "uniform") {
    config.age_distribution = AgeDistribution::uniform;
  } else if (age_dist != "lognormal") {
    throw ConfigError("synth.age_dist: expected lognormal|uniform, got '" + age_dist + "'");
  }
  config.male_fraction = resolved.get_double("synth.male_frac");
  if (config.male_fraction < 0.0 || config.male_fraction > 1.0) {
    throw ConfigError("synth.male_frac: expected 0..1");
  }

  DatasetManifest manifest =
      generate_dataset(static_cast<int>(subjects), seed, out_dir, config);
  manifest = split_manifest(manifest, val_frac, test_frac, seed);
  write_manifest(manifest, manifest.root / version_manifest_name('a'));

  for (char version : versions) {
    if (version == ',' || version == 'a') continue;
    derive_version(manifest, version, seed, config);
  }

  ConfigMap record = resolved;
  record.set("synth.versions", versions);
  write_record(record, std::filesystem::path(out_dir) / "resolved_config.txt");
}

}  // namespace

void register_synth(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand(
      "synth", "Generate a synthetic shoeprint cohort with manifests and dataset versions");
  auto args = std::make_shared<CommandArgs>(cmd, "synth");
  args->add("--subjects", "synth.subjects", "100", "Cohort size (two prints per subject)");
  args->add("--out", "synth.out", "", "Output directory");
  args->add("--versions", "synth.versions", "a,b,c,d,e,f,g",
            "Dataset versions to derive (comma-separated letters a..g)");
  args->add("--val-frac", "synth.val_frac", "0.1", "Validation fraction of subjects");
  args->add("--test-frac", "synth.test_frac", "0.2", "Test fraction of subjects");
  args->add("--age-dist", "synth.age_dist", "lognormal", "Age distribution: lognormal|uniform");
  args->add("--male-frac", "synth.male_frac", "0.7", "Fraction of male subjects");
  add_global_args(*args);
  cmd->callback([args] { run(args->resolve()); });
}

}  // namespace shoeprint::cli
