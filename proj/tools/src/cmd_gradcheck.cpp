#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "cli_common.hpp"
#include "commands.hpp"
#include "shoeprint/builders.hpp"
#include "shoeprint/error.hpp"
#include "shoeprint/graphcheck.hpp"
#include "shoeprint/parallel.hpp"

namespace shoeprint::cli {

namespace {

void run(const ConfigMap& resolved) {
  set_worker_threads(threads_of(resolved));
  const std::string arch = resolved.get("gradcheck.arch");
  if (arch.empty()) throw ConfigError("gradcheck.arch: required");

  ModelGraph graph = build_arch(arch, arch_config_of(resolved, "gradcheck"));

  GraphCheckOptions options;
  options.total_coords = static_cast<int>(resolved.get_int("gradcheck.samples"));
  options.epsilon = resolved.get_double("gradcheck.eps");
  options.tolerance = resolved.get_double("gradcheck.tol");
  options.seed = seed_of(resolved);
  options.loss = loss_of(resolved, "gradcheck", arch);
  options.clf = clf_of(resolved, "gradcheck");
  if (options.total_coords < 1) throw ConfigError("gradcheck.samples: need at least 1");
  if (options.epsilon <= 0 || options.tolerance <= 0) {
    throw ConfigError("gradcheck.eps and gradcheck.tol must be positive");
  }

  const GradCheckReport report = check_graph_gradients(graph, options);
  const GradCheckEntry* worst = report.worst();

  std::ostringstream text;
  char line[256];
  std::snprintf(line, sizeof line,
                "gradcheck %s (%s, %s): %zu coordinates, max rel %.3e, tolerance %.1e: %s\n",
                arch.c_str(), resolved.get("gradcheck.scale").c_str(),
                to_string(options.loss).c_str(), report.entries.size(), report.max_rel_error,
                report.tolerance, report.passed ? "PASS" : "FAIL");
  text << line;
  if (worst) {
    std::snprintf(line, sizeof line, "worst: %s[%lld] analytic %.9e vs numeric %.9e, rel %.3e\n",
                  worst->name.c_str(), worst->index, worst->analytic, worst->numeric,
                  worst->rel_error);
    text << line;
  }
  std::fputs(text.str().c_str(), stdout);

  const std::string out_text = resolved.get("gradcheck.out");
  if (!out_text.empty()) {
    const std::filesystem::path out_dir(out_text);
    std::filesystem::create_directories(out_dir);
    std::ofstream file(out_dir / "report.txt", std::ios::binary);
    if (!file) throw IoError("cannot open '" + (out_dir / "report.txt").string() + "'");
    file << text.str();
    write_record(resolved, out_dir / "resolved_config.txt");
  }

  if (!report.passed) {
    throw VerificationError("gradient check failed at " + (worst ? worst->name : "?") + "[" +
                            std::to_string(worst ? worst->index : 0) + "]");
  }
}

}  // namespace

void register_gradcheck(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand(
      "gradcheck", "Check the whole-graph analytic gradients against finite differences");
  auto args = std::make_shared<CommandArgs>(cmd, "gradcheck");
  add_model_args(*args, "gradcheck", true);
  args->add("--samples", "gradcheck.samples", "120",
            "Sampled coordinates, spread over all parameter tensors");
  args->add("--eps", "gradcheck.eps", "1e-5", "Central-difference step");
  args->add("--tol", "gradcheck.tol", "1e-4", "Acceptable max relative error");
  args->add("--out", "gradcheck.out", "", "Optional directory for report.txt plus the record");
  add_global_args(*args);
  cmd->callback([args] { run(args->resolve()); });
}

}  // namespace shoeprint::cli
