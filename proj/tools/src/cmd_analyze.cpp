#include <cstdio>
#include <deque>
#include <filesystem>
#include <memory>
#include <vector>

#include "cli_common.hpp"
#include "commands.hpp"
#include "shoeprint/analysis.hpp"
#include "shoeprint/error.hpp"
#include "shoeprint/image.hpp"
#include "shoeprint/parallel.hpp"
#include "shoeprint/svg.hpp"

namespace shoeprint::cli {

namespace {

struct SideRows {
  Side side = Side::left;
  std::vector<const ManifestRow*> rows;
};

MeanImage mean_of(const DatasetManifest& manifest, const std::vector<const ManifestRow*>& rows,
                  const std::string& what) {
  if (rows.empty()) throw ConfigError(what + " has no prints");
  std::vector<ShoeprintImage> prints;
  prints.reserve(rows.size());
  for (const ManifestRow* row : rows) prints.push_back(read_pgm(manifest.image_path(*row)));
  return superimpose(prints);
}

void write_curves(const std::filesystem::path& out_dir, const std::string& stem, Side side,
                  const std::vector<CategoryMean>& categories, double mask_threshold) {
  const std::vector<PressureCurveRow> rows =
      region_pressure_curve(categories, side, mask_threshold);
  write_pressure_curve_csv((out_dir / (stem + ".csv")).string(), rows);

  const size_t n_cat = categories.size();
  std::vector<std::string> labels;
  for (const CategoryMean& category : categories) labels.push_back(category.label);
  std::vector<SvgSeries> series;
  for (int region = 0; region < 8; ++region) {
    SvgSeries s{"R" + std::to_string(region), {}};
    for (size_t c = 0; c < n_cat; ++c) {
      s.values.push_back(rows[static_cast<size_t>(region) * n_cat + c].mean_pressure);
    }
    series.push_back(std::move(s));
  }
  write_line_plot_svg((out_dir / (stem + ".svg")).string(),
                      "Mean region pressure, " + to_string(side) + " prints", labels, series);
}

void run(const ConfigMap& resolved) {
  set_worker_threads(threads_of(resolved));
  const std::string data_dir = resolved.get("analyze.data");
  if (data_dir.empty()) throw ConfigError("analyze.data: required");
  const std::string out_text = resolved.get("analyze.out");
  if (out_text.empty()) throw ConfigError("analyze.out: required");
  const std::filesystem::path out_dir(out_text);
  std::filesystem::create_directories(out_dir);

  const std::string grouping = resolved.get("analyze.grouping");
  if (grouping != "typeA" && grouping != "typeB") {
    throw ConfigError("analyze.grouping: expected typeA|typeB, got '" + grouping + "'");
  }
  const bool neighbors = grouping == "typeB";  // typeA bands overlap, no neighbor maps
  const std::vector<AgeCategory> categories =
      neighbors ? decade_categories() : wide_band_categories();
  const double mask_threshold = resolved.get_double("analyze.mask_threshold");
  const bool gender_split = resolved.get_int("analyze.gender_split") != 0;

  const std::string version_text = resolved.get("analyze.version");
  if (version_text.size() != 1 || version_text[0] < 'a' || version_text[0] > 'g') {
    throw ConfigError("analyze.version: expected a..g, got '" + version_text + "'");
  }
  const DatasetManifest manifest = read_manifest(manifest_path_in(data_dir, version_text[0]));

  // Trends are population statements: use every original single print,
  // whatever its split; augmented rows would bias the means.
  SideRows sides[2] = {{Side::left, {}}, {Side::right, {}}};
  for (const ManifestRow& row : manifest.rows) {
    if (row.provenance != Provenance::original) continue;
    if (row.side == Side::left) sides[0].rows.push_back(&row);
    if (row.side == Side::right) sides[1].rows.push_back(&row);
  }

  for (const SideRows& side_rows : sides) {
    const std::string side_name = to_string(side_rows.side);
    if (side_rows.rows.empty()) {
      throw ConfigError("no original " + side_name + " prints in the " + version_text +
                        " manifest");
    }

    std::deque<MeanImage> means;
    std::vector<CategoryMean> labelled;
    for (const AgeCategory& category : categories) {
      std::vector<const ManifestRow*> members;
      for (const ManifestRow* row : side_rows.rows) {
        if (category.contains(row->age)) members.push_back(row);
      }
      means.push_back(
          mean_of(manifest, members, "category '" + category.label + "' (" + side_name + ")"));
      write_mean_pgm(means.back(), out_dir / ("mean_" + side_name + "_" + category.label + ".pgm"));
      labelled.push_back({category.label, &means.back()});
    }

    if (neighbors) {
      for (size_t i = 1; i < labelled.size(); ++i) {
        const SignedMap diff = subtract_categories(*labelled[i].image, *labelled[i - 1].image);
        const std::string stem =
            "sub_" + side_name + "_" + labelled[i].label + "-" + labelled[i - 1].label;
        write_signed_pgm(diff, out_dir / (stem + ".pgm"));
        write_signed_csv(diff, out_dir / (stem + ".csv"));
      }

      std::vector<const ManifestRow*> early, rest;
      for (const ManifestRow* row : side_rows.rows) {
        (row->age <= 20 ? early : rest).push_back(row);
      }
      const MeanImage early_mean = mean_of(manifest, early, "early band (age <= 20, " + side_name + ")");
      const MeanImage rest_mean = mean_of(manifest, rest, "rest band (age > 20, " + side_name + ")");
      const SignedMap diff = subtract_categories(rest_mean, early_mean);
      write_signed_pgm(diff, out_dir / ("early_vs_rest_" + side_name + ".pgm"));
      write_signed_csv(diff, out_dir / ("early_vs_rest_" + side_name + ".csv"));
    }

    write_curves(out_dir, "curves_" + side_name, side_rows.side, labelled, mask_threshold);

    if (gender_split) {
      for (Gender gender : {Gender::male, Gender::female}) {
        const std::string gender_name = to_string(gender);
        std::deque<MeanImage> gender_means;
        std::vector<CategoryMean> gender_labelled;
        for (const AgeCategory& category : categories) {
          std::vector<const ManifestRow*> members;
          for (const ManifestRow* row : side_rows.rows) {
            if (row->gender == gender && category.contains(row->age)) members.push_back(row);
          }
          gender_means.push_back(mean_of(manifest, members,
                                         "category '" + category.label + "' (" + side_name +
                                             ", " + gender_name + ")"));
          gender_labelled.push_back({category.label, &gender_means.back()});
        }
        write_curves(out_dir, "curves_" + side_name + "_" + gender_name, side_rows.side,
                     gender_labelled, mask_threshold);
      }
    }
  }

  write_record(resolved, out_dir / "resolved_config.txt");
  std::printf("analyzed %s grouping over %zu left / %zu right prints into %s\n", grouping.c_str(),
              sides[0].rows.size(), sides[1].rows.size(), out_text.c_str());
}

}  // namespace

void register_analyze(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand(
      "analyze", "Superimpose age categories, map their differences, and plot region curves");
  auto args = std::make_shared<CommandArgs>(cmd, "analyze");
  args->add("--data", "analyze.data", "", "Dataset directory");
  args->add("--out", "analyze.out", "", "Output directory");
  args->add("--grouping", "analyze.grouping", "typeB",
            "typeB: disjoint decade bands with neighbor subtraction maps; typeA: nested wide bands");
  args->add("--version", "analyze.version", "a", "Dataset version a..g");
  args->add("--mask-threshold", "analyze.mask_threshold", "-1",
            "Count only pixels strictly above this value in region means (-1 = all)");
  args->add_switch("--gender-split", "analyze.gender_split",
                   "Also emit per-gender region curves");
  add_global_args(*args);
  cmd->callback([args] { run(args->resolve()); });
}

}  // namespace shoeprint::cli
