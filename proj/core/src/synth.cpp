#include "shoeprint/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>

#include "shoeprint/analysis.hpp"
#include "shoeprint/augment.hpp"
#include "shoeprint/error.hpp"
#include "shoeprint/rng.hpp"
#include "shoeprint/segmentation.hpp"

namespace shoeprint {

namespace fs = std::filesystem;

bool is_inner_region(int region) { return region == 1 || region == 3; }

double age_weight_profile(int age, Gender gender, int region, const SynthConfig& config) {
  if (age < config.min_age || age > config.max_age) {
    throw ConfigError("age " + std::to_string(age) + " outside the cohort range [" +
                      std::to_string(config.min_age) + "," + std::to_string(config.max_age) + "]");
  }
  if (region < 0 || region > 7) {
    throw ConfigError("region id must lie in 0..7, got " + std::to_string(region));
  }

  const double rise = static_cast<double>(age - config.min_age) /
                      static_cast<double>(config.peak_age - config.min_age);
  const double fall = static_cast<double>(age - config.peak_age) /
                      static_cast<double>(config.max_age - config.peak_age);

  double weight;
  if (is_inner_region(region)) {
    weight = age <= config.peak_age
                 ? config.inner_start + (1.0 - config.inner_start) * rise
                 : 1.0 + (config.inner_end - 1.0) * fall;
  } else {
    weight = age <= config.peak_age ? config.outer_start + (1.0 - config.outer_start) * rise
                                    : 1.0;
  }
  if (gender == Gender::female && region == 6) {
    weight += config.female_heel_gain * static_cast<double>(age - config.min_age) /
              static_cast<double>(config.max_age - config.min_age);
  }
  return weight;
}

PressureField pressure_field(const SubjectProfile& profile, Side side,
                             const SynthConfig& config) {
  if (side == Side::pair) throw ConfigError("pressure fields are defined per single print");
  const double h = config.print_h;
  const double w = config.print_w;
  // Canonical geometry is a right foot (medial on the west); left prints
  // mirror the column coordinate.
  const bool mirror = side == Side::left;
  const auto col_at = [&](double frac) { return mirror ? (w - 1.0) - frac * (w - 1.0) : frac * (w - 1.0); };

  PressureField field;
  field.noise_sigma = config.noise_sigma;
  for (int band = 0; band < 4; ++band) {
    const double row = (band + 0.5) * h / 4.0;
    for (int medial = 1; medial >= 0; --medial) {
      const int region = band * 2 + (medial ? 0 : 1);
      field.site_centers[region] = {row, col_at(medial ? 0.25 : 0.75)};
      field.site_spreads[region] = config.spread_frac * h;
      field.site_weights[region] =
          age_weight_profile(profile.age, profile.gender, region, config);
    }
  }
  return field;
}

namespace {

struct SoleGeometry {
  double fore_r, fore_c, fore_rr, fore_rc;
  double heel_r, heel_c, heel_rr, heel_rc;
  double band_lo_r, band_hi_r;
};

SoleGeometry sole_geometry(int height, int width, Gender gender, const SynthConfig& config) {
  const double h = height;
  const double w = width;
  const double forefoot =
      gender == Gender::female ? config.female_forefoot_scale : 1.0;
  SoleGeometry g;
  g.fore_r = 0.30 * h;
  g.fore_c = 0.50 * w;
  g.fore_rr = 0.22 * h;
  g.fore_rc = 0.38 * w * forefoot;
  g.heel_r = 0.80 * h;
  g.heel_c = 0.52 * w;
  g.heel_rr = 0.14 * h;
  g.heel_rc = 0.30 * w;
  g.band_lo_r = g.fore_r;
  g.band_hi_r = g.heel_r;
  return g;
}

// Canonical (right-foot) sole membership: medial edge on the west, with the
// arch band cut deeper into the medial side.
bool in_sole(const SoleGeometry& g, double w, double row, double col) {
  const auto in_ellipse = [](double r, double c, double cr, double cc, double rr, double rc) {
    const double dr = (r - cr) / rr;
    const double dc = (c - cc) / rc;
    return dr * dr + dc * dc <= 1.0;
  };
  if (in_ellipse(row, col, g.fore_r, g.fore_c, g.fore_rr, g.fore_rc)) return true;
  if (in_ellipse(row, col, g.heel_r, g.heel_c, g.heel_rr, g.heel_rc)) return true;
  if (row >= g.band_lo_r && row <= g.band_hi_r) {
    const double t = (row - g.band_lo_r) / (g.band_hi_r - g.band_lo_r);
    const double cut = 0.55 * std::sin(t * 3.14159265358979323846);
    const double west = g.heel_c - 0.30 * w * (1.0 - cut);  // medial edge, pulled inward
    const double east = g.heel_c + 0.30 * w;
    return col >= west && col <= east;
  }
  return false;
}

}  // namespace

ShoeprintImage generate_print(const SubjectProfile& profile, Side side,
                              const SynthConfig& config) {
  if (side == Side::pair) throw ConfigError("generate single prints, then compose pairs");
  const int height = config.print_h;
  const int width = config.print_w;
  const bool mirror = side == Side::left;

  const SoleGeometry geometry = sole_geometry(height, width, profile.gender, config);
  const PressureField field = pressure_field(profile, side, config);

  ShoeprintImage print(height, width, side);
  Rng noise(hash_combine(profile.rng_seed, side == Side::left ? 0x4cu : 0x52u));
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      // Evaluate the canonical field at mirrored coordinates for left prints
      // so the two sides are exact mirror geometries.
      const double canon_col = mirror ? (width - 1.0) - col : col;
      if (!in_sole(geometry, width, row, canon_col)) continue;
      double value = config.base_ink;
      for (int region = 0; region < 8; ++region) {
        const double dr = row - field.site_centers[region][0];
        const double dc = col - field.site_centers[region][1];
        const double spread = field.site_spreads[region];
        value += config.bump_gain * field.site_weights[region] *
                 std::exp(-(dr * dr + dc * dc) / (2.0 * spread * spread));
      }
      value += noise.gaussian() * config.noise_sigma;
      print.pixels[static_cast<size_t>(row) * width + col] =
          static_cast<std::uint8_t>(std::clamp(std::llround(value), 0LL, 255LL));
    }
  }
  return print;
}

SubjectProfile make_subject(long long subject_id, std::uint64_t cohort_seed,
                            const SynthConfig& config) {
  SubjectProfile profile;
  profile.subject_id = subject_id;
  profile.rng_seed = hash_combine(cohort_seed, static_cast<std::uint64_t>(subject_id));

  Rng rng(hash_combine(profile.rng_seed, 0x70726f66u));
  profile.gender = rng.uniform() < config.male_fraction ? Gender::male : Gender::female;

  if (config.age_distribution == AgeDistribution::uniform) {
    profile.age = static_cast<int>(rng.uniform_int(config.min_age, config.max_age));
  } else {
    while (true) {
      const double offset = std::exp(config.age_log_mu + config.age_log_sigma * rng.gaussian());
      const long long age = config.min_age + std::llround(offset);
      if (age <= config.max_age) {
        profile.age = static_cast<int>(age);
        break;
      }
    }
  }

  // Informational fields only; rough adult norms shrunk for minors.
  const double grown = std::min(1.0, 0.55 + 0.45 * profile.age / 18.0);
  const double height_base = profile.gender == Gender::male ? 175.0 : 162.0;
  const double weight_base = profile.gender == Gender::male ? 72.0 : 60.0;
  profile.height_cm = std::max(95.0, height_base * grown + rng.gaussian() * 6.0);
  profile.weight_kg = std::max(16.0, weight_base * grown * grown + rng.gaussian() * 7.0);
  return profile;
}

namespace {

std::string print_file_name(long long subject_id, Side side) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "s%06lld_%s.pgm", subject_id, to_string(side).c_str());
  return buffer;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

ManifestRow subject_row(const SubjectProfile& profile, Side side, const std::string& path) {
  ManifestRow row;
  row.subject_id = profile.subject_id;
  row.side = side;
  row.age = profile.age;
  row.gender = profile.gender;
  row.height_cm = profile.height_cm;
  row.weight_kg = profile.weight_kg;
  row.path = path;
  row.split = Split::train;
  row.provenance = Provenance::original;
  return row;
}

}  // namespace

DatasetManifest generate_dataset(int n_subjects, std::uint64_t seed, const std::string& out_dir,
                                 const SynthConfig& config) {
  if (n_subjects < 1) throw ConfigError("need at least one subject");
  ensure_dir(fs::path(out_dir) / "images");

  DatasetManifest manifest;
  manifest.root = out_dir;
  manifest.rows.reserve(static_cast<size_t>(n_subjects) * 2);
  for (long long id = 0; id < n_subjects; ++id) {
    const SubjectProfile profile = make_subject(id, seed, config);
    for (const Side side : {Side::left, Side::right}) {
      const std::string rel = "images/" + print_file_name(id, side);
      write_pgm(generate_print(profile, side, config), fs::path(out_dir) / rel);
      manifest.rows.push_back(subject_row(profile, side, rel));
    }
  }
  write_manifest(manifest, fs::path(out_dir) / version_manifest_name('A'));
  return manifest;
}

DatasetManifest split_manifest(const DatasetManifest& manifest, double val_frac, double test_frac,
                               std::uint64_t seed) {
  if (val_frac < 0.0 || test_frac < 0.0 || val_frac + test_frac >= 1.0) {
    throw ConfigError("split fractions must be non-negative and sum below 1");
  }

  struct SubjectInfo {
    long long id;
    int age;
  };
  std::map<long long, int> subject_ages;
  for (const ManifestRow& row : manifest.rows) subject_ages.emplace(row.subject_id, row.age);

  std::vector<std::vector<long long>> bins(decade_categories().size());
  for (const auto& [id, age] : subject_ages) {
    const int bin = decade_category_index(age);
    if (bin < 0) throw ConfigError("subject age " + std::to_string(age) + " has no age band");
    bins[static_cast<size_t>(bin)].push_back(id);
  }

  const size_t total = subject_ages.size();
  const auto seats = [&](double frac) {
    // Largest-remainder apportionment of round(frac * total) seats over bins.
    const long long want = std::llround(frac * static_cast<double>(total));
    std::vector<long long> alloc(bins.size(), 0);
    std::vector<std::pair<double, size_t>> remainders;
    long long used = 0;
    for (size_t b = 0; b < bins.size(); ++b) {
      const double exact = frac * static_cast<double>(bins[b].size());
      alloc[b] = static_cast<long long>(std::floor(exact));
      alloc[b] = std::min<long long>(alloc[b], static_cast<long long>(bins[b].size()));
      used += alloc[b];
      remainders.push_back({exact - static_cast<double>(alloc[b]), b});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (size_t i = 0; used < want && i < remainders.size(); ++i) {
      const size_t b = remainders[i].second;
      if (alloc[b] < static_cast<long long>(bins[b].size())) {
        ++alloc[b];
        ++used;
      }
    }
    return alloc;
  };

  const std::vector<long long> val_alloc = seats(val_frac);
  const std::vector<long long> test_alloc = seats(test_frac);

  std::map<long long, Split> assignment;
  for (size_t b = 0; b < bins.size(); ++b) {
    std::vector<long long>& ids = bins[b];
    Rng rng(hash_combine(seed, 0x73706c6974u + b));
    for (size_t i = ids.size(); i > 1; --i) {
      std::swap(ids[i - 1], ids[rng.uniform_int(0, static_cast<long long>(i) - 1)]);
    }
    for (size_t i = 0; i < ids.size(); ++i) {
      Split split = Split::train;
      if (i < static_cast<size_t>(val_alloc[b])) {
        split = Split::val;
      } else if (i < static_cast<size_t>(val_alloc[b] + test_alloc[b])) {
        split = Split::test;
      }
      assignment[ids[i]] = split;
    }
  }

  DatasetManifest out = manifest;
  for (ManifestRow& row : out.rows) row.split = assignment.at(row.subject_id);
  return out;
}

namespace {

DatasetManifest derive_segmented(const DatasetManifest& a, const SynthConfig& config) {
  DatasetManifest out;
  out.root = a.root;
  ensure_dir(fs::path(a.root) / "images_b");
  for (const ManifestRow& row : a.rows) {
    const ShoeprintImage image = read_pgm(a.image_path(row));
    const Mask mask = threshold_mask(image, 10);
    const Box box = union_bounding_box(find_contours(mask));
    const ShoeprintImage trimmed =
        crop_resize_bicubic(image, box, config.print_h, config.print_w);
    ManifestRow copy = row;
    copy.path = "images_b/" + print_file_name(row.subject_id, row.side);
    write_pgm(trimmed, fs::path(a.root) / copy.path);
    out.rows.push_back(copy);
  }
  return out;
}

DatasetManifest derive_side_only(const DatasetManifest& a, Side side) {
  DatasetManifest out;
  out.root = a.root;
  for (const ManifestRow& row : a.rows) {
    if (row.side == side) out.rows.push_back(row);
  }
  return out;
}

DatasetManifest derive_pairwise(const DatasetManifest& a) {
  DatasetManifest out;
  out.root = a.root;
  ensure_dir(fs::path(a.root) / "images_e");

  std::map<long long, std::pair<const ManifestRow*, const ManifestRow*>> sides;
  for (const ManifestRow& row : a.rows) {
    if (row.side == Side::left) sides[row.subject_id].first = &row;
    if (row.side == Side::right) sides[row.subject_id].second = &row;
  }
  for (const auto& [id, pair] : sides) {
    if (!pair.first || !pair.second) {
      throw ConfigError("subject " + std::to_string(id) +
                        " lacks a full left/right pair for the pairwise dataset");
    }
    const ShoeprintImage composed =
        hconcat_pair(read_pgm(a.image_path(*pair.first)), read_pgm(a.image_path(*pair.second)));
    ManifestRow row = *pair.first;
    row.side = Side::pair;
    row.path = "images_e/" + print_file_name(id, Side::pair);
    write_pgm(composed, fs::path(a.root) / row.path);
    out.rows.push_back(row);
  }
  return out;
}

// Appends augmented copies of donor rows (train/val only) until every group
// reaches the largest group's count. Groups are row partitions: gender for F,
// age band for G.
DatasetManifest derive_balanced(const DatasetManifest& a, char version, std::uint64_t seed,
                                const SynthConfig& config) {
  const bool by_gender = version == 'F';
  const std::string dir = by_gender ? "images_f" : "images_g";
  ensure_dir(fs::path(a.root) / dir);

  const auto group_of = [&](const ManifestRow& row) {
    return by_gender ? static_cast<int>(row.gender) : decade_category_index(row.age);
  };
  const int group_count = by_gender ? 2 : static_cast<int>(decade_categories().size());

  DatasetManifest out = a;
  std::vector<std::vector<size_t>> donors(static_cast<size_t>(group_count));
  std::vector<long long> counts(static_cast<size_t>(group_count), 0);
  for (size_t i = 0; i < a.rows.size(); ++i) {
    const ManifestRow& row = a.rows[i];
    if (row.split == Split::test) continue;
    const int group = group_of(row);
    if (group < 0) throw ConfigError("row age " + std::to_string(row.age) + " has no age band");
    ++counts[static_cast<size_t>(group)];
    donors[static_cast<size_t>(group)].push_back(i);
  }
  const long long target = *std::max_element(counts.begin(), counts.end());

  const std::vector<AugmentOp> ops =
      by_gender
          ? std::vector<AugmentOp>{AugmentOp::gaussian_noise, AugmentOp::rotate, AugmentOp::crop}
          : std::vector<AugmentOp>{AugmentOp::gaussian_noise, AugmentOp::flip_lr,
                                   AugmentOp::rotate, AugmentOp::crop};

  Rng rng(hash_combine(seed, by_gender ? 0x62616c46u : 0x62616c47u));
  long long serial = 0;
  for (int group = 0; group < group_count; ++group) {
    const std::vector<size_t>& pool = donors[static_cast<size_t>(group)];
    if (pool.empty() && counts[static_cast<size_t>(group)] < target) {
      throw ConfigError("cannot balance an empty group (group index " + std::to_string(group) +
                        ")");
    }
    for (long long n = counts[static_cast<size_t>(group)]; n < target; ++n) {
      const ManifestRow& donor = a.rows[pool[static_cast<size_t>(
          rng.uniform_int(0, static_cast<long long>(pool.size()) - 1))]];
      const AugmentOp op = ops[static_cast<size_t>(
          rng.uniform_int(0, static_cast<long long>(ops.size()) - 1))];
      AugmentParams params;
      params.noise_sigma = config.noise_sigma;
      params.rotate_deg = rng.uniform() * 30.0 - 15.0;
      params.crop_frac = 0.85 + rng.uniform() * 0.15;
      const std::uint64_t op_seed = rng.next_u64();

      const ShoeprintImage source = read_pgm(a.image_path(donor));
      const ShoeprintImage warped = augment(source, op, op_seed, params);

      char name[64];
      std::snprintf(name, sizeof(name), "aug%06lld.pgm", serial++);
      ManifestRow row = donor;
      row.side = warped.side;
      row.path = dir + "/" + name;
      row.provenance = Provenance::augmented;
      write_pgm(warped, fs::path(a.root) / row.path);
      out.rows.push_back(row);
    }
  }
  return out;
}

}  // namespace

std::string version_manifest_name(char version) {
  const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(version)));
  if (upper < 'A' || upper > 'G') {
    throw ConfigError(std::string("unknown dataset version '") + version +
                      "' (expected A through G)");
  }
  return std::string("manifest_") + static_cast<char>(std::tolower(upper)) + ".csv";
}

DatasetManifest derive_version(const DatasetManifest& manifest, char version, std::uint64_t seed,
                               const SynthConfig& config) {
  const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(version)));
  DatasetManifest out;
  switch (upper) {
    case 'B': out = derive_segmented(manifest, config); break;
    case 'C': out = derive_side_only(manifest, Side::left); break;
    case 'D': out = derive_side_only(manifest, Side::right); break;
    case 'E': out = derive_pairwise(manifest); break;
    case 'F':
    case 'G': out = derive_balanced(manifest, upper, seed, config); break;
    default:
      throw ConfigError(std::string("unknown dataset version '") + version +
                        "' (expected B through G)");
  }
  write_manifest(out, fs::path(out.root) / version_manifest_name(upper));
  return out;
}

}  // namespace shoeprint
