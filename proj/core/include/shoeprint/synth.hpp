#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "shoeprint/image.hpp"
#include "shoeprint/manifest.hpp"
#include "shoeprint/types.hpp"

namespace shoeprint {

struct SubjectProfile {
  long long subject_id = 0;
  int age = 0;  // years, 7..80
  Gender gender = Gender::male;
  double height_cm = 0.0;  // informational only
  double weight_kg = 0.0;  // informational only
  std::uint64_t rng_seed = 0;
};

enum class AgeDistribution { log_normal, uniform };

// Generator constants. The trend shapes are synthetic design choices: inner
// forefoot sites peak at peak_age then decline, outer sites rise to peak_age
// and plateau, and female prints add a growing heel term plus a narrower
// forefoot.
struct SynthConfig {
  int print_h = 64;
  int print_w = 32;

  AgeDistribution age_distribution = AgeDistribution::log_normal;
  double age_log_mu = 3.0;     // log-normal of (age - min_age)
  double age_log_sigma = 0.5;
  int min_age = 7;
  int max_age = 80;
  double male_fraction = 0.7;

  double base_ink = 60.0;      // flat sole pressure
  double bump_gain = 140.0;    // pressure-site amplitude
  double spread_frac = 0.09;   // site spread as a fraction of print height
  double noise_sigma = 6.0;    // per-pixel sensor noise inside the sole

  int peak_age = 40;
  double inner_start = 0.55;   // inner-site weight at min_age
  double inner_end = 0.35;     // inner-site weight at max_age (post-peak decline)
  double outer_start = 0.45;   // outer-site weight at min_age
  double female_heel_gain = 0.3;       // extra medial-heel weight at max_age
  double female_forefoot_scale = 0.92; // forefoot width factor for females
};

// Inner sites carry the rise-then-decline profile; all others rise then
// plateau.
bool is_inner_region(int region);

// Pressure-site weight for one region, piecewise linear over
// [min_age, peak_age, max_age].
double age_weight_profile(int age, Gender gender, int region,
                          const SynthConfig& config = {});

struct PressureField {
  std::array<double, 8> site_weights{};
  std::array<std::array<double, 2>, 8> site_centers{};  // row, col
  std::array<double, 8> site_spreads{};
  double noise_sigma = 0.0;
};

// The eight pressure sites (aligned to regions R0..R7) for one print.
PressureField pressure_field(const SubjectProfile& profile, Side side,
                             const SynthConfig& config = {});

// Renders one print: a two-ellipse sole (forefoot + heel) joined by an arch
// band that narrows on the medial edge, filled with the weighted pressure
// sites and seeded sensor noise. Left and right are mirror geometries and
// the output is a pure function of (subject_id, side, rng_seed).
ShoeprintImage generate_print(const SubjectProfile& profile, Side side,
                              const SynthConfig& config = {});

// Deterministic profile for one subject of a cohort.
SubjectProfile make_subject(long long subject_id, std::uint64_t cohort_seed,
                            const SynthConfig& config = {});

// Writes two prints per subject under out_dir/images plus manifest_a.csv.
DatasetManifest generate_dataset(int n_subjects, std::uint64_t seed, const std::string& out_dir,
                                 const SynthConfig& config = {});

// Subject-level split, stratified by age band with largest-remainder seat
// assignment; never splits one subject across sets.
DatasetManifest split_manifest(const DatasetManifest& manifest, double val_frac, double test_frac,
                               std::uint64_t seed);

// Derives one dataset version from a split A manifest:
//   B segmentation-normalized copies, C left-only, D right-only,
//   E pairwise left|right compositions, F gender-balanced via augmentation,
//   G age-band-balanced via augmentation.
// Augmented rows are added to train/val rows only, so tests stay original.
// New images are written under the manifest root; the derived manifest is
// written as manifest_<v>.csv and returned.
DatasetManifest derive_version(const DatasetManifest& manifest, char version, std::uint64_t seed,
                               const SynthConfig& config = {});

std::string version_manifest_name(char version);

}  // namespace shoeprint
