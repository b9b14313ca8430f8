#pragma once

#include <string>
#include <vector>

#include "shoeprint/image.hpp"
#include "shoeprint/types.hpp"

namespace shoeprint {

// Pixelwise mean of same-sized prints. Pixel sums are accumulated in 64-bit
// integers, so the result is bit-identical for any input order.
MeanImage superimpose(const std::vector<const ShoeprintImage*>& prints);
MeanImage superimpose(const std::vector<ShoeprintImage>& prints);

// upper - lower, rounded to the nearest integer per pixel.
SignedMap subtract_categories(const MeanImage& upper, const MeanImage& lower);

// Half-open pixel rectangle labelled with its region id.
struct RegionRect {
  int region = 0;
  int row_begin = 0;
  int row_end = 0;
  int col_begin = 0;
  int col_end = 0;
};

// Splits an h x w print into four toe-to-heel bands by two columns, giving
// regions 0..7 row-major from the toe. Even regions take the medial column,
// odd the lateral one; sides mirror so that pair-composed prints keep even
// regions adjacent across the seam. Row/column remainders go to the heel band
// and to the rightmost column.
std::vector<RegionRect> divide_regions(int height, int width, Side side);

// Mean pixel value over a region rectangle. With mask_threshold >= 0 only
// pixels strictly above the threshold contribute (0 when none do).
double region_mean(const MeanImage& image, const RegionRect& rect, double mask_threshold = -1.0);

struct PressureCurveRow {
  Side side = Side::left;
  int region = 0;
  std::string category;
  double mean_pressure = 0.0;
};

struct CategoryMean {
  std::string label;
  const MeanImage* image = nullptr;
};

// Region-major curve over the per-category mean prints: 8 x (#categories)
// rows, regions ascending, categories in the order given.
std::vector<PressureCurveRow> region_pressure_curve(const std::vector<CategoryMean>& categories,
                                                    Side side, double mask_threshold = -1.0);

std::string pressure_curve_csv(const std::vector<PressureCurveRow>& rows);
void write_pressure_curve_csv(const std::string& path, const std::vector<PressureCurveRow>& rows);

// Inclusive age band.
struct AgeCategory {
  std::string label;
  int min_age = 0;
  int max_age = 0;

  bool contains(int age) const { return age >= min_age && age <= max_age; }
};

// Five disjoint decade-style bands covering ages 7..80.
std::vector<AgeCategory> decade_categories();

// Three nested wide-band filters (whole cohort, 20-50, 25-45).
std::vector<AgeCategory> wide_band_categories();

// Index into decade_categories() for an age, or -1 when outside 7..80.
int decade_category_index(int age);

}  // namespace shoeprint
