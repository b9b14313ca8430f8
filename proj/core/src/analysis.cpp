#include "shoeprint/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "shoeprint/error.hpp"

namespace shoeprint {

MeanImage superimpose(const std::vector<const ShoeprintImage*>& prints) {
  if (prints.empty()) throw ConfigError("cannot superimpose an empty set of prints");
  const ShoeprintImage& first = *prints.front();
  std::vector<std::uint64_t> sums(first.pixels.size(), 0);
  for (const ShoeprintImage* print : prints) {
    if (print->height != first.height || print->width != first.width) {
      throw ShapeError("superimpose needs same-sized prints, got " +
                       std::to_string(print->height) + "x" + std::to_string(print->width) +
                       " alongside " + std::to_string(first.height) + "x" +
                       std::to_string(first.width));
    }
    for (size_t i = 0; i < sums.size(); ++i) sums[i] += print->pixels[i];
  }
  MeanImage mean(first.height, first.width);
  const double inv = 1.0 / static_cast<double>(prints.size());
  for (size_t i = 0; i < sums.size(); ++i) {
    mean.values[i] = static_cast<double>(sums[i]) * inv;
  }
  return mean;
}

MeanImage superimpose(const std::vector<ShoeprintImage>& prints) {
  std::vector<const ShoeprintImage*> ptrs;
  ptrs.reserve(prints.size());
  for (const ShoeprintImage& print : prints) ptrs.push_back(&print);
  return superimpose(ptrs);
}

SignedMap subtract_categories(const MeanImage& upper, const MeanImage& lower) {
  if (upper.height != lower.height || upper.width != lower.width) {
    throw ShapeError("category means differ in size: " + std::to_string(upper.height) + "x" +
                     std::to_string(upper.width) + " vs " + std::to_string(lower.height) + "x" +
                     std::to_string(lower.width));
  }
  SignedMap diff(upper.height, upper.width);
  for (size_t i = 0; i < diff.values.size(); ++i) {
    diff.values[i] = static_cast<std::int16_t>(std::llround(upper.values[i] - lower.values[i]));
  }
  return diff;
}

std::vector<RegionRect> divide_regions(int height, int width, Side side) {
  if (height < 4 || width < 2) {
    throw ConfigError("region grid needs at least 4x2 pixels, got " + std::to_string(height) +
                      "x" + std::to_string(width));
  }
  if (side == Side::pair) {
    throw ConfigError("regions are defined per single print, not for pair compositions");
  }
  const int band = height / 4;
  const int half = width / 2;
  // Left prints carry the medial edge on the east side, right prints on the
  // west, so a [left|right] composition keeps even regions at the seam.
  const bool medial_is_east = side == Side::left;

  std::vector<RegionRect> rects;
  rects.reserve(8);
  for (int b = 0; b < 4; ++b) {
    const int row_begin = b * band;
    const int row_end = b == 3 ? height : row_begin + band;
    const int west_end = half;
    for (int half_idx = 0; half_idx < 2; ++half_idx) {
      const bool east = half_idx == 1;
      const bool medial = east == medial_is_east;
      RegionRect rect;
      rect.region = b * 2 + (medial ? 0 : 1);
      rect.row_begin = row_begin;
      rect.row_end = row_end;
      rect.col_begin = east ? west_end : 0;
      rect.col_end = east ? width : west_end;
      rects.push_back(rect);
    }
  }
  std::sort(rects.begin(), rects.end(),
            [](const RegionRect& a, const RegionRect& b) { return a.region < b.region; });
  return rects;
}

double region_mean(const MeanImage& image, const RegionRect& rect, double mask_threshold) {
  if (rect.row_begin < 0 || rect.col_begin < 0 || rect.row_end > image.height ||
      rect.col_end > image.width || rect.row_begin >= rect.row_end ||
      rect.col_begin >= rect.col_end) {
    throw ShapeError("region rectangle falls outside the image");
  }
  double sum = 0.0;
  long long count = 0;
  for (int row = rect.row_begin; row < rect.row_end; ++row) {
    const double* line = image.values.data() + static_cast<size_t>(row) * image.width;
    for (int col = rect.col_begin; col < rect.col_end; ++col) {
      const double v = line[col];
      if (mask_threshold >= 0.0 && v <= mask_threshold) continue;
      sum += v;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::vector<PressureCurveRow> region_pressure_curve(const std::vector<CategoryMean>& categories,
                                                    Side side, double mask_threshold) {
  if (categories.empty()) throw ConfigError("pressure curve needs at least one category mean");
  const MeanImage& first = *categories.front().image;
  const std::vector<RegionRect> rects = divide_regions(first.height, first.width, side);

  std::vector<PressureCurveRow> rows;
  rows.reserve(rects.size() * categories.size());
  for (const RegionRect& rect : rects) {
    for (const CategoryMean& category : categories) {
      if (category.image->height != first.height || category.image->width != first.width) {
        throw ShapeError("category mean '" + category.label + "' differs in size");
      }
      PressureCurveRow row;
      row.side = side;
      row.region = rect.region;
      row.category = category.label;
      row.mean_pressure = region_mean(*category.image, rect, mask_threshold);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string pressure_curve_csv(const std::vector<PressureCurveRow>& rows) {
  std::ostringstream out;
  out << "side,region,category,mean_pressure\n";
  out.setf(std::ios::fixed);
  out.precision(6);
  for (const PressureCurveRow& row : rows) {
    out << to_string(row.side) << ",R" << row.region << ',' << row.category << ','
        << row.mean_pressure << '\n';
  }
  return out.str();
}

void write_pressure_curve_csv(const std::string& path,
                              const std::vector<PressureCurveRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << pressure_curve_csv(rows);
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<AgeCategory> decade_categories() {
  return {{"catA", 7, 20}, {"catB", 21, 30}, {"catC", 31, 40}, {"catD", 41, 50},
          {"catE", 51, 80}};
}

std::vector<AgeCategory> wide_band_categories() {
  return {{"all", 10, 80}, {"mid", 20, 50}, {"core", 25, 45}};
}

int decade_category_index(int age) {
  const std::vector<AgeCategory> cats = decade_categories();
  for (size_t i = 0; i < cats.size(); ++i) {
    if (cats[i].contains(age)) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace shoeprint
