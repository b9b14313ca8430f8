#pragma once

#include <cstdint>
#include <vector>

#include "shoeprint/image.hpp"

namespace shoeprint {

struct Mask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> fg;  // 1 = foreground

  Mask() = default;
  Mask(int h, int w) : height(h), width(w), fg(static_cast<size_t>(h) * w, 0) {}

  bool at(int row, int col) const { return fg[static_cast<size_t>(row) * width + col] != 0; }
  void set(int row, int col, bool value) {
    fg[static_cast<size_t>(row) * width + col] = value ? 1 : 0;
  }
};

// Foreground where intensity > threshold.
Mask threshold_mask(const ShoeprintImage& image, int threshold);

struct PixelPoint {
  int row = 0;
  int col = 0;
  bool operator==(const PixelPoint&) const = default;
};

// Closed chain of 8-connected border pixels.
struct Contour {
  std::vector<PixelPoint> points;
};

// Outer borders of the 8-connected foreground components, traced clockwise
// from each component's top-left-most pixel; contours are ordered by that
// start pixel (row, then column).
std::vector<Contour> find_contours(const Mask& mask);

// Inclusive pixel box.
struct Box {
  int top = 0;
  int left = 0;
  int bottom = 0;
  int right = 0;

  int height() const { return bottom - top + 1; }
  int width() const { return right - left + 1; }
  bool operator==(const Box&) const = default;
};

// Tightest box covering every contour pixel; error when no contours.
Box union_bounding_box(const std::vector<Contour>& contours);

// Crop to box, then resample to target with Catmull-Rom bicubic (a = -0.5),
// clamped to [0,255].
ShoeprintImage crop_resize_bicubic(const ShoeprintImage& image, const Box& box, int target_h,
                                   int target_w);

}  // namespace shoeprint
