#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "doctest.h"
#include "shoeprint/error.hpp"
#include "shoeprint/rng.hpp"
#include "shoeprint/segmentation.hpp"

using namespace shoeprint;

namespace {

ShoeprintImage image_from_rows(const std::vector<std::vector<int>>& rows) {
  ShoeprintImage image(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width; ++c) {
      image.at(r, c) = static_cast<std::uint8_t>(rows[r][c]);
    }
  }
  return image;
}

Box brute_force_box(const Mask& mask) {
  Box box{mask.height, mask.width, -1, -1};
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(r, c)) continue;
      box.top = std::min(box.top, r);
      box.left = std::min(box.left, c);
      box.bottom = std::max(box.bottom, r);
      box.right = std::max(box.right, c);
    }
  }
  return box;
}

bool has_foreground(const Mask& mask) {
  return std::any_of(mask.fg.begin(), mask.fg.end(), [](std::uint8_t v) { return v != 0; });
}

}  // namespace

TEST_CASE("threshold keeps strictly brighter pixels only") {
  const ShoeprintImage image = image_from_rows({{0, 127, 128}, {129, 200, 255}});
  const Mask mask = threshold_mask(image, 128);
  CHECK(mask.height == 2);
  CHECK(mask.width == 3);
  CHECK_FALSE(mask.at(0, 0));
  CHECK_FALSE(mask.at(0, 1));
  CHECK_FALSE(mask.at(0, 2));  // equality is background
  CHECK(mask.at(1, 0));
  CHECK(mask.at(1, 1));
  CHECK(mask.at(1, 2));

  const Mask none = threshold_mask(image, 255);
  CHECK_FALSE(has_foreground(none));
  const Mask all = threshold_mask(image, -1);
  CHECK(std::count(all.fg.begin(), all.fg.end(), 1) == 6);
}

TEST_CASE("solid square contour walks the eight border pixels clockwise") {
  Mask mask(7, 9);
  for (int r = 2; r <= 4; ++r) {
    for (int c = 3; c <= 5; ++c) mask.set(r, c, true);
  }
  const auto contours = find_contours(mask);
  REQUIRE(contours.size() == 1);
  const std::vector<PixelPoint> expected = {{2, 3}, {2, 4}, {2, 5}, {3, 5},
                                            {4, 5}, {4, 4}, {4, 3}, {3, 3}};
  CHECK(contours[0].points == expected);  // center (3,4) is interior, not border
}

TEST_CASE("isolated pixel yields a one-point contour") {
  Mask mask(4, 4);
  mask.set(2, 1, true);
  const auto contours = find_contours(mask);
  REQUIRE(contours.size() == 1);
  REQUIRE(contours[0].points.size() == 1);
  CHECK(contours[0].points[0] == PixelPoint{2, 1});
}

TEST_CASE("thin line is walked out and back along both sides") {
  Mask mask(3, 5);
  for (int c = 1; c <= 3; ++c) mask.set(1, c, true);
  const auto contours = find_contours(mask);
  REQUIRE(contours.size() == 1);
  const std::vector<PixelPoint> expected = {{1, 1}, {1, 2}, {1, 3}, {1, 2}};
  CHECK(contours[0].points == expected);
}

TEST_CASE("one-pixel ring traces all sixteen outer border pixels") {
  Mask mask(7, 7);
  for (int i = 1; i <= 5; ++i) {
    mask.set(1, i, true);
    mask.set(5, i, true);
    mask.set(i, 1, true);
    mask.set(i, 5, true);
  }
  const auto contours = find_contours(mask);
  REQUIRE(contours.size() == 1);
  std::set<std::pair<int, int>> visited;
  for (const PixelPoint& p : contours[0].points) visited.insert({p.row, p.col});
  CHECK(visited.size() == 16);
  CHECK(union_bounding_box(contours) == Box{1, 1, 5, 5});
}

TEST_CASE("contours are ordered by their top-left-most start pixel") {
  Mask mask(8, 8);
  mask.set(0, 5, true);
  mask.set(3, 1, true);
  mask.set(3, 6, true);
  const auto contours = find_contours(mask);
  REQUIRE(contours.size() == 3);
  CHECK(contours[0].points[0] == PixelPoint{0, 5});
  CHECK(contours[1].points[0] == PixelPoint{3, 1});
  CHECK(contours[2].points[0] == PixelPoint{3, 6});
}

TEST_CASE("diagonally touching pixels form one component") {
  Mask mask(4, 4);
  mask.set(0, 0, true);
  mask.set(1, 1, true);
  mask.set(2, 2, true);
  const auto contours = find_contours(mask);
  REQUIRE(contours.size() == 1);
  CHECK(union_bounding_box(contours) == Box{0, 0, 2, 2});
}

TEST_CASE("bounding box matches the brute-force extremes on random masks") {
  Rng rng(2024);
  for (int trial = 0; trial < 120; ++trial) {
    const int h = rng.uniform_int(1, 40);
    const int w = rng.uniform_int(1, 32);
    const double density = rng.uniform(0.03, 0.9);
    Mask mask(h, w);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (rng.uniform() < density) mask.set(r, c, true);
      }
    }
    if (!has_foreground(mask)) {
      CHECK_THROWS_AS(union_bounding_box(find_contours(mask)), VerificationError);
      continue;
    }
    const auto contours = find_contours(mask);
    const Box box = union_bounding_box(contours);
    CHECK(box == brute_force_box(mask));
    for (const Contour& contour : contours) {
      for (const PixelPoint& p : contour.points) {
        REQUIRE(mask.at(p.row, p.col));
      }
    }
  }
}

TEST_CASE("empty mask has no contours and no bounding box") {
  Mask mask(5, 5);
  CHECK(find_contours(mask).empty());
  CHECK_THROWS_AS(union_bounding_box({}), VerificationError);
}

TEST_CASE("box helpers report inclusive extents") {
  const Box box{2, 3, 5, 9};
  CHECK(box.height() == 4);
  CHECK(box.width() == 7);
}

TEST_CASE("crop at native size copies pixels exactly") {
  Rng rng(7);
  ShoeprintImage image(12, 10, Side::right, 150);
  for (auto& p : image.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  const Box box{2, 1, 9, 6};
  const ShoeprintImage out = crop_resize_bicubic(image, box, box.height(), box.width());
  CHECK(out.height == 8);
  CHECK(out.width == 6);
  CHECK(out.side == Side::right);
  CHECK(out.dpi == 150);
  for (int r = 0; r < out.height; ++r) {
    for (int c = 0; c < out.width; ++c) {
      REQUIRE(out.at(r, c) == image.at(box.top + r, box.left + c));
    }
  }
}

TEST_CASE("flat images stay flat through resampling") {
  ShoeprintImage image(9, 9);
  std::fill(image.pixels.begin(), image.pixels.end(), std::uint8_t{100});
  for (const auto& [th, tw] : std::vector<std::pair<int, int>>{{4, 4}, {16, 12}, {5, 21}}) {
    const ShoeprintImage out = crop_resize_bicubic(image, Box{0, 0, 8, 8}, th, tw);
    CHECK(out.height == th);
    CHECK(out.width == tw);
    for (const std::uint8_t p : out.pixels) REQUIRE(p == 100);
  }
}

TEST_CASE("upsampled ramp stays monotone and in range") {
  ShoeprintImage image(6, 16);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 16; ++c) image.at(r, c) = static_cast<std::uint8_t>(c * 17);
  }
  const ShoeprintImage out = crop_resize_bicubic(image, Box{0, 0, 5, 15}, 12, 32);
  for (int r = 0; r < out.height; ++r) {
    for (int c = 1; c < out.width; ++c) {
      REQUIRE(out.at(r, c) >= out.at(r, c - 1));
    }
  }
  CHECK(out.at(0, 0) == 0);
  CHECK(out.at(11, 31) == 255);
}

TEST_CASE("hard edges survive resampling without wrap-around") {
  // Catmull-Rom overshoots at step edges; outputs must clamp, not wrap.
  ShoeprintImage image(8, 8);
  for (int r = 0; r < 8; ++r) {
    for (int c = 4; c < 8; ++c) image.at(r, c) = 255;
  }
  const ShoeprintImage out = crop_resize_bicubic(image, Box{0, 0, 7, 7}, 24, 24);
  int dark = 0;
  int bright = 0;
  for (const std::uint8_t p : out.pixels) {
    if (p == 0) ++dark;
    if (p == 255) ++bright;
  }
  CHECK(dark > 100);
  CHECK(bright > 100);
}

TEST_CASE("crop box and target validation") {
  const ShoeprintImage image(10, 10);
  CHECK_THROWS_AS(crop_resize_bicubic(image, Box{-1, 0, 5, 5}, 8, 8), ConfigError);
  CHECK_THROWS_AS(crop_resize_bicubic(image, Box{0, 0, 10, 5}, 8, 8), ConfigError);
  CHECK_THROWS_AS(crop_resize_bicubic(image, Box{0, 0, 5, 10}, 8, 8), ConfigError);
  CHECK_THROWS_AS(crop_resize_bicubic(image, Box{5, 0, 4, 5}, 8, 8), ConfigError);
  CHECK_THROWS_AS(crop_resize_bicubic(image, Box{0, 5, 5, 4}, 8, 8), ConfigError);
  CHECK_THROWS_AS(crop_resize_bicubic(image, Box{0, 0, 9, 9}, 3, 8), ConfigError);
  CHECK_THROWS_AS(crop_resize_bicubic(image, Box{0, 0, 9, 9}, 8, 3), ConfigError);
  CHECK_NOTHROW(crop_resize_bicubic(image, Box{0, 0, 9, 9}, 4, 4));
}
