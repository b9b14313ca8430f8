#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "shoeprint/types.hpp"

namespace shoeprint {

// 8-bit grayscale pressure image, row-major. Higher value = more pressure.
struct ShoeprintImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;
  Side side = Side::left;
  int dpi = 300;

  ShoeprintImage() = default;
  ShoeprintImage(int h, int w, Side s = Side::left, int d = 300);

  std::uint8_t& at(int row, int col) { return pixels[static_cast<size_t>(row) * width + col]; }
  std::uint8_t at(int row, int col) const { return pixels[static_cast<size_t>(row) * width + col]; }
};

// Real-valued grid, used for per-group mean pressure images.
struct MeanImage {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  MeanImage() = default;
  MeanImage(int h, int w) : height(h), width(w), values(static_cast<size_t>(h) * w, 0.0) {}

  double& at(int row, int col) { return values[static_cast<size_t>(row) * width + col]; }
  double at(int row, int col) const { return values[static_cast<size_t>(row) * width + col]; }
};

// Signed pressure-difference grid.
struct SignedMap {
  int height = 0;
  int width = 0;
  std::vector<std::int16_t> values;

  SignedMap() = default;
  SignedMap(int h, int w) : height(h), width(w), values(static_cast<size_t>(h) * w, 0) {}

  std::int16_t& at(int row, int col) { return values[static_cast<size_t>(row) * width + col]; }
  std::int16_t at(int row, int col) const { return values[static_cast<size_t>(row) * width + col]; }
};

// Binary PGM (P5, maxval 255).
ShoeprintImage read_pgm(const std::filesystem::path& path);
void write_pgm(const ShoeprintImage& image, const std::filesystem::path& path);

// [left | right] composition into one pair-side image of width 2w.
ShoeprintImage hconcat_pair(const ShoeprintImage& left, const ShoeprintImage& right);

// Rounded and clamped to [0,255].
void write_mean_pgm(const MeanImage& image, const std::filesystem::path& path);
void write_mean_csv(const MeanImage& image, const std::filesystem::path& path);

// Rendered with a +128 offset so zero difference maps to mid-gray.
void write_signed_pgm(const SignedMap& map, const std::filesystem::path& path);
void write_signed_csv(const SignedMap& map, const std::filesystem::path& path);

}  // namespace shoeprint
