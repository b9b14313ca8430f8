#include "shoeprint/augment.hpp"

#include <algorithm>
#include <cmath>

#include "shoeprint/error.hpp"
#include "shoeprint/rng.hpp"
#include "shoeprint/segmentation.hpp"

namespace shoeprint {

std::string to_string(AugmentOp op) {
  switch (op) {
    case AugmentOp::gaussian_noise: return "noise";
    case AugmentOp::flip_lr: return "flip";
    case AugmentOp::rotate: return "rotate";
    case AugmentOp::crop: return "crop";
  }
  throw ConfigError("unhandled augment op");
}

AugmentOp augment_op_from_string(const std::string& name) {
  if (name == "noise") return AugmentOp::gaussian_noise;
  if (name == "flip") return AugmentOp::flip_lr;
  if (name == "rotate") return AugmentOp::rotate;
  if (name == "crop") return AugmentOp::crop;
  throw ConfigError("unknown augment op '" + name + "' (expected noise, flip, rotate, or crop)");
}

namespace {

std::uint8_t clamp_pixel(double value) {
  return static_cast<std::uint8_t>(std::clamp(std::llround(value), 0LL, 255LL));
}

ShoeprintImage apply_noise(const ShoeprintImage& print, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw ConfigError("noise sigma must be non-negative");
  ShoeprintImage out = print;
  Rng rng(seed);
  for (size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = clamp_pixel(print.pixels[i] + rng.gaussian() * sigma);
  }
  return out;
}

ShoeprintImage apply_flip(const ShoeprintImage& print) {
  ShoeprintImage out = print;
  for (int row = 0; row < print.height; ++row) {
    const std::uint8_t* src = print.pixels.data() + static_cast<size_t>(row) * print.width;
    std::uint8_t* dst = out.pixels.data() + static_cast<size_t>(row) * print.width;
    for (int col = 0; col < print.width; ++col) dst[col] = src[print.width - 1 - col];
  }
  if (print.side == Side::left) out.side = Side::right;
  else if (print.side == Side::right) out.side = Side::left;
  return out;
}

ShoeprintImage apply_rotate(const ShoeprintImage& print, double degrees) {
  if (std::abs(degrees) > 15.0) {
    throw ConfigError("rotation must stay within +/-15 degrees, got " + std::to_string(degrees));
  }
  const double radians = degrees * 3.14159265358979323846 / 180.0;
  const double cos_t = std::cos(radians);
  const double sin_t = std::sin(radians);
  const double center_r = (print.height - 1) * 0.5;
  const double center_c = (print.width - 1) * 0.5;

  ShoeprintImage out(print.height, print.width, print.side);
  out.dpi = print.dpi;
  for (int row = 0; row < print.height; ++row) {
    for (int col = 0; col < print.width; ++col) {
      // Inverse-map the output pixel into the source and sample bilinearly;
      // samples outside the source count as blank paper (0).
      const double dr = row - center_r;
      const double dc = col - center_c;
      const double src_r = cos_t * dr - sin_t * dc + center_r;
      const double src_c = sin_t * dr + cos_t * dc + center_c;
      const int r0 = static_cast<int>(std::floor(src_r));
      const int c0 = static_cast<int>(std::floor(src_c));
      const double fr = src_r - r0;
      const double fc = src_c - c0;

      double acc = 0.0;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const int rr = r0 + i;
          const int cc = c0 + j;
          if (rr < 0 || rr >= print.height || cc < 0 || cc >= print.width) continue;
          const double weight = (i == 0 ? 1.0 - fr : fr) * (j == 0 ? 1.0 - fc : fc);
          acc += weight * print.pixels[static_cast<size_t>(rr) * print.width + cc];
        }
      }
      out.pixels[static_cast<size_t>(row) * print.width + col] = clamp_pixel(acc);
    }
  }
  return out;
}

ShoeprintImage apply_crop(const ShoeprintImage& print, double frac, std::uint64_t seed) {
  if (frac < 0.85 || frac > 1.0) {
    throw ConfigError("crop fraction must lie in [0.85, 1.0], got " + std::to_string(frac));
  }
  const int crop_h = std::max(1, static_cast<int>(std::lround(print.height * frac)));
  const int crop_w = std::max(1, static_cast<int>(std::lround(print.width * frac)));
  Rng rng(seed);
  const int top = static_cast<int>(rng.uniform_int(0, print.height - crop_h));
  const int left = static_cast<int>(rng.uniform_int(0, print.width - crop_w));
  const Box box{top, left, top + crop_h - 1, left + crop_w - 1};
  return crop_resize_bicubic(print, box, print.height, print.width);
}

}  // namespace

ShoeprintImage augment(const ShoeprintImage& print, AugmentOp op, std::uint64_t seed,
                       const AugmentParams& params) {
  switch (op) {
    case AugmentOp::gaussian_noise: return apply_noise(print, params.noise_sigma, seed);
    case AugmentOp::flip_lr: return apply_flip(print);
    case AugmentOp::rotate: return apply_rotate(print, params.rotate_deg);
    case AugmentOp::crop: return apply_crop(print, params.crop_frac, seed);
  }
  throw ConfigError("unhandled augment op");
}

}  // namespace shoeprint
