#pragma once

#include <cstdint>
#include <string>

#include "shoeprint/image.hpp"

namespace shoeprint {

enum class AugmentOp { gaussian_noise, flip_lr, rotate, crop };

std::string to_string(AugmentOp op);
AugmentOp augment_op_from_string(const std::string& name);

struct AugmentParams {
  double noise_sigma = 5.0;   // pixel-value noise std
  double rotate_deg = 0.0;    // must stay within +/-15 degrees
  double crop_frac = 0.9;     // kept side fraction, within [0.85, 1.0]
};

// Applies one augmentation. Noise values and the crop offset are drawn from
// the seed, so a (print, op, params, seed) tuple always yields the same
// output. flip_lr swaps the recorded side of single prints.
ShoeprintImage augment(const ShoeprintImage& print, AugmentOp op, std::uint64_t seed,
                       const AugmentParams& params = {});

}  // namespace shoeprint
