#include "shoeprint/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "shoeprint/error.hpp"

namespace shoeprint {

Mask threshold_mask(const ShoeprintImage& image, int threshold) {
  Mask mask(image.height, image.width);
  const size_t n = image.pixels.size();
  for (size_t i = 0; i < n; ++i) {
    mask.fg[i] = image.pixels[i] > threshold ? 1 : 0;
  }
  return mask;
}

namespace {

// Clockwise Moore neighborhood, starting west.
constexpr int kDirRow[8] = {0, -1, -1, -1, 0, 1, 1, 1};
constexpr int kDirCol[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

bool fg_at(const Mask& mask, int row, int col) {
  if (row < 0 || row >= mask.height || col < 0 || col >= mask.width) return false;
  return mask.at(row, col);
}

// Moore boundary tracing from the component's top-left-most pixel. The walk
// is a deterministic orbit over (pixel, backtrack) states, so it has closed
// exactly when a state repeats; thin structures are walked around both sides.
Contour trace_boundary(const Mask& mask, int start_row, int start_col) {
  Contour contour;
  contour.points.push_back({start_row, start_col});

  // The west neighbor is background: the start pixel is the first of its
  // component in row-major order.
  int cur_row = start_row;
  int cur_col = start_col;
  int backtrack = 0;  // neighbor index of the pixel we came from

  std::vector<std::uint8_t> seen_states(mask.fg.size(), 0);
  seen_states[static_cast<size_t>(cur_row) * mask.width + cur_col] = 1;

  const size_t guard = 8 * mask.fg.size() + 8;
  for (size_t iter = 0; iter < guard; ++iter) {
    int found = -1;
    for (int step = 1; step <= 8; ++step) {
      const int dir = (backtrack + step) % 8;
      if (fg_at(mask, cur_row + kDirRow[dir], cur_col + kDirCol[dir])) {
        found = dir;
        break;
      }
    }
    if (found < 0) return contour;  // isolated pixel

    cur_row += kDirRow[found];
    cur_col += kDirCol[found];
    backtrack = (found + 4) % 8;
    const size_t idx = static_cast<size_t>(cur_row) * mask.width + cur_col;
    const std::uint8_t bit = static_cast<std::uint8_t>(1u << backtrack);
    if (seen_states[idx] & bit) {
      if (contour.points.size() > 1 && contour.points.back() == contour.points.front()) {
        contour.points.pop_back();
      }
      return contour;
    }
    seen_states[idx] |= bit;
    contour.points.push_back({cur_row, cur_col});
  }
  throw VerificationError("boundary trace failed to close");
}

}  // namespace

std::vector<Contour> find_contours(const Mask& mask) {
  std::vector<Contour> contours;
  std::vector<std::uint8_t> seen(mask.fg.size(), 0);
  std::vector<PixelPoint> stack;

  for (int row = 0; row < mask.height; ++row) {
    for (int col = 0; col < mask.width; ++col) {
      const size_t idx = static_cast<size_t>(row) * mask.width + col;
      if (!mask.fg[idx] || seen[idx]) continue;

      // Row-major discovery makes this the component's top-left-most pixel.
      contours.push_back(trace_boundary(mask, row, col));

      stack.clear();
      stack.push_back({row, col});
      seen[idx] = 1;
      while (!stack.empty()) {
        const PixelPoint p = stack.back();
        stack.pop_back();
        for (int dir = 0; dir < 8; ++dir) {
          const int nr = p.row + kDirRow[dir];
          const int nc = p.col + kDirCol[dir];
          if (!fg_at(mask, nr, nc)) continue;
          const size_t nidx = static_cast<size_t>(nr) * mask.width + nc;
          if (seen[nidx]) continue;
          seen[nidx] = 1;
          stack.push_back({nr, nc});
        }
      }
    }
  }
  return contours;
}

Box union_bounding_box(const std::vector<Contour>& contours) {
  bool any = false;
  Box box;
  for (const Contour& contour : contours) {
    for (const PixelPoint& p : contour.points) {
      if (!any) {
        box = {p.row, p.col, p.row, p.col};
        any = true;
        continue;
      }
      box.top = std::min(box.top, p.row);
      box.left = std::min(box.left, p.col);
      box.bottom = std::max(box.bottom, p.row);
      box.right = std::max(box.right, p.col);
    }
  }
  if (!any) throw VerificationError("no contours to bound: the print appears to be empty");
  return box;
}

namespace {

// Catmull-Rom kernel (bicubic with a = -0.5).
double cubic_weight(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return a * (((x - 5.0) * x + 8.0) * x - 4.0);
  return 0.0;
}

}  // namespace

ShoeprintImage crop_resize_bicubic(const ShoeprintImage& image, const Box& box, int target_h,
                                   int target_w) {
  if (box.top < 0 || box.left < 0 || box.bottom >= image.height || box.right >= image.width) {
    throw ConfigError("crop box [" + std::to_string(box.top) + "," + std::to_string(box.left) +
                      "," + std::to_string(box.bottom) + "," + std::to_string(box.right) +
                      "] falls outside a " + std::to_string(image.height) + "x" +
                      std::to_string(image.width) + " image");
  }
  if (box.bottom < box.top || box.right < box.left) {
    throw ConfigError("degenerate crop box: bottom/right must not precede top/left");
  }
  if (target_h < 4 || target_w < 4) {
    throw ConfigError("resize target must be at least 4x4, got " + std::to_string(target_h) +
                      "x" + std::to_string(target_w));
  }

  const int crop_h = box.height();
  const int crop_w = box.width();
  const double scale_r = static_cast<double>(crop_h) / target_h;
  const double scale_c = static_cast<double>(crop_w) / target_w;

  auto sample = [&](int row, int col) -> double {
    row = std::clamp(row, 0, crop_h - 1) + box.top;
    col = std::clamp(col, 0, crop_w - 1) + box.left;
    return static_cast<double>(image.pixels[static_cast<size_t>(row) * image.width + col]);
  };

  ShoeprintImage out(target_h, target_w, image.side);
  out.dpi = image.dpi;
  for (int tr = 0; tr < target_h; ++tr) {
    const double src_r = (tr + 0.5) * scale_r - 0.5;
    const int base_r = static_cast<int>(std::floor(src_r));
    const double fr = src_r - base_r;
    double wr[4];
    for (int i = 0; i < 4; ++i) wr[i] = cubic_weight(fr - (i - 1));

    for (int tc = 0; tc < target_w; ++tc) {
      const double src_c = (tc + 0.5) * scale_c - 0.5;
      const int base_c = static_cast<int>(std::floor(src_c));
      const double fc = src_c - base_c;
      double wc[4];
      for (int i = 0; i < 4; ++i) wc[i] = cubic_weight(fc - (i - 1));

      double acc = 0.0;
      for (int i = 0; i < 4; ++i) {
        double row_acc = 0.0;
        for (int j = 0; j < 4; ++j) {
          row_acc += wc[j] * sample(base_r + i - 1, base_c + j - 1);
        }
        acc += wr[i] * row_acc;
      }
      const long long value = std::llround(acc);
      out.pixels[static_cast<size_t>(tr) * target_w + tc] =
          static_cast<std::uint8_t>(std::clamp(value, 0LL, 255LL));
    }
  }
  return out;
}

}  // namespace shoeprint
