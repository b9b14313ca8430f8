#include "shoeprint/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace shoeprint {
namespace {

// Skips whitespace and '#' comment lines between PGM header tokens.
int next_header_int(std::istream& in, const std::filesystem::path& path) {
  while (true) {
    const int c = in.peek();
    if (c == EOF) throw IoError("truncated PGM header in " + path.string());
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      continue;
    }
    break;
  }
  int value = 0;
  if (!(in >> value)) throw IoError("bad PGM header token in " + path.string());
  return value;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios_base::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

ShoeprintImage::ShoeprintImage(int h, int w, Side s, int d) : height(h), width(w), side(s), dpi(d) {
  if (h < 1 || w < 1) throw ShapeError("image extents must be >= 1");
  pixels.assign(static_cast<size_t>(h) * w, 0);
}

ShoeprintImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  std::string magic;
  in >> magic;
  if (magic != "P5") throw IoError(path.string() + " is not a binary PGM (P5) file");

  const int width = next_header_int(in, path);
  const int height = next_header_int(in, path);
  const int maxval = next_header_int(in, path);
  if (width < 1 || height < 1) throw IoError("bad PGM dimensions in " + path.string());
  if (maxval != 255) throw IoError("unsupported PGM maxval " + std::to_string(maxval) + " in " + path.string());
  in.get();  // single whitespace byte after maxval

  ShoeprintImage image(height, width);
  in.read(reinterpret_cast<char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.pixels.size())) {
    throw IoError("truncated PGM payload in " + path.string());
  }
  return image;
}

void write_pgm(const ShoeprintImage& image, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::binary);
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void write_mean_pgm(const MeanImage& image, const std::filesystem::path& path) {
  ShoeprintImage rendered(image.height, image.width);
  for (size_t i = 0; i < image.values.size(); ++i) {
    const double v = std::llround(image.values[i]);
    rendered.pixels[i] = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
  }
  write_pgm(rendered, path);
}

void write_mean_csv(const MeanImage& image, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::out);
  out.precision(6);
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width; ++c) {
      if (c) out << ',';
      out << image.at(r, c);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_signed_pgm(const SignedMap& map, const std::filesystem::path& path) {
  ShoeprintImage rendered(map.height, map.width);
  for (size_t i = 0; i < map.values.size(); ++i) {
    const int v = map.values[i] + 128;
    rendered.pixels[i] = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
  }
  write_pgm(rendered, path);
}

ShoeprintImage hconcat_pair(const ShoeprintImage& left, const ShoeprintImage& right) {
  if (left.height != right.height) {
    throw ShapeError("pair composition needs equal heights, got " + std::to_string(left.height) +
                     " and " + std::to_string(right.height));
  }
  ShoeprintImage pair(left.height, left.width + right.width, Side::pair);
  pair.dpi = left.dpi;
  for (int row = 0; row < pair.height; ++row) {
    std::uint8_t* dst = pair.pixels.data() + static_cast<size_t>(row) * pair.width;
    std::copy_n(left.pixels.data() + static_cast<size_t>(row) * left.width, left.width, dst);
    std::copy_n(right.pixels.data() + static_cast<size_t>(row) * right.width, right.width,
                dst + left.width);
  }
  return pair;
}

void write_signed_csv(const SignedMap& map, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::out);
  for (int r = 0; r < map.height; ++r) {
    for (int c = 0; c < map.width; ++c) {
      if (c) out << ',';
      out << map.at(r, c);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace shoeprint
