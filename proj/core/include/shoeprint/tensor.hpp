#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "shoeprint/error.hpp"

namespace shoeprint {

// Dense row-major value grid. Feature maps use NHWC order: [batch, height,
// width, channels]. Matrices are [rows, cols], vectors [n].
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s);
  Tensor(std::vector<int> s, std::vector<double> d);

  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape); }

  int rank() const { return static_cast<int>(shape.size()); }
  long long size() const { return static_cast<long long>(data.size()); }

  int extent(int axis) const;

  // NHWC element access
  double& at(int n, int h, int w, int c) { return data[static_cast<size_t>(nhwc_index(n, h, w, c))]; }
  double at(int n, int h, int w, int c) const { return data[static_cast<size_t>(nhwc_index(n, h, w, c))]; }

  // rank-2 element access
  double& at(int r, int c) { return data[static_cast<size_t>(r) * shape[1] + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * shape[1] + c]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  std::string shape_string() const;

 private:
  long long nhwc_index(int n, int h, int w, int c) const {
    return ((static_cast<long long>(n) * shape[1] + h) * shape[2] + w) * shape[3] + c;
  }
};

// Product of extents; throws ShapeError on empty shape or extents < 1.
long long tensor_volume(const std::vector<int>& shape);

std::string shape_string(const std::vector<int>& shape);

void require_rank(const Tensor& t, int rank, const char* what);

}  // namespace shoeprint
