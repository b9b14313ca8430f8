#include "shoeprint/tensor.hpp"

#include <sstream>

namespace shoeprint {

long long tensor_volume(const std::vector<int>& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must have at least one extent");
  long long volume = 1;
  for (int extent : shape) {
    if (extent < 1) throw ShapeError("tensor extents must be >= 1, got " + shape_string(shape));
    volume *= extent;
  }
  return volume;
}

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)) {
  data.assign(static_cast<size_t>(tensor_volume(shape)), 0.0);
}

Tensor::Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
  if (tensor_volume(shape) != static_cast<long long>(data.size())) {
    throw ShapeError("tensor data size " + std::to_string(data.size()) +
                     " does not match shape " + shoeprint::shape_string(shape));
  }
}

int Tensor::extent(int axis) const {
  if (axis < 0 || axis >= rank()) throw ShapeError("axis out of range");
  return shape[static_cast<size_t>(axis)];
}

std::string Tensor::shape_string() const { return shoeprint::shape_string(shape); }

std::string shape_string(const std::vector<int>& shape) {
  std::ostringstream out;
  out << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

void require_rank(const Tensor& t, int rank, const char* what) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) +
                     " tensor, got " + t.shape_string());
  }
}

}  // namespace shoeprint
