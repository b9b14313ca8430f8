#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "doctest.h"
#include "shoeprint/error.hpp"
#include "shoeprint/layers.hpp"
#include "shoeprint/rng.hpp"
#include "shoeprint/tensor.hpp"

using namespace shoeprint;

namespace {

Tensor random_tensor(std::vector<int> shape, std::uint64_t seed, double lo = -1.0,
                     double hi = 1.0) {
  Tensor t(std::move(shape));
  Rng rng(seed);
  for (auto& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

// Reference cross-correlation written as the plain quadruple loop.
Tensor naive_conv2d(const Tensor& input, const Tensor& kernels, const ConvSpec& spec) {
  const int n = input.shape[0], h = input.shape[1], w = input.shape[2], c_in = input.shape[3];
  const int fs = spec.filter_size, c_out = spec.filter_count;
  int pad_top = 0, pad_left = 0, out_h, out_w;
  if (spec.padding == Padding::same) {
    out_h = (h + spec.stride - 1) / spec.stride;
    out_w = (w + spec.stride - 1) / spec.stride;
    pad_top = std::max(0, (out_h - 1) * spec.stride + fs - h) / 2;
    pad_left = std::max(0, (out_w - 1) * spec.stride + fs - w) / 2;
  } else {
    out_h = (h - fs) / spec.stride + 1;
    out_w = (w - fs) / spec.stride + 1;
  }
  Tensor out({n, out_h, out_w, c_out});
  for (int b = 0; b < n; ++b)
    for (int oy = 0; oy < out_h; ++oy)
      for (int ox = 0; ox < out_w; ++ox)
        for (int co = 0; co < c_out; ++co) {
          double sum = 0.0;
          for (int fy = 0; fy < fs; ++fy)
            for (int fx = 0; fx < fs; ++fx)
              for (int ci = 0; ci < c_in; ++ci) {
                const int iy = oy * spec.stride + fy - pad_top;
                const int ix = ox * spec.stride + fx - pad_left;
                if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                sum += input.at(b, iy, ix, ci) *
                       kernels.data[((static_cast<size_t>(fy) * fs + fx) * c_in + ci) * c_out + co];
              }
          out.at(b, oy, ox, co) = sum;
        }
  return out;
}

double weighted_sum(const Tensor& t, std::uint64_t seed) {
  Rng rng(seed);
  double total = 0.0;
  for (double v : t.data) total += v * rng.uniform(-1.0, 1.0);
  return total;
}

Tensor weight_tensor(const std::vector<int>& shape, std::uint64_t seed) {
  Tensor t(shape);
  Rng rng(seed);
  for (auto& v : t.data) v = rng.uniform(-1.0, 1.0);
  return t;
}

// Central-difference gradient of loss(values) for every coordinate.
std::vector<double> numeric_gradient(std::vector<double>& values,
                                     const std::function<double()>& loss, double h = 1e-6) {
  std::vector<double> grad(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double up = loss();
    values[i] = saved - h;
    const double down = loss();
    values[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

void check_close(const std::vector<double>& analytic, const std::vector<double>& numeric,
                 double tol = 1e-4) {
  REQUIRE(analytic.size() == numeric.size());
  for (size_t i = 0; i < analytic.size(); ++i) {
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-8});
    CHECK(std::abs(analytic[i] - numeric[i]) / scale < tol);
  }
}

}  // namespace

TEST_CASE("matrix products match hand-worked results") {
  // [1 2; 3 4] * [5 6; 7 8]
  const std::vector<double> a = {1, 2, 3, 4}, b = {5, 6, 7, 8};
  std::vector<double> c(4);
  matmul(a.data(), b.data(), c.data(), 2, 2, 2);
  CHECK(c == std::vector<double>{19, 22, 43, 50});

  // a^T stored as [k x m]: same product via the transposed layout
  const std::vector<double> at = {1, 3, 2, 4};
  matmul_at(at.data(), b.data(), c.data(), 2, 2, 2);
  CHECK(c == std::vector<double>{19, 22, 43, 50});

  // b^T stored as [n x k]
  const std::vector<double> bt = {5, 7, 6, 8};
  matmul_bt(a.data(), bt.data(), c.data(), 2, 2, 2);
  CHECK(c == std::vector<double>{19, 22, 43, 50});
}

TEST_CASE("rectangular matrix product matches the naive triple loop") {
  const int m = 3, k = 5, n = 4;
  const auto a = random_tensor({m, k}, 81), b = random_tensor({k, n}, 82);
  std::vector<double> fast(static_cast<size_t>(m) * n);
  matmul(a.data.data(), b.data.data(), fast.data(), m, k, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double sum = 0.0;
      for (int t = 0; t < k; ++t) sum += a.at(i, t) * b.at(t, j);
      CHECK(fast[static_cast<size_t>(i) * n + j] == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("convolution matches a hand-worked diagonal kernel") {
  Tensor input({1, 3, 3, 1}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  Tensor kernel({2, 2, 1, 1}, {1, 0, 0, 1});
  ConvSpec spec;
  spec.filter_count = 1;
  spec.filter_size = 2;
  const Tensor out = conv2d(input, kernel, spec);
  CHECK(out.shape == std::vector<int>{1, 2, 2, 1});
  CHECK(out.data == std::vector<double>{6, 8, 12, 14});
}

TEST_CASE("convolution agrees with the naive reference over strides and padding") {
  for (const auto& [fs, stride, padding] :
       std::vector<std::tuple<int, int, Padding>>{{3, 1, Padding::same},
                                                  {3, 2, Padding::same},
                                                  {2, 2, Padding::valid},
                                                  {1, 1, Padding::valid},
                                                  {5, 1, Padding::same}}) {
    ConvSpec spec;
    spec.filter_count = 3;
    spec.filter_size = fs;
    spec.stride = stride;
    spec.padding = padding;
    const auto input = random_tensor({2, 7, 6, 4}, 17);
    const auto kernels = random_tensor({fs, fs, 4, 3}, 18);
    const Tensor fast = conv2d(input, kernels, spec);
    const Tensor slow = naive_conv2d(input, kernels, spec);
    REQUIRE(fast.shape == slow.shape);
    for (size_t i = 0; i < fast.data.size(); ++i) {
      CHECK(fast.data[i] == doctest::Approx(slow.data[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("convolution is linear in its input") {
  ConvSpec spec;
  spec.filter_count = 2;
  spec.filter_size = 3;
  spec.padding = Padding::same;
  const auto kernels = random_tensor({3, 3, 2, 2}, 31);
  const auto x = random_tensor({1, 5, 5, 2}, 32);
  const auto y = random_tensor({1, 5, 5, 2}, 33);
  Tensor mix(x.shape);
  for (size_t i = 0; i < mix.data.size(); ++i) mix.data[i] = 2.0 * x.data[i] - 0.5 * y.data[i];
  const Tensor out_mix = conv2d(mix, kernels, spec);
  const Tensor out_x = conv2d(x, kernels, spec);
  const Tensor out_y = conv2d(y, kernels, spec);
  for (size_t i = 0; i < out_mix.data.size(); ++i) {
    CHECK(out_mix.data[i] ==
          doctest::Approx(2.0 * out_x.data[i] - 0.5 * out_y.data[i]).epsilon(1e-9));
  }
}

TEST_CASE("convolution rejects malformed requests") {
  const auto input = random_tensor({1, 4, 4, 2}, 3);
  ConvSpec spec;
  spec.filter_count = 1;
  spec.filter_size = 2;
  spec.padding = Padding::same;
  CHECK_THROWS_AS(conv2d(input, random_tensor({2, 2, 2, 1}, 4), spec), ConfigError);
  spec.padding = Padding::valid;
  spec.filter_size = 5;
  CHECK_THROWS_AS(conv2d(input, random_tensor({5, 5, 2, 1}, 4), spec), ShapeError);
  spec.filter_size = 2;
  CHECK_THROWS_AS(conv2d(input, random_tensor({2, 2, 3, 1}, 4), spec), ShapeError);
  spec.stride = 0;
  CHECK_THROWS_AS(conv2d(input, random_tensor({2, 2, 2, 1}, 4), spec), ConfigError);
}

TEST_CASE("convolution backward matches finite differences") {
  ConvSpec spec;
  spec.filter_count = 2;
  spec.filter_size = 3;
  spec.stride = 2;
  spec.padding = Padding::same;
  auto input = random_tensor({2, 5, 4, 3}, 41);
  auto kernels = random_tensor({3, 3, 3, 2}, 42);

  const auto loss = [&]() { return weighted_sum(conv2d(input, kernels, spec), 99); };
  const Tensor out = conv2d(input, kernels, spec);
  Tensor grad_out = weight_tensor(out.shape, 99);
  Tensor grad_input, grad_kernels;
  conv2d_backward(input, kernels, spec, grad_out, &grad_input, &grad_kernels);

  check_close(grad_input.data, numeric_gradient(input.data, loss));
  check_close(grad_kernels.data, numeric_gradient(kernels.data, loss));
}

TEST_CASE("batchnorm standardizes a two-point batch to plus and minus one") {
  Tensor input({2, 1, 1, 1}, {0.0, 2.0});
  Tensor gamma({1}, {1.0});
  Tensor beta({1}, {0.0});
  BnStats stats(1);
  const Tensor out = batchnorm(input, gamma, beta, stats, 0.9, 1e-12, Mode::train);
  CHECK(out.data[0] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(out.data[1] == doctest::Approx(1.0).epsilon(1e-6));
  // batch moments folded into the running averages
  CHECK(stats.mean[0] == doctest::Approx(0.9 * 0.0 + 0.1 * 1.0).epsilon(1e-12));
  CHECK(stats.var[0] == doctest::Approx(0.9 * 1.0 + 0.1 * 1.0).epsilon(1e-12));
}

TEST_CASE("batchnorm maps a constant batch to beta") {
  Tensor input({3, 2, 2, 1});
  for (auto& v : input.data) v = 5.0;
  Tensor gamma({1}, {2.0});
  Tensor beta({1}, {0.75});
  BnStats stats(1);
  const Tensor out = batchnorm(input, gamma, beta, stats, 0.9, 1e-8, Mode::train);
  for (double v : out.data) CHECK(v == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("train-mode batchnorm output has zero mean and unit variance per channel") {
  const int n = 4, h = 3, w = 3, c = 2;
  auto input = random_tensor({n, h, w, c}, 55, -4.0, 6.0);
  Tensor gamma({c}, {1.0, 1.0});
  Tensor beta({c}, {0.0, 0.0});
  BnStats stats(c);
  const Tensor out = batchnorm(input, gamma, beta, stats, 0.9, 1e-10, Mode::train);
  for (int ch = 0; ch < c; ++ch) {
    double sum = 0.0, sum_sq = 0.0;
    int count = 0;
    for (int b = 0; b < n; ++b)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double v = out.at(b, y, x, ch);
          sum += v;
          sum_sq += v * v;
          ++count;
        }
    const double mean = sum / count;
    const double var = sum_sq / count - mean * mean;
    CHECK(std::abs(mean) < 1e-6);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("infer-mode batchnorm uses the running statistics") {
  Tensor input({1, 1, 1, 1}, {3.0});
  Tensor gamma({1}, {2.0});
  Tensor beta({1}, {1.0});
  BnStats stats(1);
  stats.mean[0] = 1.0;
  stats.var[0] = 4.0;
  const Tensor out = batchnorm(input, gamma, beta, stats, 0.9, 0.0, Mode::infer);
  // (3 - 1) / 2 * 2 + 1
  CHECK(out.data[0] == doctest::Approx(3.0).epsilon(1e-12));
  // infer mode must not touch the running stats
  CHECK(stats.mean[0] == 1.0);
  CHECK(stats.var[0] == 4.0);
}

TEST_CASE("batchnorm rejects undersized train batches and mismatched shapes") {
  Tensor single({1, 1, 1, 1}, {3.0});
  Tensor gamma({1}, {1.0});
  Tensor beta({1}, {0.0});
  BnStats stats(1);
  CHECK_THROWS_AS(batchnorm(single, gamma, beta, stats, 0.9, 1e-5, Mode::train), ConfigError);
  Tensor two_ch({2, 1, 1, 2}, {1.0, 2.0, 3.0, 4.0});
  CHECK_THROWS_AS(batchnorm(two_ch, gamma, beta, stats, 0.9, 1e-5, Mode::train), ShapeError);
}

TEST_CASE("batchnorm backward matches finite differences through the batch moments") {
  const int c = 2;
  auto input = random_tensor({3, 2, 2, c}, 60, -2.0, 2.0);
  Tensor gamma({c}, {1.3, 0.7});
  Tensor beta({c}, {0.2, -0.4});

  const auto loss = [&]() {
    BnStats stats(c);
    return weighted_sum(batchnorm(input, gamma, beta, stats, 0.9, 1e-8, Mode::train), 77);
  };

  BnStats stats(c);
  BnCache cache;
  const Tensor out = batchnorm(input, gamma, beta, stats, 0.9, 1e-8, Mode::train, &cache);
  const Tensor grad_out = weight_tensor(out.shape, 77);
  Tensor grad_input, grad_gamma, grad_beta;
  batchnorm_backward(grad_out, cache, gamma, &grad_input, &grad_gamma, &grad_beta);

  check_close(grad_input.data, numeric_gradient(input.data, loss));
  check_close(grad_gamma.data, numeric_gradient(gamma.data, loss));
  check_close(grad_beta.data, numeric_gradient(beta.data, loss));
}

TEST_CASE("relu clamps negatives and gates the gradient by its input") {
  Tensor input({1, 1, 1, 4}, {-2.0, 0.0, 0.5, 3.0});
  const Tensor out = relu(input);
  CHECK(out.data == std::vector<double>{0.0, 0.0, 0.5, 3.0});
  Tensor grad_out({1, 1, 1, 4}, {1.0, 1.0, 1.0, 1.0});
  const Tensor grad_in = relu_backward(input, grad_out);
  CHECK(grad_in.data[0] == 0.0);
  CHECK(grad_in.data[1] == 0.0);
  CHECK(grad_in.data[2] == 1.0);
  CHECK(grad_in.data[3] == 1.0);
}

TEST_CASE("maxpool keeps window maxima and floors the output size") {
  Tensor input({1, 3, 3, 1}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const Tensor out = maxpool2d(input, 2, 2);
  CHECK(out.shape == std::vector<int>{1, 1, 1, 1});
  CHECK(out.data[0] == 5.0);

  const Tensor overlapping = maxpool2d(input, 2, 1);
  CHECK(overlapping.shape == std::vector<int>{1, 2, 2, 1});
  CHECK(overlapping.data == std::vector<double>{5, 6, 8, 9});
}

TEST_CASE("maxpool ties resolve to the first element in row-major order") {
  Tensor input({1, 2, 2, 1}, {7.0, 7.0, 7.0, 7.0});
  std::vector<long long> argmax;
  const Tensor out = maxpool2d(input, 2, 2, &argmax);
  CHECK(out.data[0] == 7.0);
  REQUIRE(argmax.size() == 1);
  CHECK(argmax[0] == 0);

  Tensor grad_out({1, 1, 1, 1}, {1.0});
  const Tensor grad_in = maxpool2d_backward(input.shape, argmax, grad_out);
  CHECK(grad_in.data == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("maxpool backward routes gradient to each window maximum") {
  auto input = random_tensor({2, 4, 4, 3}, 70);
  std::vector<long long> argmax;
  const Tensor out = maxpool2d(input, 2, 2, &argmax);
  const Tensor grad_out = weight_tensor(out.shape, 71);
  const Tensor grad_in = maxpool2d_backward(input.shape, argmax, grad_out);
  const auto loss = [&]() { return weighted_sum(maxpool2d(input, 2, 2), 71); };
  check_close(grad_in.data, numeric_gradient(input.data, loss));
}

TEST_CASE("channel concat and split are inverse bit-exact operations") {
  const auto a = random_tensor({2, 3, 3, 2}, 80);
  const auto b = random_tensor({2, 3, 3, 5}, 81);
  const auto c = random_tensor({2, 3, 3, 1}, 82);
  const Tensor joined = concat_channels({&a, &b, &c});
  CHECK(joined.shape == std::vector<int>{2, 3, 3, 8});
  const auto parts = split_channels(joined, {2, 5, 1});
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].data == a.data);
  CHECK(parts[1].data == b.data);
  CHECK(parts[2].data == c.data);

  CHECK_THROWS_AS(concat_channels({}), ShapeError);
  const auto wrong = random_tensor({2, 4, 3, 2}, 83);
  CHECK_THROWS_AS(concat_channels({&a, &wrong}), ShapeError);
  CHECK_THROWS_AS(split_channels(joined, {2, 5}), ShapeError);
}

TEST_CASE("dense layer matches a hand-worked affine map") {
  Tensor input({1, 2}, {1.0, 2.0});
  Tensor weights({2, 2}, {1.0, 2.0, 3.0, 4.0});
  Tensor bias({2}, {10.0, 20.0});
  const Tensor out = dense(input, weights, bias);
  // [1*1 + 2*3 + 10, 1*2 + 2*4 + 20]
  CHECK(out.data == std::vector<double>{17.0, 30.0});
}

TEST_CASE("dense layer flattens feature maps and checks shapes") {
  const auto image = random_tensor({2, 2, 2, 3}, 90);
  const auto weights = random_tensor({12, 4}, 91);
  const auto bias = random_tensor({4}, 92);
  const Tensor out = dense(image, weights, bias);
  CHECK(out.shape == std::vector<int>{2, 4});

  const auto bad_weights = random_tensor({11, 4}, 93);
  CHECK_THROWS_AS(dense(image, bad_weights, bias), ShapeError);
  const auto bad_bias = random_tensor({5}, 94);
  CHECK_THROWS_AS(dense(image, weights, bad_bias), ShapeError);
}

TEST_CASE("dense backward matches finite differences") {
  auto input = random_tensor({3, 5}, 100);
  auto weights = random_tensor({5, 4}, 101);
  auto bias = random_tensor({4}, 102);
  const auto loss = [&]() { return weighted_sum(dense(input, weights, bias), 103); };
  const Tensor out = dense(input, weights, bias);
  const Tensor grad_out = weight_tensor(out.shape, 103);
  Tensor grad_input, grad_weights, grad_bias;
  dense_backward(input, weights, grad_out, &grad_input, &grad_weights, &grad_bias);
  check_close(grad_input.data, numeric_gradient(input.data, loss));
  check_close(grad_weights.data, numeric_gradient(weights.data, loss));
  check_close(grad_bias.data, numeric_gradient(bias.data, loss));
}

TEST_CASE("dropout is identity in infer mode and a scaled mask in train mode") {
  const auto input = random_tensor({1, 8, 8, 4}, 110, 0.5, 1.5);
  const Tensor same = dropout(input, 0.4, Mode::infer, 5);
  CHECK(same.data == input.data);
  const Tensor zero_rate = dropout(input, 0.0, Mode::train, 5);
  CHECK(zero_rate.data == input.data);

  const double rate = 0.4;
  const Tensor dropped = dropout(input, rate, Mode::train, 5);
  const Tensor again = dropout(input, rate, Mode::train, 5);
  CHECK(dropped.data == again.data);

  int zeros = 0;
  for (size_t i = 0; i < dropped.data.size(); ++i) {
    if (dropped.data[i] == 0.0) {
      ++zeros;
    } else {
      CHECK(dropped.data[i] == doctest::Approx(input.data[i] / (1.0 - rate)).epsilon(1e-12));
    }
  }
  const double n = static_cast<double>(dropped.data.size());
  const double sigma = std::sqrt(rate * (1.0 - rate) * n);
  CHECK(std::abs(zeros - rate * n) <= 4.0 * sigma);

  CHECK_THROWS_AS(dropout(input, 1.0, Mode::train, 5), ConfigError);
  CHECK_THROWS_AS(dropout(input, -0.1, Mode::train, 5), ConfigError);
}

TEST_CASE("dropout backward recomputes the identical mask") {
  const auto input = random_tensor({1, 6, 6, 3}, 120, 0.5, 1.5);
  const double rate = 0.3;
  const std::uint64_t seed = 9;
  const Tensor out = dropout(input, rate, Mode::train, seed);
  Tensor grad_out(out.shape);
  for (auto& v : grad_out.data) v = 1.0;
  const Tensor grad_in = dropout_backward(grad_out, rate, Mode::train, seed);
  for (size_t i = 0; i < out.data.size(); ++i) {
    if (out.data[i] == 0.0) {
      CHECK(grad_in.data[i] == 0.0);
    } else {
      CHECK(grad_in.data[i] == doctest::Approx(1.0 / (1.0 - rate)).epsilon(1e-12));
    }
  }
}

TEST_CASE("global average pooling averages each channel plane") {
  Tensor input({1, 2, 2, 2}, {1, 10, 2, 20, 3, 30, 4, 40});
  const Tensor out = global_avg_pool(input);
  CHECK(out.shape == std::vector<int>{1, 2});
  CHECK(out.data[0] == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(out.data[1] == doctest::Approx(25.0).epsilon(1e-12));

  auto varied = random_tensor({2, 3, 4, 3}, 130);
  const auto loss = [&]() { return weighted_sum(global_avg_pool(varied), 131); };
  const Tensor pooled = global_avg_pool(varied);
  const Tensor grad_out = weight_tensor(pooled.shape, 131);
  const Tensor grad_in = global_avg_pool_backward(varied.shape, grad_out);
  check_close(grad_in.data, numeric_gradient(varied.data, loss));
}

TEST_CASE("sigmoid squashes into (0,1) and its backward uses the output") {
  Tensor input({1, 3}, {0.0, 2.0, -2.0});
  const Tensor out = sigmoid(input);
  CHECK(out.data[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.data[1] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-12));
  CHECK(out.data[2] == doctest::Approx(1.0 / (1.0 + std::exp(2.0))).epsilon(1e-12));

  auto varied = random_tensor({2, 5}, 140, -3.0, 3.0);
  const auto loss = [&]() { return weighted_sum(sigmoid(varied), 141); };
  const Tensor s = sigmoid(varied);
  const Tensor grad_out = weight_tensor(s.shape, 141);
  const Tensor grad_in = sigmoid_backward(s, grad_out);
  check_close(grad_in.data, numeric_gradient(varied.data, loss));
}

TEST_CASE("channel scaling multiplies each channel by its gate") {
  Tensor features({1, 1, 2, 2}, {1.0, 2.0, 3.0, 4.0});
  Tensor gates({1, 2}, {0.5, 2.0});
  const Tensor out = channel_scale(features, gates);
  CHECK(out.data == std::vector<double>{0.5, 4.0, 1.5, 8.0});

  auto f = random_tensor({2, 3, 3, 4}, 150);
  auto g = random_tensor({2, 4}, 151, 0.1, 0.9);
  const auto loss = [&]() { return weighted_sum(channel_scale(f, g), 152); };
  const Tensor scaled = channel_scale(f, g);
  const Tensor grad_out = weight_tensor(scaled.shape, 152);
  Tensor grad_f, grad_g;
  channel_scale_backward(f, g, grad_out, &grad_f, &grad_g);
  check_close(grad_f.data, numeric_gradient(f.data, loss));
  check_close(grad_g.data, numeric_gradient(g.data, loss));
}

TEST_CASE("row softmax produces normalized rows and exact two-class odds") {
  Tensor logits({2, 2}, {0.0, 0.0, 1.0, 0.0});
  const Tensor out = softmax_rows(logits);
  CHECK(out.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.at(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  const double e = std::exp(1.0);
  CHECK(out.at(1, 0) == doctest::Approx(e / (e + 1.0)).epsilon(1e-12));
  for (int r = 0; r < 2; ++r) CHECK(out.at(r, 0) + out.at(r, 1) == doctest::Approx(1.0).epsilon(1e-12));

  // large logits must not overflow
  Tensor big({1, 2}, {1000.0, 999.0});
  const Tensor stable = softmax_rows(big);
  CHECK(std::isfinite(stable.at(0, 0)));
  CHECK(stable.at(0, 0) > stable.at(0, 1));
}

TEST_CASE("row softmax backward matches finite differences") {
  auto logits = random_tensor({3, 4}, 160, -2.0, 2.0);
  const auto loss = [&]() { return weighted_sum(softmax_rows(logits), 161); };
  const Tensor out = softmax_rows(logits);
  const Tensor grad_out = weight_tensor(out.shape, 161);
  const Tensor grad_in = softmax_rows_backward(out, grad_out);
  check_close(grad_in.data, numeric_gradient(logits.data, loss));
}

TEST_CASE("additive noise is seed-deterministic with the requested spread") {
  const auto input = random_tensor({1, 16, 16, 4}, 170);
  const Tensor quiet = add_gaussian_noise(input, 0.0, 3);
  CHECK(quiet.data == input.data);

  const Tensor a = add_gaussian_noise(input, 0.5, 3);
  const Tensor b = add_gaussian_noise(input, 0.5, 3);
  const Tensor c = add_gaussian_noise(input, 0.5, 4);
  CHECK(a.data == b.data);
  CHECK(a.data != c.data);

  double sum = 0.0, sum_sq = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - input.data[i];
    sum += d;
    sum_sq += d * d;
  }
  const double n = static_cast<double>(a.data.size());
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 * 0.5 / std::sqrt(n));
  CHECK(var == doctest::Approx(0.25).epsilon(0.15));

  CHECK_THROWS_AS(add_gaussian_noise(input, -1.0, 3), ConfigError);
}
