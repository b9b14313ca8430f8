#pragma once

#include <cstdint>
#include <vector>

#include "shoeprint/tensor.hpp"

namespace shoeprint {

enum class Mode { train, infer };
enum class Padding { valid, same };

// c = a * b, row-major, c is [m x n], a [m x k], b [k x n]
void matmul(const double* a, const double* b, double* c, int m, int k, int n);
// c = a^T * b, a is [k x m]
void matmul_at(const double* a, const double* b, double* c, int m, int k, int n);
// c = a * b^T, b is [n x k]
void matmul_bt(const double* a, const double* b, double* c, int m, int k, int n);

struct ConvSpec {
  int filter_count = 1;
  int filter_size = 1;
  int stride = 1;
  Padding padding = Padding::valid;
};

// Cross-correlation without bias. Input [n,h,w,c_in], kernels
// [fs,fs,c_in,c_out]. Padding::same requires an odd filter size.
Tensor conv2d(const Tensor& input, const Tensor& kernels, const ConvSpec& spec);
void conv2d_backward(const Tensor& input, const Tensor& kernels, const ConvSpec& spec,
                     const Tensor& grad_out, Tensor* grad_input, Tensor* grad_kernels);

// Running statistics, one entry per channel.
struct BnStats {
  std::vector<double> mean, var;
  explicit BnStats(int channels = 0) : mean(channels, 0.0), var(channels, 1.0) {}
};

struct BnCache {
  std::vector<double> inv_std;
  Tensor x_hat;
};

// Per-channel batch normalization over (batch, height, width). Train mode
// normalizes by batch moments (biased variance) and folds them into the
// running averages: running = momentum*running + (1-momentum)*batch.
Tensor batchnorm(const Tensor& input, const Tensor& gamma, const Tensor& beta, BnStats& stats,
                 double momentum, double eps, Mode mode, BnCache* cache = nullptr);
// Train-mode backward through the batch moments.
void batchnorm_backward(const Tensor& grad_out, const BnCache& cache, const Tensor& gamma,
                        Tensor* grad_input, Tensor* grad_gamma, Tensor* grad_beta);

Tensor relu(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& grad_out);

// Non-overlapping or strided max pooling, floor output size. argmax records
// the flat input index of each window maximum (first in row-major order on
// ties) for the backward pass.
Tensor maxpool2d(const Tensor& input, int window, int stride,
                 std::vector<long long>* argmax = nullptr);
Tensor maxpool2d_backward(const std::vector<int>& input_shape,
                          const std::vector<long long>& argmax, const Tensor& grad_out);

// Channel-axis concatenation of NHWC tensors with equal batch/spatial extents.
Tensor concat_channels(const std::vector<const Tensor*>& inputs);
std::vector<Tensor> split_channels(const Tensor& input, const std::vector<int>& channel_counts);

// Fully connected: flattens all non-batch axes. weights [features, units],
// bias [units].
Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias);
void dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                    Tensor* grad_input, Tensor* grad_weights, Tensor* grad_bias);

// Inverted dropout: zeroes with probability rate, scales survivors by
// 1/(1-rate). Identity in infer mode. The mask is a pure function of
// (seed, element index), so backward recomputes it.
Tensor dropout(const Tensor& input, double rate, Mode mode, std::uint64_t seed);
Tensor dropout_backward(const Tensor& grad_out, double rate, Mode mode, std::uint64_t seed);

// [n,h,w,c] -> [n,c]
Tensor global_avg_pool(const Tensor& input);
Tensor global_avg_pool_backward(const std::vector<int>& input_shape, const Tensor& grad_out);

Tensor sigmoid(const Tensor& input);
Tensor sigmoid_backward(const Tensor& output, const Tensor& grad_out);

// out[n,h,w,c] = features[n,h,w,c] * gates[n,c]
Tensor channel_scale(const Tensor& features, const Tensor& gates);
void channel_scale_backward(const Tensor& features, const Tensor& gates, const Tensor& grad_out,
                            Tensor* grad_features, Tensor* grad_gates);

// Row-wise softmax on [n, k].
Tensor softmax_rows(const Tensor& logits);
Tensor softmax_rows_backward(const Tensor& output, const Tensor& grad_out);

// Adds N(0, sigma^2) noise elementwise; pure function of (seed, index).
Tensor add_gaussian_noise(const Tensor& input, double sigma, std::uint64_t seed);

}  // namespace shoeprint
