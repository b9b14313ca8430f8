#include "shoeprint/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "shoeprint/parallel.hpp"
#include "shoeprint/rng.hpp"

namespace shoeprint {
namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Uniform in [0,1) from a (stream, counter) pair.
double unit_draw(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(hash_combine(seed, index) >> 11) * 0x1.0p-53;
}

struct ConvGeometry {
  int out_h = 0, out_w = 0;
  int pad_top = 0, pad_left = 0;
};

ConvGeometry conv_geometry(int h, int w, const ConvSpec& spec) {
  if (spec.stride < 1) throw ConfigError("conv2d: stride must be >= 1");
  if (spec.filter_size < 1) throw ConfigError("conv2d: filter size must be >= 1");
  ConvGeometry g;
  if (spec.padding == Padding::valid) {
    if (h < spec.filter_size || w < spec.filter_size) {
      throw ShapeError("conv2d: " + std::to_string(spec.filter_size) + "x" +
                       std::to_string(spec.filter_size) + " filter larger than " +
                       std::to_string(h) + "x" + std::to_string(w) + " input");
    }
    g.out_h = (h - spec.filter_size) / spec.stride + 1;
    g.out_w = (w - spec.filter_size) / spec.stride + 1;
  } else {
    if (spec.filter_size % 2 == 0) {
      throw ConfigError("conv2d: same padding requires an odd filter size");
    }
    g.out_h = (h + spec.stride - 1) / spec.stride;
    g.out_w = (w + spec.stride - 1) / spec.stride;
    const int pad_h = std::max(0, (g.out_h - 1) * spec.stride + spec.filter_size - h);
    const int pad_w = std::max(0, (g.out_w - 1) * spec.stride + spec.filter_size - w);
    g.pad_top = pad_h / 2;
    g.pad_left = pad_w / 2;
  }
  return g;
}

// Patch matrix: one row per output position, columns ordered (ky, kx, c_in)
// to match the [fs,fs,c_in,c_out] kernel layout.
void im2col(const Tensor& input, const ConvSpec& spec, const ConvGeometry& g,
            std::vector<double>& cols) {
  const int n = input.shape[0], h = input.shape[1], w = input.shape[2], cin = input.shape[3];
  const int fs = spec.filter_size;
  const long long row_len = static_cast<long long>(fs) * fs * cin;
  const long long rows_per_image = static_cast<long long>(g.out_h) * g.out_w;
  cols.assign(static_cast<size_t>(row_len * rows_per_image * n), 0.0);

  parallel_chunks(static_cast<long long>(n) * g.out_h, [&](long long begin, long long end) {
    for (long long job = begin; job < end; ++job) {
      const int b = static_cast<int>(job / g.out_h);
      const int oy = static_cast<int>(job % g.out_h);
      const int iy0 = oy * spec.stride - g.pad_top;
      for (int ox = 0; ox < g.out_w; ++ox) {
        const int ix0 = ox * spec.stride - g.pad_left;
        double* row = cols.data() + ((static_cast<long long>(b) * g.out_h + oy) * g.out_w + ox) * row_len;
        for (int ky = 0; ky < fs; ++ky) {
          const int iy = iy0 + ky;
          if (iy < 0 || iy >= h) continue;  // zero padding already in place
          for (int kx = 0; kx < fs; ++kx) {
            const int ix = ix0 + kx;
            if (ix < 0 || ix >= w) continue;
            const double* src = input.data.data() +
                                ((static_cast<long long>(b) * h + iy) * w + ix) * cin;
            std::memcpy(row + (static_cast<long long>(ky) * fs + kx) * cin, src,
                        static_cast<size_t>(cin) * sizeof(double));
          }
        }
      }
    }
  });
}

// Scatter-add of a patch-matrix gradient back onto the input grid.
void col2im(const std::vector<double>& cols, const ConvSpec& spec, const ConvGeometry& g,
            Tensor& grad_input) {
  const int n = grad_input.shape[0], h = grad_input.shape[1];
  const int w = grad_input.shape[2], cin = grad_input.shape[3];
  const int fs = spec.filter_size;
  const long long row_len = static_cast<long long>(fs) * fs * cin;

  // Scatter per batch image; window overlap makes rows within an image collide.
  parallel_chunks(n, [&](long long begin, long long end) {
    for (long long b = begin; b < end; ++b) {
      for (int oy = 0; oy < g.out_h; ++oy) {
        const int iy0 = oy * spec.stride - g.pad_top;
        for (int ox = 0; ox < g.out_w; ++ox) {
          const int ix0 = ox * spec.stride - g.pad_left;
          const double* row = cols.data() + ((b * g.out_h + oy) * g.out_w + ox) * row_len;
          for (int ky = 0; ky < fs; ++ky) {
            const int iy = iy0 + ky;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < fs; ++kx) {
              const int ix = ix0 + kx;
              if (ix < 0 || ix >= w) continue;
              double* dst = grad_input.data.data() + ((b * h + iy) * w + ix) * cin;
              const double* src = row + (static_cast<long long>(ky) * fs + kx) * cin;
              for (int c = 0; c < cin; ++c) dst[c] += src[c];
            }
          }
        }
      }
    }
  });
}

void check_conv_args(const Tensor& input, const Tensor& kernels, const ConvSpec& spec) {
  require_rank(input, 4, "conv2d input");
  require_rank(kernels, 4, "conv2d kernels");
  if (kernels.shape[0] != spec.filter_size || kernels.shape[1] != spec.filter_size) {
    throw ShapeError("conv2d: kernel tensor " + kernels.shape_string() +
                     " does not match filter size " + std::to_string(spec.filter_size));
  }
  if (kernels.shape[2] != input.shape[3]) {
    throw ShapeError("conv2d: kernel input channels " + std::to_string(kernels.shape[2]) +
                     " do not match input channels " + std::to_string(input.shape[3]));
  }
  if (kernels.shape[3] != spec.filter_count) {
    throw ShapeError("conv2d: kernel output channels " + std::to_string(kernels.shape[3]) +
                     " do not match filter count " + std::to_string(spec.filter_count));
  }
}

}  // namespace

void matmul(const double* a, const double* b, double* c, int m, int k, int n) {
  std::memset(c, 0, static_cast<size_t>(m) * n * sizeof(double));
  parallel_chunks(m, [&](long long begin, long long end) {
    for (long long i = begin; i < end; ++i) {
      const double* arow = a + i * k;
      double* crow = c + i * n;
      for (int p = 0; p < k; ++p) {
        const double av = arow[p];
        const double* brow = b + static_cast<long long>(p) * n;
        for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  });
}

void matmul_at(const double* a, const double* b, double* c, int m, int k, int n) {
  std::memset(c, 0, static_cast<size_t>(m) * n * sizeof(double));
  // c[i][j] = sum_p a[p][i] * b[p][j]
  parallel_chunks(m, [&](long long begin, long long end) {
    for (long long p = 0; p < k; ++p) {
      const double* arow = a + p * m;
      const double* brow = b + p * n;
      for (long long i = begin; i < end; ++i) {
        const double av = arow[i];
        double* crow = c + i * n;
        for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  });
}

void matmul_bt(const double* a, const double* b, double* c, int m, int k, int n) {
  parallel_chunks(m, [&](long long begin, long long end) {
    for (long long i = begin; i < end; ++i) {
      const double* arow = a + i * k;
      double* crow = c + i * n;
      for (int j = 0; j < n; ++j) {
        const double* brow = b + static_cast<long long>(j) * k;
        double acc = 0.0;
        for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
        crow[j] = acc;
      }
    }
  });
}

Tensor conv2d(const Tensor& input, const Tensor& kernels, const ConvSpec& spec) {
  check_conv_args(input, kernels, spec);
  const int n = input.shape[0];
  const ConvGeometry g = conv_geometry(input.shape[1], input.shape[2], spec);
  const long long rows = static_cast<long long>(n) * g.out_h * g.out_w;
  const int row_len = spec.filter_size * spec.filter_size * input.shape[3];

  std::vector<double> cols;
  im2col(input, spec, g, cols);

  Tensor out({n, g.out_h, g.out_w, spec.filter_count});
  matmul(cols.data(), kernels.data.data(), out.data.data(),
         static_cast<int>(rows), row_len, spec.filter_count);
  return out;
}

void conv2d_backward(const Tensor& input, const Tensor& kernels, const ConvSpec& spec,
                     const Tensor& grad_out, Tensor* grad_input, Tensor* grad_kernels) {
  check_conv_args(input, kernels, spec);
  const int n = input.shape[0];
  const ConvGeometry g = conv_geometry(input.shape[1], input.shape[2], spec);
  if (grad_out.shape != std::vector<int>{n, g.out_h, g.out_w, spec.filter_count}) {
    throw ShapeError("conv2d_backward: upstream gradient " + grad_out.shape_string() +
                     " does not match output shape");
  }
  const long long rows = static_cast<long long>(n) * g.out_h * g.out_w;
  const int row_len = spec.filter_size * spec.filter_size * input.shape[3];

  std::vector<double> cols;
  im2col(input, spec, g, cols);

  if (grad_kernels) {
    *grad_kernels = Tensor::zeros_like(kernels);
    matmul_at(cols.data(), grad_out.data.data(), grad_kernels->data.data(),
              row_len, static_cast<int>(rows), spec.filter_count);
  }
  if (grad_input) {
    std::vector<double> grad_cols(cols.size());
    matmul_bt(grad_out.data.data(), kernels.data.data(), grad_cols.data(),
              static_cast<int>(rows), spec.filter_count, row_len);
    *grad_input = Tensor::zeros_like(input);
    col2im(grad_cols, spec, g, *grad_input);
  }
}

Tensor batchnorm(const Tensor& input, const Tensor& gamma, const Tensor& beta, BnStats& stats,
                 double momentum, double eps, Mode mode, BnCache* cache) {
  require_rank(input, 4, "batchnorm input");
  const int channels = input.shape[3];
  if (gamma.size() != channels || beta.size() != channels) {
    throw ShapeError("batchnorm: gamma/beta length does not match " +
                     std::to_string(channels) + " channels");
  }
  if (static_cast<int>(stats.mean.size()) != channels) {
    throw ShapeError("batchnorm: running stats sized for " +
                     std::to_string(stats.mean.size()) + " channels, input has " +
                     std::to_string(channels));
  }
  if (mode == Mode::train && input.shape[0] < 2) {
    throw ConfigError("batchnorm: train mode needs a batch of at least 2");
  }

  const long long per_channel = input.size() / channels;
  Tensor out(input.shape);

  std::vector<double> mean(channels, 0.0), var(channels, 0.0);
  if (mode == Mode::train) {
    for (long long i = 0; i < input.size(); ++i) mean[i % channels] += input.data[i];
    for (int c = 0; c < channels; ++c) mean[c] /= static_cast<double>(per_channel);
    for (long long i = 0; i < input.size(); ++i) {
      const double d = input.data[i] - mean[i % channels];
      var[i % channels] += d * d;
    }
    for (int c = 0; c < channels; ++c) var[c] /= static_cast<double>(per_channel);
    for (int c = 0; c < channels; ++c) {
      stats.mean[c] = momentum * stats.mean[c] + (1.0 - momentum) * mean[c];
      stats.var[c] = momentum * stats.var[c] + (1.0 - momentum) * var[c];
    }
  } else {
    mean = stats.mean;
    var = stats.var;
  }

  std::vector<double> inv_std(channels);
  for (int c = 0; c < channels; ++c) inv_std[c] = 1.0 / std::sqrt(var[c] + eps);

  if (cache) {
    cache->inv_std = inv_std;
    cache->x_hat = Tensor(input.shape);
  }
  for (long long i = 0; i < input.size(); ++i) {
    const int c = static_cast<int>(i % channels);
    const double x_hat = (input.data[i] - mean[c]) * inv_std[c];
    if (cache) cache->x_hat.data[i] = x_hat;
    out.data[i] = gamma.data[c] * x_hat + beta.data[c];
  }
  return out;
}

void batchnorm_backward(const Tensor& grad_out, const BnCache& cache, const Tensor& gamma,
                        Tensor* grad_input, Tensor* grad_gamma, Tensor* grad_beta) {
  const int channels = grad_out.shape[3];
  const long long per_channel = grad_out.size() / channels;
  const double inv_m = 1.0 / static_cast<double>(per_channel);

  std::vector<double> sum_dy(channels, 0.0), sum_dy_xhat(channels, 0.0);
  for (long long i = 0; i < grad_out.size(); ++i) {
    const int c = static_cast<int>(i % channels);
    sum_dy[c] += grad_out.data[i];
    sum_dy_xhat[c] += grad_out.data[i] * cache.x_hat.data[i];
  }

  if (grad_gamma) {
    *grad_gamma = Tensor({channels}, sum_dy_xhat);
  }
  if (grad_beta) {
    *grad_beta = Tensor({channels}, sum_dy);
  }
  if (grad_input) {
    *grad_input = Tensor(grad_out.shape);
    for (long long i = 0; i < grad_out.size(); ++i) {
      const int c = static_cast<int>(i % channels);
      grad_input->data[i] = gamma.data[c] * cache.inv_std[c] *
                            (grad_out.data[i] - inv_m * sum_dy[c] -
                             cache.x_hat.data[i] * inv_m * sum_dy_xhat[c]);
    }
  }
}

Tensor relu(const Tensor& input) {
  Tensor out(input.shape);
  for (long long i = 0; i < input.size(); ++i) out.data[i] = input.data[i] > 0.0 ? input.data[i] : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_out) {
  Tensor grad_in(input.shape);
  for (long long i = 0; i < input.size(); ++i) {
    grad_in.data[i] = input.data[i] > 0.0 ? grad_out.data[i] : 0.0;
  }
  return grad_in;
}

Tensor maxpool2d(const Tensor& input, int window, int stride, std::vector<long long>* argmax) {
  require_rank(input, 4, "maxpool2d input");
  if (window < 1 || stride < 1) throw ConfigError("maxpool2d: window and stride must be >= 1");
  const int n = input.shape[0], h = input.shape[1], w = input.shape[2], c = input.shape[3];
  if (h < window || w < window) {
    throw ShapeError("maxpool2d: " + std::to_string(window) + "x" + std::to_string(window) +
                     " window larger than " + std::to_string(h) + "x" + std::to_string(w) +
                     " input");
  }
  const int out_h = (h - window) / stride + 1;
  const int out_w = (w - window) / stride + 1;
  Tensor out({n, out_h, out_w, c});
  if (argmax) argmax->assign(static_cast<size_t>(out.size()), -1);

  for (int b = 0; b < n; ++b) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        for (int ch = 0; ch < c; ++ch) {
          double best = -1e308;
          long long best_idx = -1;
          for (int ky = 0; ky < window; ++ky) {
            for (int kx = 0; kx < window; ++kx) {
              const long long idx =
                  ((static_cast<long long>(b) * h + oy * stride + ky) * w + ox * stride + kx) * c + ch;
              if (input.data[static_cast<size_t>(idx)] > best) {
                best = input.data[static_cast<size_t>(idx)];
                best_idx = idx;
              }
            }
          }
          const long long out_idx = ((static_cast<long long>(b) * out_h + oy) * out_w + ox) * c + ch;
          out.data[static_cast<size_t>(out_idx)] = best;
          if (argmax) (*argmax)[static_cast<size_t>(out_idx)] = best_idx;
        }
      }
    }
  }
  return out;
}

Tensor maxpool2d_backward(const std::vector<int>& input_shape,
                          const std::vector<long long>& argmax, const Tensor& grad_out) {
  Tensor grad_in(input_shape);
  if (argmax.size() != static_cast<size_t>(grad_out.size())) {
    throw ShapeError("maxpool2d_backward: argmax record does not match gradient size");
  }
  for (size_t i = 0; i < argmax.size(); ++i) {
    grad_in.data[static_cast<size_t>(argmax[i])] += grad_out.data[i];
  }
  return grad_in;
}

Tensor concat_channels(const std::vector<const Tensor*>& inputs) {
  if (inputs.empty()) throw ShapeError("concat_channels: no inputs");
  for (const Tensor* t : inputs) require_rank(*t, 4, "concat_channels input");
  const int n = inputs[0]->shape[0], h = inputs[0]->shape[1], w = inputs[0]->shape[2];
  int channels = 0;
  for (const Tensor* t : inputs) {
    if (t->shape[0] != n || t->shape[1] != h || t->shape[2] != w) {
      throw ShapeError("concat_channels: input " + t->shape_string() +
                       " does not match batch/spatial extents " + inputs[0]->shape_string());
    }
    channels += t->shape[3];
  }
  Tensor out({n, h, w, channels});
  const long long positions = static_cast<long long>(n) * h * w;
  for (long long p = 0; p < positions; ++p) {
    double* dst = out.data.data() + p * channels;
    for (const Tensor* t : inputs) {
      const int tc = t->shape[3];
      std::memcpy(dst, t->data.data() + p * tc, static_cast<size_t>(tc) * sizeof(double));
      dst += tc;
    }
  }
  return out;
}

std::vector<Tensor> split_channels(const Tensor& input, const std::vector<int>& channel_counts) {
  require_rank(input, 4, "split_channels input");
  int total = 0;
  for (int c : channel_counts) total += c;
  if (total != input.shape[3]) {
    throw ShapeError("split_channels: counts sum to " + std::to_string(total) +
                     ", input has " + std::to_string(input.shape[3]) + " channels");
  }
  const int n = input.shape[0], h = input.shape[1], w = input.shape[2];
  const long long positions = static_cast<long long>(n) * h * w;
  std::vector<Tensor> parts;
  parts.reserve(channel_counts.size());
  int offset = 0;
  for (int c : channel_counts) {
    Tensor part({n, h, w, c});
    for (long long p = 0; p < positions; ++p) {
      std::memcpy(part.data.data() + p * c,
                  input.data.data() + p * input.shape[3] + offset,
                  static_cast<size_t>(c) * sizeof(double));
    }
    offset += c;
    parts.push_back(std::move(part));
  }
  return parts;
}

Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  if (input.rank() < 2) throw ShapeError("dense: input must have a batch axis plus features");
  require_rank(weights, 2, "dense weights");
  require_rank(bias, 1, "dense bias");
  const int n = input.shape[0];
  const long long features = input.size() / n;
  if (features != weights.shape[0]) {
    throw ShapeError("dense: input features " + std::to_string(features) +
                     " do not match weight rows " + std::to_string(weights.shape[0]));
  }
  const int units = weights.shape[1];
  if (bias.shape[0] != units) {
    throw ShapeError("dense: bias length " + std::to_string(bias.shape[0]) +
                     " does not match " + std::to_string(units) + " units");
  }
  Tensor out({n, units});
  matmul(input.data.data(), weights.data.data(), out.data.data(),
         n, static_cast<int>(features), units);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < units; ++j) out.at(i, j) += bias.data[static_cast<size_t>(j)];
  }
  return out;
}

void dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                    Tensor* grad_input, Tensor* grad_weights, Tensor* grad_bias) {
  const int n = input.shape[0];
  const long long features = input.size() / n;
  const int units = weights.shape[1];
  if (grad_out.shape != std::vector<int>{n, units}) {
    throw ShapeError("dense_backward: upstream gradient " + grad_out.shape_string() +
                     " does not match output shape");
  }
  if (grad_weights) {
    *grad_weights = Tensor::zeros_like(weights);
    matmul_at(input.data.data(), grad_out.data.data(), grad_weights->data.data(),
              static_cast<int>(features), n, units);
  }
  if (grad_bias) {
    *grad_bias = Tensor({units});
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < units; ++j) grad_bias->data[static_cast<size_t>(j)] += grad_out.at(i, j);
    }
  }
  if (grad_input) {
    *grad_input = Tensor::zeros_like(input);
    matmul_bt(grad_out.data.data(), weights.data.data(), grad_input->data.data(),
              n, units, static_cast<int>(features));
  }
}

Tensor dropout(const Tensor& input, double rate, Mode mode, std::uint64_t seed) {
  if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout: rate must be in [0, 1)");
  if (mode == Mode::infer || rate == 0.0) return input;
  Tensor out(input.shape);
  const double scale = 1.0 / (1.0 - rate);
  for (long long i = 0; i < input.size(); ++i) {
    out.data[i] = unit_draw(seed, static_cast<std::uint64_t>(i)) >= rate
                      ? input.data[i] * scale
                      : 0.0;
  }
  return out;
}

Tensor dropout_backward(const Tensor& grad_out, double rate, Mode mode, std::uint64_t seed) {
  if (mode == Mode::infer || rate == 0.0) return grad_out;
  Tensor grad_in(grad_out.shape);
  const double scale = 1.0 / (1.0 - rate);
  for (long long i = 0; i < grad_out.size(); ++i) {
    grad_in.data[i] = unit_draw(seed, static_cast<std::uint64_t>(i)) >= rate
                          ? grad_out.data[i] * scale
                          : 0.0;
  }
  return grad_in;
}

Tensor global_avg_pool(const Tensor& input) {
  require_rank(input, 4, "global_avg_pool input");
  const int n = input.shape[0], h = input.shape[1], w = input.shape[2], c = input.shape[3];
  Tensor out({n, c});
  const double inv_area = 1.0 / (static_cast<double>(h) * w);
  for (int b = 0; b < n; ++b) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double* src = input.data.data() + ((static_cast<long long>(b) * h + y) * w + x) * c;
        double* dst = out.data.data() + static_cast<long long>(b) * c;
        for (int ch = 0; ch < c; ++ch) dst[ch] += src[ch];
      }
    }
  }
  for (double& v : out.data) v *= inv_area;
  return out;
}

Tensor global_avg_pool_backward(const std::vector<int>& input_shape, const Tensor& grad_out) {
  Tensor grad_in(input_shape);
  const int n = input_shape[0], h = input_shape[1], w = input_shape[2], c = input_shape[3];
  const double inv_area = 1.0 / (static_cast<double>(h) * w);
  for (int b = 0; b < n; ++b) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double* dst = grad_in.data.data() + ((static_cast<long long>(b) * h + y) * w + x) * c;
        const double* src = grad_out.data.data() + static_cast<long long>(b) * c;
        for (int ch = 0; ch < c; ++ch) dst[ch] = src[ch] * inv_area;
      }
    }
  }
  return grad_in;
}

Tensor sigmoid(const Tensor& input) {
  Tensor out(input.shape);
  for (long long i = 0; i < input.size(); ++i) out.data[i] = 1.0 / (1.0 + std::exp(-input.data[i]));
  return out;
}

Tensor sigmoid_backward(const Tensor& output, const Tensor& grad_out) {
  Tensor grad_in(output.shape);
  for (long long i = 0; i < output.size(); ++i) {
    grad_in.data[i] = grad_out.data[i] * output.data[i] * (1.0 - output.data[i]);
  }
  return grad_in;
}

Tensor channel_scale(const Tensor& features, const Tensor& gates) {
  require_rank(features, 4, "channel_scale features");
  require_rank(gates, 2, "channel_scale gates");
  const int n = features.shape[0], c = features.shape[3];
  if (gates.shape[0] != n || gates.shape[1] != c) {
    throw ShapeError("channel_scale: gates " + gates.shape_string() +
                     " do not match features " + features.shape_string());
  }
  Tensor out(features.shape);
  const long long spatial = static_cast<long long>(features.shape[1]) * features.shape[2];
  for (int b = 0; b < n; ++b) {
    const double* gate = gates.data.data() + static_cast<long long>(b) * c;
    for (long long p = 0; p < spatial; ++p) {
      const long long base = (static_cast<long long>(b) * spatial + p) * c;
      for (int ch = 0; ch < c; ++ch) out.data[base + ch] = features.data[base + ch] * gate[ch];
    }
  }
  return out;
}

void channel_scale_backward(const Tensor& features, const Tensor& gates, const Tensor& grad_out,
                            Tensor* grad_features, Tensor* grad_gates) {
  const int n = features.shape[0], c = features.shape[3];
  const long long spatial = static_cast<long long>(features.shape[1]) * features.shape[2];
  if (grad_features) *grad_features = Tensor::zeros_like(features);
  if (grad_gates) *grad_gates = Tensor::zeros_like(gates);
  for (int b = 0; b < n; ++b) {
    const double* gate = gates.data.data() + static_cast<long long>(b) * c;
    for (long long p = 0; p < spatial; ++p) {
      const long long base = (static_cast<long long>(b) * spatial + p) * c;
      for (int ch = 0; ch < c; ++ch) {
        if (grad_features) grad_features->data[base + ch] = grad_out.data[base + ch] * gate[ch];
        if (grad_gates) {
          grad_gates->data[static_cast<long long>(b) * c + ch] +=
              grad_out.data[base + ch] * features.data[base + ch];
        }
      }
    }
  }
}

Tensor softmax_rows(const Tensor& logits) {
  require_rank(logits, 2, "softmax input");
  const int n = logits.shape[0], k = logits.shape[1];
  Tensor out(logits.shape);
  for (int i = 0; i < n; ++i) {
    double row_max = logits.at(i, 0);
    for (int j = 1; j < k; ++j) row_max = std::max(row_max, logits.at(i, j));
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      const double e = std::exp(logits.at(i, j) - row_max);
      out.at(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < k; ++j) out.at(i, j) /= sum;
  }
  return out;
}

Tensor softmax_rows_backward(const Tensor& output, const Tensor& grad_out) {
  const int n = output.shape[0], k = output.shape[1];
  Tensor grad_in(output.shape);
  for (int i = 0; i < n; ++i) {
    double dot = 0.0;
    for (int j = 0; j < k; ++j) dot += grad_out.at(i, j) * output.at(i, j);
    for (int j = 0; j < k; ++j) {
      grad_in.at(i, j) = output.at(i, j) * (grad_out.at(i, j) - dot);
    }
  }
  return grad_in;
}

Tensor add_gaussian_noise(const Tensor& input, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw ConfigError("add_gaussian_noise: sigma must be >= 0");
  if (sigma == 0.0) return input;
  Tensor out(input.shape);
  for (long long i = 0; i < input.size(); ++i) {
    const std::uint64_t idx = static_cast<std::uint64_t>(i);
    const double u1 =
        (static_cast<double>(hash_combine(seed, 2 * idx) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(hash_combine(seed, 2 * idx + 1) >> 11) * 0x1.0p-53;
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    out.data[i] = input.data[i] + sigma * z;
  }
  return out;
}

}  // namespace shoeprint
