#pragma once

#include <string>

#include "pathgan/nn/tensor.hpp"
#include "pathgan/rng.hpp"

namespace pathgan::nn {

struct Param {
  Tensor value;
  Tensor grad;
  std::string name;

  void zero_grad() { grad.fill(0.0f); }
};

// Strided convolution (im2col + GEMM). The three linear products are exposed
// separately because the critic's gradient-penalty pass reuses them in a
// different arrangement than plain backprop.
struct Conv2d {
  int in_c = 0, out_c = 0, kernel = 4, stride = 2, pad = 1;
  Param weight;  // (out_c, in_c, k, k)
  Param bias;    // (out_c)

  Conv2d() = default;
  Conv2d(int in_channels, int out_channels, int kernel_size, int stride_,
         int pad_, const std::string& name);

  void init_weights(Rng& rng, double stddev = 0.02);

  int out_dim(int in) const { return (in + 2 * pad - kernel) / stride + 1; }

  Tensor forward(const Tensor& x, bool with_bias = true) const;
  // gy has output dims; returns gradient w.r.t. an input of (in_h, in_w).
  Tensor backward_data(const Tensor& gy, int in_h, int in_w) const;
  // Accumulates into the given weight/bias gradients.
  void weight_grad(const Tensor& x, const Tensor& gy, Tensor& gw,
                   Tensor* gb) const;
  void backward(const Tensor& x, const Tensor& gy) {
    weight_grad(x, gy, weight.grad, &bias.grad);
  }
};

// Fractionally-strided counterpart (upsampling decoder blocks). Weight
// layout (in_c, out_c, k, k).
struct ConvTranspose2d {
  int in_c = 0, out_c = 0, kernel = 4, stride = 2, pad = 1;
  Param weight;
  Param bias;

  ConvTranspose2d() = default;
  ConvTranspose2d(int in_channels, int out_channels, int kernel_size,
                  int stride_, int pad_, const std::string& name);

  void init_weights(Rng& rng, double stddev = 0.02);

  int out_dim(int in) const { return (in - 1) * stride - 2 * pad + kernel; }

  Tensor forward(const Tensor& x) const;
  Tensor backward_data(const Tensor& gy) const;
  void backward(const Tensor& x, const Tensor& gy);
};

}  // namespace pathgan::nn
