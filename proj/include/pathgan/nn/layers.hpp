#pragma once

#include <string>

#include "pathgan/nn/conv.hpp"
#include "pathgan/nn/tensor.hpp"

namespace pathgan::nn {

// Saved per-(sample, channel) statistics from a normalization forward;
// owned by the caller's cache so inference stays re-entrant.
struct NormStats {
  Tensor mean;
  Tensor istd;
};

struct InstanceNorm {
  int channels = 0;
  float eps = 1e-5f;
  Param gamma;
  Param beta;

  InstanceNorm() = default;
  InstanceNorm(int channels_, const std::string& name);

  void init_weights(Rng& rng, double stddev = 0.02);
  Tensor forward(const Tensor& x, NormStats& stats) const;
  // Needs the forward input x and the statistics saved by forward.
  Tensor backward(const Tensor& x, const NormStats& stats, const Tensor& gy);
};

Tensor leaky_relu(const Tensor& x, float slope);
Tensor leaky_relu_grad(const Tensor& x_pre, const Tensor& gy, float slope);

// Channel concatenation / split for skip connections.
Tensor concat_channels(const Tensor& a, const Tensor& b);
void split_channels(const Tensor& joined, int first_channels, Tensor& ga,
                    Tensor& gb);

}  // namespace pathgan::nn
