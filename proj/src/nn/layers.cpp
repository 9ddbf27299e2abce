#include "pathgan/nn/layers.hpp"

#include <cstring>
#include <stdexcept>

#include "pathgan/nn/kernels.hpp"

namespace pathgan::nn {

InstanceNorm::InstanceNorm(int channels_, const std::string& name)
    : channels(channels_) {
  gamma.value = Tensor(channels, 1, 1, 1);
  gamma.grad = Tensor(channels, 1, 1, 1);
  gamma.name = name + ".gamma";
  beta.value = Tensor(channels, 1, 1, 1);
  beta.grad = Tensor(channels, 1, 1, 1);
  beta.name = name + ".beta";
  gamma.value.fill(1.0f);
}

void InstanceNorm::init_weights(Rng& rng, double stddev) {
  for (float& v : gamma.value.data) {
    v = static_cast<float>(rng.next_normal(1.0, stddev));
  }
  beta.value.fill(0.0f);
}

Tensor InstanceNorm::forward(const Tensor& x, NormStats& stats) const {
  if (x.c() != channels) {
    throw std::invalid_argument("instance norm: channel mismatch");
  }
  Tensor y = Tensor::zeros_like(x);
  stats.mean = Tensor(x.n(), channels, 1, 1);
  stats.istd = Tensor(x.n(), channels, 1, 1);
  kernels::instance_norm_forward(x.ptr(), gamma.value.ptr(), beta.value.ptr(),
                                 y.ptr(), stats.mean.ptr(), stats.istd.ptr(),
                                 x.n(), channels,
                                 static_cast<std::int64_t>(x.h()) * x.w(),
                                 eps);
  return y;
}

Tensor InstanceNorm::backward(const Tensor& x, const NormStats& stats,
                              const Tensor& gy) {
  Tensor gx = Tensor::zeros_like(x);
  kernels::instance_norm_backward(
      x.ptr(), gamma.value.ptr(), stats.mean.ptr(), stats.istd.ptr(),
      gy.ptr(), gx.ptr(), gamma.grad.ptr(), beta.grad.ptr(), x.n(), channels,
      static_cast<std::int64_t>(x.h()) * x.w());
  return gx;
}

Tensor leaky_relu(const Tensor& x, float slope) {
  Tensor y = Tensor::zeros_like(x);
  kernels::leaky_relu_forward(x.ptr(), y.ptr(), x.size(), slope);
  return y;
}

Tensor leaky_relu_grad(const Tensor& x_pre, const Tensor& gy, float slope) {
  Tensor gx = Tensor::zeros_like(gy);
  kernels::leaky_relu_backward(x_pre.ptr(), gy.ptr(), gx.ptr(), gy.size(),
                               slope);
  return gx;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.n() != b.n() || a.h() != b.h() || a.w() != b.w()) {
    throw std::invalid_argument("concat: shape mismatch");
  }
  Tensor out(a.n(), a.c() + b.c(), a.h(), a.w());
  const std::int64_t plane = static_cast<std::int64_t>(a.h()) * a.w();
  for (int s = 0; s < a.n(); ++s) {
    std::memcpy(out.sample_ptr(s), a.sample_ptr(s),
                sizeof(float) * a.c() * plane);
    std::memcpy(out.sample_ptr(s) + a.c() * plane, b.sample_ptr(s),
                sizeof(float) * b.c() * plane);
  }
  return out;
}

void split_channels(const Tensor& joined, int first_channels, Tensor& ga,
                    Tensor& gb) {
  const int rest = joined.c() - first_channels;
  ga = Tensor(joined.n(), first_channels, joined.h(), joined.w());
  gb = Tensor(joined.n(), rest, joined.h(), joined.w());
  const std::int64_t plane =
      static_cast<std::int64_t>(joined.h()) * joined.w();
  for (int s = 0; s < joined.n(); ++s) {
    std::memcpy(ga.sample_ptr(s), joined.sample_ptr(s),
                sizeof(float) * first_channels * plane);
    std::memcpy(gb.sample_ptr(s), joined.sample_ptr(s) + first_channels * plane,
                sizeof(float) * rest * plane);
  }
}

}  // namespace pathgan::nn
