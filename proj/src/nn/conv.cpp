#include "pathgan/nn/conv.hpp"

#include <stdexcept>
#include <vector>

#include "pathgan/nn/kernels.hpp"

namespace pathgan::nn {

Conv2d::Conv2d(int in_channels, int out_channels, int kernel_size, int stride_,
               int pad_, const std::string& name)
    : in_c(in_channels), out_c(out_channels), kernel(kernel_size),
      stride(stride_), pad(pad_) {
  weight.value = Tensor(out_c, in_c, kernel, kernel);
  weight.grad = Tensor(out_c, in_c, kernel, kernel);
  weight.name = name + ".weight";
  bias.value = Tensor(out_c, 1, 1, 1);
  bias.grad = Tensor(out_c, 1, 1, 1);
  bias.name = name + ".bias";
}

void Conv2d::init_weights(Rng& rng, double stddev) {
  for (float& v : weight.value.data) {
    v = static_cast<float>(rng.next_normal(0.0, stddev));
  }
  bias.value.fill(0.0f);
}

Tensor Conv2d::forward(const Tensor& x, bool with_bias) const {
  if (x.c() != in_c) throw std::invalid_argument("conv: channel mismatch");
  const int oh = out_dim(x.h());
  const int ow = out_dim(x.w());
  Tensor y(x.n(), out_c, oh, ow);
  const int patch = in_c * kernel * kernel;
  const std::int64_t opl = static_cast<std::int64_t>(oh) * ow;
  std::vector<float> cols(static_cast<std::size_t>(patch) * opl);
  for (int s = 0; s < x.n(); ++s) {
    kernels::im2col(x.sample_ptr(s), in_c, x.h(), x.w(), kernel, stride, pad,
                    cols.data(), oh, ow);
    kernels::sgemm(false, false, out_c, static_cast<int>(opl), patch, 1.0f,
                   weight.value.ptr(), patch, cols.data(),
                   static_cast<int>(opl), 0.0f, y.sample_ptr(s),
                   static_cast<int>(opl));
  }
  if (with_bias) {
    kernels::add_bias(y.ptr(), bias.value.ptr(), y.n(), out_c, opl);
  }
  return y;
}

Tensor Conv2d::backward_data(const Tensor& gy, int in_h, int in_w) const {
  const int oh = gy.h();
  const int ow = gy.w();
  Tensor gx(gy.n(), in_c, in_h, in_w);
  const int patch = in_c * kernel * kernel;
  const std::int64_t opl = static_cast<std::int64_t>(oh) * ow;
  std::vector<float> cols(static_cast<std::size_t>(patch) * opl);
  for (int s = 0; s < gy.n(); ++s) {
    // cols = W^T * gy
    kernels::sgemm(true, false, patch, static_cast<int>(opl), out_c, 1.0f,
                   weight.value.ptr(), patch, gy.sample_ptr(s),
                   static_cast<int>(opl), 0.0f, cols.data(),
                   static_cast<int>(opl));
    kernels::col2im(cols.data(), in_c, in_h, in_w, kernel, stride, pad,
                    gx.sample_ptr(s), oh, ow);
  }
  return gx;
}

void Conv2d::weight_grad(const Tensor& x, const Tensor& gy, Tensor& gw,
                         Tensor* gb) const {
  const int oh = gy.h();
  const int ow = gy.w();
  const int patch = in_c * kernel * kernel;
  const std::int64_t opl = static_cast<std::int64_t>(oh) * ow;
  std::vector<float> cols(static_cast<std::size_t>(patch) * opl);
  // Serial over samples: accumulation order stays fixed.
  for (int s = 0; s < x.n(); ++s) {
    kernels::im2col(x.sample_ptr(s), in_c, x.h(), x.w(), kernel, stride, pad,
                    cols.data(), oh, ow);
    // gw += gy * cols^T
    kernels::sgemm(false, true, out_c, patch, static_cast<int>(opl), 1.0f,
                   gy.sample_ptr(s), static_cast<int>(opl), cols.data(),
                   static_cast<int>(opl), 1.0f, gw.ptr(), patch);
  }
  if (gb) {
    kernels::bias_grad(gy.ptr(), gb->ptr(), gy.n(), out_c, opl);
  }
}

ConvTranspose2d::ConvTranspose2d(int in_channels, int out_channels,
                                 int kernel_size, int stride_, int pad_,
                                 const std::string& name)
    : in_c(in_channels), out_c(out_channels), kernel(kernel_size),
      stride(stride_), pad(pad_) {
  weight.value = Tensor(in_c, out_c, kernel, kernel);
  weight.grad = Tensor(in_c, out_c, kernel, kernel);
  weight.name = name + ".weight";
  bias.value = Tensor(out_c, 1, 1, 1);
  bias.grad = Tensor(out_c, 1, 1, 1);
  bias.name = name + ".bias";
}

void ConvTranspose2d::init_weights(Rng& rng, double stddev) {
  for (float& v : weight.value.data) {
    v = static_cast<float>(rng.next_normal(0.0, stddev));
  }
  bias.value.fill(0.0f);
}

Tensor ConvTranspose2d::forward(const Tensor& x) const {
  if (x.c() != in_c) throw std::invalid_argument("convT: channel mismatch");
  const int oh = out_dim(x.h());
  const int ow = out_dim(x.w());
  Tensor y(x.n(), out_c, oh, ow);
  const int patch = out_c * kernel * kernel;
  const std::int64_t ipl = static_cast<std::int64_t>(x.h()) * x.w();
  std::vector<float> cols(static_cast<std::size_t>(patch) * ipl);
  for (int s = 0; s < x.n(); ++s) {
    // cols = W^T * x, then scatter into the upsampled output.
    kernels::sgemm(true, false, patch, static_cast<int>(ipl), in_c, 1.0f,
                   weight.value.ptr(), patch, x.sample_ptr(s),
                   static_cast<int>(ipl), 0.0f, cols.data(),
                   static_cast<int>(ipl));
    kernels::col2im(cols.data(), out_c, oh, ow, kernel, stride, pad,
                    y.sample_ptr(s), x.h(), x.w());
  }
  kernels::add_bias(y.ptr(), bias.value.ptr(), y.n(), out_c,
                    static_cast<std::int64_t>(oh) * ow);
  return y;
}

Tensor ConvTranspose2d::backward_data(const Tensor& gy) const {
  // Adjoint of forward: a plain strided convolution of gy with the same
  // weight.
  const int ih = (gy.h() + 2 * pad - kernel) / stride + 1;
  const int iw = (gy.w() + 2 * pad - kernel) / stride + 1;
  Tensor gx(gy.n(), in_c, ih, iw);
  const int patch = out_c * kernel * kernel;
  const std::int64_t ipl = static_cast<std::int64_t>(ih) * iw;
  std::vector<float> cols(static_cast<std::size_t>(patch) * ipl);
  for (int s = 0; s < gy.n(); ++s) {
    kernels::im2col(gy.sample_ptr(s), out_c, gy.h(), gy.w(), kernel, stride,
                    pad, cols.data(), ih, iw);
    kernels::sgemm(false, false, in_c, static_cast<int>(ipl), patch, 1.0f,
                   weight.value.ptr(), patch, cols.data(),
                   static_cast<int>(ipl), 0.0f, gx.sample_ptr(s),
                   static_cast<int>(ipl));
  }
  return gx;
}

void ConvTranspose2d::backward(const Tensor& x, const Tensor& gy) {
  const int patch = out_c * kernel * kernel;
  const std::int64_t ipl = static_cast<std::int64_t>(x.h()) * x.w();
  std::vector<float> cols(static_cast<std::size_t>(patch) * ipl);
  for (int s = 0; s < x.n(); ++s) {
    kernels::im2col(gy.sample_ptr(s), out_c, gy.h(), gy.w(), kernel, stride,
                    pad, cols.data(), x.h(), x.w());
    // gw += x * cols^T
    kernels::sgemm(false, true, in_c, patch, static_cast<int>(ipl), 1.0f,
                   x.sample_ptr(s), static_cast<int>(ipl), cols.data(),
                   static_cast<int>(ipl), 1.0f, weight.grad.ptr(), patch);
  }
  kernels::bias_grad(gy.ptr(), bias.grad.ptr(), gy.n(), out_c,
                     static_cast<std::int64_t>(gy.h()) * gy.w());
}

}  // namespace pathgan::nn
