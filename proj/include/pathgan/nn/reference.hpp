#pragma once

#include <cstdint>

// Plain serial implementations kept as the comparison baseline for the
// parallel kernels and the im2col+GEMM convolution path. Used by tests and
// the kernel benchmark only.
namespace pathgan::nn::reference {

void matmul(int m, int n, int k, const float* a, const float* b, float* c);

// Direct convolution, NCHW, square kernel.
void conv2d_forward(const float* x, const float* w, const float* bias,
                    float* y, int n, int in_c, int h, int wdt, int out_c,
                    int kernel, int stride, int pad);
void conv2d_backward_data(const float* gy, const float* w, float* gx, int n,
                          int in_c, int h, int wdt, int out_c, int kernel,
                          int stride, int pad);
void conv2d_backward_weight(const float* x, const float* gy, float* gw,
                            float* gbias, int n, int in_c, int h, int wdt,
                            int out_c, int kernel, int stride, int pad);

void leaky_relu_forward(const float* x, float* y, std::int64_t n, float slope);

void instance_norm_forward(const float* x, const float* gamma,
                           const float* beta, float* y, int n, int c,
                           std::int64_t plane, float eps);

void adam_step(float* param, const float* grad, float* m, float* v,
               std::int64_t n, float lr, float beta1, float beta2, float eps,
               double beta1_pow, double beta2_pow);

void softmax_channels(const float* logits, float* probs, int n, int c,
                      std::int64_t plane);

}  // namespace pathgan::nn::reference
