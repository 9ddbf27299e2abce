#pragma once

#include <cstdint>

// Data-parallel kernels behind the layer modules. Everything here is
// deterministic for a fixed input: parallel loops only split writes to
// disjoint output elements, and reductions run serially inside one
// iteration. nn::reference holds the plain serial versions the tests and
// the benchmark compare against.
namespace pathgan::nn::kernels {

// C = alpha * op(A) * op(B) + beta * C, row-major. Backed by BLAS.
void sgemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha,
           const float* a, int lda, const float* b, int ldb, float beta,
           float* c, int ldc);

// (C,H,W) image -> (C*kh*kw, out_h*out_w) patch matrix.
void im2col(const float* src, int channels, int height, int width, int kernel,
            int stride, int pad, float* cols, int out_h, int out_w);

// Scatter-add inverse of im2col.
void col2im(const float* cols, int channels, int height, int width, int kernel,
            int stride, int pad, float* dst, int out_h, int out_w);

void add_bias(float* x, const float* bias, int n, int c, std::int64_t plane);
void bias_grad(const float* gy, float* gbias, int n, int c,
               std::int64_t plane);

void leaky_relu_forward(const float* x, float* y, std::int64_t n, float slope);
// x_pre is the activation input (the mask source).
void leaky_relu_backward(const float* x_pre, const float* gy, float* gx,
                         std::int64_t n, float slope);

// Per-(sample, channel) normalization over the spatial plane.
void instance_norm_forward(const float* x, const float* gamma,
                           const float* beta, float* y, float* mean,
                           float* istd, int n, int c, std::int64_t plane,
                           float eps);
void instance_norm_backward(const float* x, const float* gamma,
                            const float* mean, const float* istd,
                            const float* gy, float* gx, float* ggamma,
                            float* gbeta, int n, int c, std::int64_t plane);

// Channel-wise softmax for NCHW.
void softmax_channels(const float* logits, float* probs, int n, int c,
                      std::int64_t plane);

void adam_step(float* param, const float* grad, float* m, float* v,
               std::int64_t n, float lr, float beta1, float beta2, float eps,
               double beta1_pow, double beta2_pow);

void scale(float* x, std::int64_t n, float alpha);
void axpy(std::int64_t n, float alpha, const float* x, float* y);

}  // namespace pathgan::nn::kernels
