#include "pathgan/nn/kernels.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

extern "C" void openblas_set_num_threads(int);

namespace pathgan::nn::kernels {

namespace {

// Sample-level loops above the GEMMs carry the thread-level parallelism;
// letting OpenBLAS spawn its own pool underneath would oversubscribe and
// make results depend on its partitioning.
std::once_flag blas_once;
void init_blas() {
  std::call_once(blas_once, [] { openblas_set_num_threads(1); });
}

}  // namespace

void sgemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha,
           const float* a, int lda, const float* b, int ldb, float beta,
           float* c, int ldc) {
  init_blas();
  cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b,
              ldb, beta, c, ldc);
}

void im2col(const float* src, int channels, int height, int width, int kernel,
            int stride, int pad, float* cols, int out_h, int out_w) {
  const std::int64_t out_plane = static_cast<std::int64_t>(out_h) * out_w;
#pragma omp parallel for collapse(2)
  for (int c = 0; c < channels; ++c) {
    for (int kr = 0; kr < kernel; ++kr) {
      for (int kc = 0; kc < kernel; ++kc) {
        const std::int64_t row =
            (static_cast<std::int64_t>(c) * kernel + kr) * kernel + kc;
        float* dst = cols + row * out_plane;
        const float* plane =
            src + static_cast<std::int64_t>(c) * height * width;
        for (int oh = 0; oh < out_h; ++oh) {
          const int ih = oh * stride - pad + kr;
          for (int ow = 0; ow < out_w; ++ow) {
            const int iw = ow * stride - pad + kc;
            const bool inside =
                ih >= 0 && ih < height && iw >= 0 && iw < width;
            dst[static_cast<std::int64_t>(oh) * out_w + ow] =
                inside ? plane[static_cast<std::int64_t>(ih) * width + iw]
                       : 0.0f;
          }
        }
      }
    }
  }
}

void col2im(const float* cols, int channels, int height, int width, int kernel,
            int stride, int pad, float* dst, int out_h, int out_w) {
  const std::int64_t out_plane = static_cast<std::int64_t>(out_h) * out_w;
  // Parallel over destination channels: every written element belongs to
  // exactly one channel, and the accumulation order inside a channel is the
  // fixed (kr, kc, oh, ow) sweep.
#pragma omp parallel for
  for (int c = 0; c < channels; ++c) {
    float* plane = dst + static_cast<std::int64_t>(c) * height * width;
    for (int kr = 0; kr < kernel; ++kr) {
      for (int kc = 0; kc < kernel; ++kc) {
        const std::int64_t row =
            (static_cast<std::int64_t>(c) * kernel + kr) * kernel + kc;
        const float* src_row = cols + row * out_plane;
        for (int oh = 0; oh < out_h; ++oh) {
          const int ih = oh * stride - pad + kr;
          if (ih < 0 || ih >= height) continue;
          for (int ow = 0; ow < out_w; ++ow) {
            const int iw = ow * stride - pad + kc;
            if (iw < 0 || iw >= width) continue;
            plane[static_cast<std::int64_t>(ih) * width + iw] +=
                src_row[static_cast<std::int64_t>(oh) * out_w + ow];
          }
        }
      }
    }
  }
}

void add_bias(float* x, const float* bias, int n, int c, std::int64_t plane) {
#pragma omp parallel for collapse(2)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < c; ++j) {
      float* dst = x + (static_cast<std::int64_t>(i) * c + j) * plane;
      const float b = bias[j];
      for (std::int64_t p = 0; p < plane; ++p) dst[p] += b;
    }
  }
}

void bias_grad(const float* gy, float* gbias, int n, int c,
               std::int64_t plane) {
#pragma omp parallel for
  for (int j = 0; j < c; ++j) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const float* src = gy + (static_cast<std::int64_t>(i) * c + j) * plane;
      for (std::int64_t p = 0; p < plane; ++p) sum += src[p];
    }
    gbias[j] += static_cast<float>(sum);
  }
}

void leaky_relu_forward(const float* x, float* y, std::int64_t n,
                        float slope) {
#pragma omp parallel for
  for (std::int64_t i = 0; i < n; ++i) {
    y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
  }
}

void leaky_relu_backward(const float* x_pre, const float* gy, float* gx,
                         std::int64_t n, float slope) {
#pragma omp parallel for
  for (std::int64_t i = 0; i < n; ++i) {
    gx[i] = x_pre[i] > 0.0f ? gy[i] : slope * gy[i];
  }
}

void instance_norm_forward(const float* x, const float* gamma,
                           const float* beta, float* y, float* mean,
                           float* istd, int n, int c, std::int64_t plane,
                           float eps) {
#pragma omp parallel for collapse(2)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < c; ++j) {
      const std::int64_t base = (static_cast<std::int64_t>(i) * c + j) * plane;
      double sum = 0.0;
      for (std::int64_t p = 0; p < plane; ++p) sum += x[base + p];
      const double mu = sum / static_cast<double>(plane);
      double var = 0.0;
      for (std::int64_t p = 0; p < plane; ++p) {
        const double d = x[base + p] - mu;
        var += d * d;
      }
      var /= static_cast<double>(plane);
      const double is = 1.0 / std::sqrt(var + eps);
      mean[static_cast<std::int64_t>(i) * c + j] = static_cast<float>(mu);
      istd[static_cast<std::int64_t>(i) * c + j] = static_cast<float>(is);
      const float g = gamma[j], b = beta[j];
      for (std::int64_t p = 0; p < plane; ++p) {
        y[base + p] = static_cast<float>(
            g * (x[base + p] - mu) * is + b);
      }
    }
  }
}

void instance_norm_backward(const float* x, const float* gamma,
                            const float* mean, const float* istd,
                            const float* gy, float* gx, float* ggamma,
                            float* gbeta, int n, int c, std::int64_t plane) {
  // Per-(sample, channel) partial sums, reduced afterwards in fixed sample
  // order so the parameter gradients do not depend on the thread count.
  std::vector<double> sums_gy(static_cast<std::size_t>(n) * c);
  std::vector<double> sums_gy_xhat(static_cast<std::size_t>(n) * c);
#pragma omp parallel for collapse(2)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < c; ++j) {
      const std::int64_t nc = static_cast<std::int64_t>(i) * c + j;
      const std::int64_t base = nc * plane;
      const double mu = mean[nc];
      const double is = istd[nc];
      double sum_gy = 0.0, sum_gy_xhat = 0.0;
      for (std::int64_t p = 0; p < plane; ++p) {
        const double xhat = (x[base + p] - mu) * is;
        sum_gy += gy[base + p];
        sum_gy_xhat += gy[base + p] * xhat;
      }
      const double inv_plane = 1.0 / static_cast<double>(plane);
      const double g = gamma[j];
      for (std::int64_t p = 0; p < plane; ++p) {
        const double xhat = (x[base + p] - mu) * is;
        gx[base + p] = static_cast<float>(
            g * is *
            (gy[base + p] - sum_gy * inv_plane - xhat * sum_gy_xhat *
                                                     inv_plane));
      }
      sums_gy[nc] = sum_gy;
      sums_gy_xhat[nc] = sum_gy_xhat;
    }
  }
#pragma omp parallel for
  for (int j = 0; j < c; ++j) {
    double gg = 0.0, gb = 0.0;
    for (int i = 0; i < n; ++i) {
      gg += sums_gy_xhat[static_cast<std::int64_t>(i) * c + j];
      gb += sums_gy[static_cast<std::int64_t>(i) * c + j];
    }
    ggamma[j] += static_cast<float>(gg);
    gbeta[j] += static_cast<float>(gb);
  }
}

void softmax_channels(const float* logits, float* probs, int n, int c,
                      std::int64_t plane) {
#pragma omp parallel for
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n) * plane; ++i) {
    const std::int64_t sample = i / plane;
    const std::int64_t pix = i % plane;
    const float* src = logits + sample * c * plane + pix;
    float* dst = probs + sample * c * plane + pix;
    float max_v = src[0];
    for (int j = 1; j < c; ++j) max_v = std::max(max_v, src[j * plane]);
    double denom = 0.0;
    for (int j = 0; j < c; ++j) {
      denom += std::exp(static_cast<double>(src[j * plane]) - max_v);
    }
    for (int j = 0; j < c; ++j) {
      dst[j * plane] = static_cast<float>(
          std::exp(static_cast<double>(src[j * plane]) - max_v) / denom);
    }
  }
}

void adam_step(float* param, const float* grad, float* m, float* v,
               std::int64_t n, float lr, float beta1, float beta2, float eps,
               double beta1_pow, double beta2_pow) {
  const double mc = 1.0 / (1.0 - beta1_pow);
  const double vc = 1.0 / (1.0 - beta2_pow);
#pragma omp parallel for
  for (std::int64_t i = 0; i < n; ++i) {
    const double g = grad[i];
    const double mi = beta1 * m[i] + (1.0 - beta1) * g;
    const double vi = beta2 * v[i] + (1.0 - beta2) * g * g;
    m[i] = static_cast<float>(mi);
    v[i] = static_cast<float>(vi);
    param[i] -= static_cast<float>(lr * (mi * mc) /
                                   (std::sqrt(vi * vc) + eps));
  }
}

void scale(float* x, std::int64_t n, float alpha) {
#pragma omp parallel for
  for (std::int64_t i = 0; i < n; ++i) x[i] *= alpha;
}

void axpy(std::int64_t n, float alpha, const float* x, float* y) {
#pragma omp parallel for
  for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace pathgan::nn::kernels
