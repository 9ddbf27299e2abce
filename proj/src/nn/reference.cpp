#include "pathgan/nn/reference.hpp"

#include <algorithm>
#include <cmath>

namespace pathgan::nn::reference {

void matmul(int m, int n, int k, const float* a, const float* b, float* c) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double sum = 0.0;
      for (int p = 0; p < k; ++p) {
        sum += static_cast<double>(a[i * k + p]) * b[p * n + j];
      }
      c[i * n + j] = static_cast<float>(sum);
    }
  }
}

namespace {
inline int out_dim(int in, int kernel, int stride, int pad) {
  return (in + 2 * pad - kernel) / stride + 1;
}
}  // namespace

void conv2d_forward(const float* x, const float* w, const float* bias,
                    float* y, int n, int in_c, int h, int wdt, int out_c,
                    int kernel, int stride, int pad) {
  const int oh = out_dim(h, kernel, stride, pad);
  const int ow = out_dim(wdt, kernel, stride, pad);
  for (int s = 0; s < n; ++s) {
    for (int oc = 0; oc < out_c; ++oc) {
      for (int r = 0; r < oh; ++r) {
        for (int c = 0; c < ow; ++c) {
          double sum = bias ? bias[oc] : 0.0;
          for (int ic = 0; ic < in_c; ++ic) {
            for (int kr = 0; kr < kernel; ++kr) {
              for (int kc = 0; kc < kernel; ++kc) {
                const int ir = r * stride - pad + kr;
                const int iw = c * stride - pad + kc;
                if (ir < 0 || ir >= h || iw < 0 || iw >= wdt) continue;
                const float xv =
                    x[((static_cast<std::int64_t>(s) * in_c + ic) * h + ir) *
                          wdt +
                      iw];
                const float wv =
                    w[((static_cast<std::int64_t>(oc) * in_c + ic) * kernel +
                       kr) *
                          kernel +
                      kc];
                sum += static_cast<double>(xv) * wv;
              }
            }
          }
          y[((static_cast<std::int64_t>(s) * out_c + oc) * oh + r) * ow + c] =
              static_cast<float>(sum);
        }
      }
    }
  }
}

void conv2d_backward_data(const float* gy, const float* w, float* gx, int n,
                          int in_c, int h, int wdt, int out_c, int kernel,
                          int stride, int pad) {
  const int oh = out_dim(h, kernel, stride, pad);
  const int ow = out_dim(wdt, kernel, stride, pad);
  std::fill(gx, gx + static_cast<std::int64_t>(n) * in_c * h * wdt, 0.0f);
  for (int s = 0; s < n; ++s) {
    for (int oc = 0; oc < out_c; ++oc) {
      for (int r = 0; r < oh; ++r) {
        for (int c = 0; c < ow; ++c) {
          const float g =
              gy[((static_cast<std::int64_t>(s) * out_c + oc) * oh + r) * ow +
                 c];
          for (int ic = 0; ic < in_c; ++ic) {
            for (int kr = 0; kr < kernel; ++kr) {
              for (int kc = 0; kc < kernel; ++kc) {
                const int ir = r * stride - pad + kr;
                const int iw = c * stride - pad + kc;
                if (ir < 0 || ir >= h || iw < 0 || iw >= wdt) continue;
                gx[((static_cast<std::int64_t>(s) * in_c + ic) * h + ir) *
                       wdt +
                   iw] +=
                    g * w[((static_cast<std::int64_t>(oc) * in_c + ic) *
                               kernel +
                           kr) *
                              kernel +
                          kc];
              }
            }
          }
        }
      }
    }
  }
}

void conv2d_backward_weight(const float* x, const float* gy, float* gw,
                            float* gbias, int n, int in_c, int h, int wdt,
                            int out_c, int kernel, int stride, int pad) {
  const int oh = out_dim(h, kernel, stride, pad);
  const int ow = out_dim(wdt, kernel, stride, pad);
  for (int oc = 0; oc < out_c; ++oc) {
    for (int ic = 0; ic < in_c; ++ic) {
      for (int kr = 0; kr < kernel; ++kr) {
        for (int kc = 0; kc < kernel; ++kc) {
          double sum = 0.0;
          for (int s = 0; s < n; ++s) {
            for (int r = 0; r < oh; ++r) {
              for (int c = 0; c < ow; ++c) {
                const int ir = r * stride - pad + kr;
                const int iw = c * stride - pad + kc;
                if (ir < 0 || ir >= h || iw < 0 || iw >= wdt) continue;
                sum += static_cast<double>(
                           x[((static_cast<std::int64_t>(s) * in_c + ic) * h +
                              ir) *
                                 wdt +
                             iw]) *
                       gy[((static_cast<std::int64_t>(s) * out_c + oc) * oh +
                           r) *
                              ow +
                          c];
              }
            }
          }
          gw[((static_cast<std::int64_t>(oc) * in_c + ic) * kernel + kr) *
                 kernel +
             kc] += static_cast<float>(sum);
        }
      }
    }
  }
  if (gbias) {
    for (int oc = 0; oc < out_c; ++oc) {
      double sum = 0.0;
      for (int s = 0; s < n; ++s) {
        for (int r = 0; r < oh; ++r) {
          for (int c = 0; c < ow; ++c) {
            sum += gy[((static_cast<std::int64_t>(s) * out_c + oc) * oh + r) *
                          ow +
                      c];
          }
        }
      }
      gbias[oc] += static_cast<float>(sum);
    }
  }
}

void leaky_relu_forward(const float* x, float* y, std::int64_t n,
                        float slope) {
  for (std::int64_t i = 0; i < n; ++i) {
    y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
  }
}

void instance_norm_forward(const float* x, const float* gamma,
                           const float* beta, float* y, int n, int c,
                           std::int64_t plane, float eps) {
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
      for (std::int64_t p = 0; p < plane; ++p) {
        y[base + p] =
            static_cast<float>(gamma[j] * (x[base + p] - mu) * is + beta[j]);
      }
    }
  }
}

void adam_step(float* param, const float* grad, float* m, float* v,
               std::int64_t n, float lr, float beta1, float beta2, float eps,
               double beta1_pow, double beta2_pow) {
  const double mc = 1.0 / (1.0 - beta1_pow);
  const double vc = 1.0 / (1.0 - beta2_pow);
  for (std::int64_t i = 0; i < n; ++i) {
    const double g = grad[i];
    const double mi = beta1 * m[i] + (1.0 - beta1) * g;
    const double vi = beta2 * v[i] + (1.0 - beta2) * g * g;
    m[i] = static_cast<float>(mi);
    v[i] = static_cast<float>(vi);
    param[i] -=
        static_cast<float>(lr * (mi * mc) / (std::sqrt(vi * vc) + eps));
  }
}

void softmax_channels(const float* logits, float* probs, int n, int c,
                      std::int64_t plane) {
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

}  // namespace pathgan::nn::reference
