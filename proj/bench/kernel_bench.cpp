// Compares the production kernels (OpenMP + BLAS-backed convolution)
// against the plain serial reference implementations across the layer
// shapes the networks actually use.

#include <omp.h>

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "pathgan/nn/conv.hpp"
#include "pathgan/nn/kernels.hpp"
#include "pathgan/nn/layers.hpp"
#include "pathgan/nn/reference.hpp"
#include "pathgan/rng.hpp"

using namespace pathgan;
using namespace pathgan::nn;

namespace {

Tensor random_tensor(Rng& rng, int n, int c, int h, int w) {
  Tensor t(n, c, h, w);
  for (float& v : t.data) v = static_cast<float>(rng.next_normal(0, 1));
  return t;
}

double time_it(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  const double t0 = omp_get_wtime();
  for (int i = 0; i < reps; ++i) fn();
  return (omp_get_wtime() - t0) / reps;
}

void report(const std::string& name, double serial, double parallel) {
  std::printf("%-34s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx\n",
              name.c_str(), serial * 1e3, parallel * 1e3, serial / parallel);
}

void bench_conv(int batch, int in_c, int out_c, int size, int reps) {
  Rng rng(1);
  Conv2d conv(in_c, out_c, 4, 2, 1, "bench");
  conv.init_weights(rng);
  const Tensor x = random_tensor(rng, batch, in_c, size, size);
  const int oh = conv.out_dim(size);
  Tensor ref(batch, out_c, oh, oh);

  const double serial = time_it(
      [&] {
        reference::conv2d_forward(x.ptr(), conv.weight.value.ptr(),
                                  conv.bias.value.ptr(), ref.ptr(), batch,
                                  in_c, size, size, out_c, 4, 2, 1);
      },
      reps);
  const double parallel = time_it([&] { (void)conv.forward(x); }, reps);
  char name[128];
  std::snprintf(name, sizeof(name), "conv %dx%d %d->%d (batch %d)", size,
                size, in_c, out_c, batch);
  report(name, serial, parallel);
}

void bench_instnorm(int batch, int channels, int size, int reps) {
  Rng rng(2);
  InstanceNorm norm(channels, "bench");
  const Tensor x = random_tensor(rng, batch, channels, size, size);
  Tensor y = Tensor::zeros_like(x);
  Tensor mean(batch, channels, 1, 1), istd(batch, channels, 1, 1);

  const double serial = time_it(
      [&] {
        reference::instance_norm_forward(
            x.ptr(), norm.gamma.value.ptr(), norm.beta.value.ptr(), y.ptr(),
            batch, channels, static_cast<std::int64_t>(size) * size,
            norm.eps);
      },
      reps);
  const double parallel = time_it(
      [&] {
        kernels::instance_norm_forward(
            x.ptr(), norm.gamma.value.ptr(), norm.beta.value.ptr(), y.ptr(),
            mean.ptr(), istd.ptr(), batch, channels,
            static_cast<std::int64_t>(size) * size, norm.eps);
      },
      reps);
  char name[128];
  std::snprintf(name, sizeof(name), "instance norm %dch %dx%d (batch %d)",
                channels, size, size, batch);
  report(name, serial, parallel);
}

void bench_leaky_relu(std::int64_t n, int reps) {
  Rng rng(3);
  Tensor x(1, 1, 1, static_cast<int>(n));
  for (float& v : x.data) v = static_cast<float>(rng.next_normal(0, 1));
  Tensor y = Tensor::zeros_like(x);

  const double serial = time_it(
      [&] { reference::leaky_relu_forward(x.ptr(), y.ptr(), n, 0.2f); },
      reps);
  const double parallel = time_it(
      [&] { kernels::leaky_relu_forward(x.ptr(), y.ptr(), n, 0.2f); }, reps);
  char name[128];
  std::snprintf(name, sizeof(name), "leaky relu %lld elements",
                static_cast<long long>(n));
  report(name, serial, parallel);
}

void bench_adam(std::int64_t n, int reps) {
  Rng rng(4);
  std::vector<float> p(n), g(n), m(n, 0), v(n, 0);
  for (auto& x : p) x = static_cast<float>(rng.next_normal(0, 1));
  for (auto& x : g) x = static_cast<float>(rng.next_normal(0, 1));

  const double serial = time_it(
      [&] {
        reference::adam_step(p.data(), g.data(), m.data(), v.data(), n,
                             2e-4f, 0.5f, 0.999f, 1e-8f, 0.5, 0.999);
      },
      reps);
  const double parallel = time_it(
      [&] {
        kernels::adam_step(p.data(), g.data(), m.data(), v.data(), n, 2e-4f,
                           0.5f, 0.999f, 1e-8f, 0.5, 0.999);
      },
      reps);
  char name[128];
  std::snprintf(name, sizeof(name), "adam step %lld params",
                static_cast<long long>(n));
  report(name, serial, parallel);
}

}  // namespace

int main() {
  std::printf("threads: %d\n\n", omp_get_max_threads());

  // Generator encoder shapes at the two raster sizes used in practice.
  bench_conv(16, 3, 64, 16, 20);
  bench_conv(16, 64, 128, 8, 20);
  bench_conv(4, 3, 64, 64, 5);
  bench_conv(4, 64, 128, 32, 5);
  bench_conv(4, 128, 256, 16, 5);
  std::printf("\n");
  bench_instnorm(16, 128, 8, 50);
  bench_instnorm(4, 256, 16, 50);
  std::printf("\n");
  bench_leaky_relu(1 << 20, 50);
  bench_adam(1 << 20, 50);
  return 0;
}
