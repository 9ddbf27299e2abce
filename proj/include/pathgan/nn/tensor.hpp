#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace pathgan::nn {

// Dense float32 NCHW tensor. Vectors and per-sample scalars use C=H=W=1
// style shapes; nothing here is a view, copies are explicit.
struct Tensor {
  std::array<int, 4> shape{0, 0, 0, 0};  // N, C, H, W
  std::vector<float> data;

  Tensor() = default;
  Tensor(int n, int c, int h, int w)
      : shape{n, c, h, w},
        data(static_cast<std::size_t>(n) * c * h * w, 0.0f) {}

  static Tensor zeros_like(const Tensor& o) {
    return Tensor(o.shape[0], o.shape[1], o.shape[2], o.shape[3]);
  }

  int n() const { return shape[0]; }
  int c() const { return shape[1]; }
  int h() const { return shape[2]; }
  int w() const { return shape[3]; }

  std::int64_t size() const {
    return static_cast<std::int64_t>(shape[0]) * shape[1] * shape[2] *
           shape[3];
  }
  std::int64_t sample_size() const {
    return static_cast<std::int64_t>(shape[1]) * shape[2] * shape[3];
  }

  std::size_t idx(int n_, int c_, int h_, int w_) const {
    return ((static_cast<std::size_t>(n_) * shape[1] + c_) * shape[2] + h_) *
               shape[3] +
           w_;
  }
  float& at(int n_, int c_, int h_, int w_) { return data[idx(n_, c_, h_, w_)]; }
  float at(int n_, int c_, int h_, int w_) const {
    return data[idx(n_, c_, h_, w_)];
  }

  float* ptr() { return data.data(); }
  const float* ptr() const { return data.data(); }
  float* sample_ptr(int n_) { return data.data() + n_ * sample_size(); }
  const float* sample_ptr(int n_) const {
    return data.data() + n_ * sample_size();
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  void fill(float v) { std::fill(data.begin(), data.end(), v); }

  bool operator==(const Tensor&) const = default;
};

}  // namespace pathgan::nn
