#include "pathgan/nn/critic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pathgan/nn/kernels.hpp"
#include "pathgan/nn/layers.hpp"

namespace pathgan::nn {

namespace {
constexpr float kSlope = 0.2f;
}

Critic::Critic(const DiscriminatorSpec& spec, int height, int width,
               Rng& init_rng)
    : spec_(spec), in_h_(height), in_w_(width) {
  levels_ = spec_.levels >= 0 ? spec_.levels
                              : resolve_depth(0, height, width);
  spec_.levels = levels_;
  if ((height % (1 << levels_)) != 0 || (width % (1 << levels_)) != 0) {
    throw std::invalid_argument(
        "critic: spatial dims must be divisible by 2^levels");
  }

  int ch = spec_.input_channels();
  for (int i = 0; i < levels_; ++i) {
    const int next = spec_.features_at(i + 1);
    convs_.emplace_back(ch, next, 4, 2, 1, "d.conv" + std::to_string(i));
    convs_.back().init_weights(init_rng);
    ch = next;
  }
  head_features_ = ch * (height >> levels_) * (width >> levels_);
  head_w_.value = Tensor(head_features_, 1, 1, 1);
  head_w_.grad = Tensor(head_features_, 1, 1, 1);
  head_w_.name = "d.head.weight";
  head_b_.value = Tensor(1, 1, 1, 1);
  head_b_.grad = Tensor(1, 1, 1, 1);
  head_b_.name = "d.head.bias";
  for (float& v : head_w_.value.data) {
    v = static_cast<float>(init_rng.next_normal(0.0, 0.02));
  }
}

std::vector<float> Critic::forward(const Tensor& x, CriticCache* cache) const {
  if (x.c() != spec_.input_channels()) {
    throw std::invalid_argument(
        "critic: input channel mismatch (expected " +
        std::to_string(spec_.input_channels()) + ", got " +
        std::to_string(x.c()) + ")");
  }
  if (x.h() != in_h_ || x.w() != in_w_) {
    throw std::invalid_argument("critic: spatial dimension mismatch");
  }

  CriticCache local;
  CriticCache& cc = cache ? *cache : local;
  cc.input = x;
  cc.z.assign(levels_, {});
  cc.a.assign(levels_ + 1, {});

  cc.a[0] = x;
  for (int i = 0; i < levels_; ++i) {
    cc.z[i] = convs_[i].forward(cc.a[i]);
    cc.a[i + 1] = leaky_relu(cc.z[i], kSlope);
  }

  const Tensor& top = cc.a[levels_];
  std::vector<float> scores(x.n());
  for (int s = 0; s < x.n(); ++s) {
    double sum = head_b_.value.data[0];
    const float* f = top.sample_ptr(s);
    for (int k = 0; k < head_features_; ++k) {
      sum += static_cast<double>(head_w_.value.data[k]) * f[k];
    }
    scores[s] = static_cast<float>(sum);
  }
  return scores;
}

void Critic::backward_scores(const CriticCache& cache,
                             const std::vector<float>& dscore) {
  const Tensor& top = cache.a[levels_];
  const int batch = top.n();

  Tensor v(batch, top.c(), top.h(), top.w());
  for (int s = 0; s < batch; ++s) {
    const float* f = top.sample_ptr(s);
    float* dst = v.sample_ptr(s);
    const float d = dscore[s];
    for (int k = 0; k < head_features_; ++k) {
      head_w_.grad.data[k] += d * f[k];
      dst[k] = d * head_w_.value.data[k];
    }
    head_b_.grad.data[0] += d;
  }

  for (int i = levels_ - 1; i >= 0; --i) {
    const Tensor u = leaky_relu_grad(cache.z[i], v, kSlope);
    convs_[i].backward(cache.a[i], u);
    v = convs_[i].backward_data(u, cache.a[i].h(), cache.a[i].w());
  }
}

Tensor Critic::input_gradient(const Tensor& x,
                              const std::vector<float>& seed) const {
  CriticCache cache;
  forward(x, &cache);

  const Tensor& top = cache.a[levels_];
  Tensor v(x.n(), top.c(), top.h(), top.w());
  for (int s = 0; s < x.n(); ++s) {
    float* dst = v.sample_ptr(s);
    for (int k = 0; k < head_features_; ++k) {
      dst[k] = seed[s] * head_w_.value.data[k];
    }
  }
  for (int i = levels_ - 1; i >= 0; --i) {
    const Tensor u = leaky_relu_grad(cache.z[i], v, kSlope);
    v = convs_[i].backward_data(u, cache.a[i].h(), cache.a[i].w());
  }
  return v;
}

double Critic::gradient_penalty_backward(const Tensor& x_hat, float scale) {
  CriticCache cache;
  forward(x_hat, &cache);
  const int batch = x_hat.n();

  // First sweep: per-sample input gradients g = d(score)/d(x_hat), keeping
  // every intermediate u_i (the gradient at each pre-activation).
  std::vector<Tensor> u(levels_);
  const Tensor& top = cache.a[levels_];
  Tensor v(batch, top.c(), top.h(), top.w());
  for (int s = 0; s < batch; ++s) {
    float* dst = v.sample_ptr(s);
    for (int k = 0; k < head_features_; ++k) {
      dst[k] = head_w_.value.data[k];
    }
  }
  for (int i = levels_ - 1; i >= 0; --i) {
    u[i] = leaky_relu_grad(cache.z[i], v, kSlope);
    v = convs_[i].backward_data(u[i], cache.a[i].h(), cache.a[i].w());
  }
  const Tensor& g = v;

  // Penalty value and the seed for the second sweep.
  double gp = 0.0;
  Tensor r = Tensor::zeros_like(g);
  const std::int64_t per_sample = g.sample_size();
  for (int s = 0; s < batch; ++s) {
    const float* gs = g.sample_ptr(s);
    double sq = 0.0;
    for (std::int64_t k = 0; k < per_sample; ++k) {
      sq += static_cast<double>(gs[k]) * gs[k];
    }
    const double norm = std::sqrt(sq);
    const double diff = norm - 1.0;
    gp += diff * diff;
    // d((norm-1)^2)/dg = 2 (norm-1)/norm * g; guard the origin where the
    // norm is not differentiable.
    const double coef =
        norm > 1e-12
            ? static_cast<double>(scale) * 2.0 * diff / norm / batch
            : 0.0;
    float* rs = r.sample_ptr(s);
    for (std::int64_t k = 0; k < per_sample; ++k) {
      rs[k] = static_cast<float>(coef * gs[k]);
    }
  }
  gp /= batch;

  // Second sweep: adjoint of the backprop chain. Each backward_data(u_i)
  // was linear in both u_i and the conv weight, so the objective picks up
  // one weight-gradient product per level plus a head term.
  for (int i = 0; i < levels_; ++i) {
    convs_[i].weight_grad(r, u[i], convs_[i].weight.grad, nullptr);
    Tensor t = convs_[i].forward(r, /*with_bias=*/false);
    r = leaky_relu_grad(cache.z[i], t, kSlope);
  }
  for (int s = 0; s < batch; ++s) {
    const float* rs = r.sample_ptr(s);
    for (int k = 0; k < head_features_; ++k) {
      head_w_.grad.data[k] += rs[k];
    }
  }
  return gp;
}

std::vector<Param*> Critic::params() {
  std::vector<Param*> out;
  for (auto& c : convs_) {
    out.push_back(&c.weight);
    out.push_back(&c.bias);
  }
  out.push_back(&head_w_);
  out.push_back(&head_b_);
  return out;
}

}  // namespace pathgan::nn
