#pragma once

#include <vector>

#include "pathgan/model.hpp"
#include "pathgan/nn/conv.hpp"

namespace pathgan::nn {

struct CriticCache {
  Tensor input;
  std::vector<Tensor> z;  // pre-activations per conv level
  std::vector<Tensor> a;  // activations; a[0] is the input
};

// Wasserstein critic / discriminator: strided conv + leaky relu stack,
// flattened into a single linear score per sample. No normalization layers,
// which keeps per-sample gradients independent for the penalty term. The
// head is tied to the spatial size the critic was built for.
class Critic {
 public:
  Critic() = default;
  Critic(const DiscriminatorSpec& spec, int height, int width, Rng& init_rng);

  const DiscriminatorSpec& spec() const { return spec_; }
  int levels() const { return levels_; }
  int input_height() const { return in_h_; }
  int input_width() const { return in_w_; }

  // Scores, one per sample. Rejects inputs whose channel count does not
  // match the spec (a full image cannot reach the plain path-mask critic).
  std::vector<float> forward(const Tensor& x, CriticCache* cache) const;

  // Accumulates parameter gradients for d(loss)/d(score) seeds.
  void backward_scores(const CriticCache& cache,
                       const std::vector<float>& dscore);

  // d(sum_b seed_b * score_b)/d(input); parameters untouched.
  Tensor input_gradient(const Tensor& x,
                        const std::vector<float>& seed) const;

  // Mean over the batch of (||grad_x D(x_hat)|| - 1)^2, with
  // d(scale * penalty)/d(parameters) accumulated into the gradients.
  // Differentiating the gradient norm needs a second sweep through the
  // backprop chain itself; leaky relu has zero curvature almost everywhere,
  // so only the conv weights and the head contribute.
  double gradient_penalty_backward(const Tensor& x_hat, float scale);

  std::vector<Param*> params();

 private:
  DiscriminatorSpec spec_;
  int levels_ = 0;
  int in_h_ = 0, in_w_ = 0;
  int head_features_ = 0;
  std::vector<Conv2d> convs_;
  Param head_w_;  // (features)
  Param head_b_;  // (1)
};

}  // namespace pathgan::nn
