#pragma once

#include <vector>

#include "pathgan/grid.hpp"
#include "pathgan/model.hpp"
#include "pathgan/nn/tensor.hpp"

namespace pathgan::nn {

struct LossGrad {
  double value = 0.0;
  Tensor dlogits;
};

// Mean per-pixel 3-class cross-entropy against raster labels.
LossGrad cross_entropy_loss(const Tensor& logits,
                            const std::vector<const ClassRaster*>& targets);

// Ablation: mean absolute difference of rendered intensities in [0, 1].
// The predicted intensity of a pixel is the softmax-weighted palette value,
// which keeps the loss differentiable.
LossGrad l1_intensity_loss(const Tensor& logits,
                           const std::vector<const ClassRaster*>& targets);

// Adversarial terms. Each fills d(loss)/d(score) seeds alongside the value.
double wgan_generator_loss(const std::vector<float>& fake_scores,
                           std::vector<float>& dfake);
double wgan_critic_loss(const std::vector<float>& real_scores,
                        const std::vector<float>& fake_scores,
                        std::vector<float>& dreal, std::vector<float>& dfake);
double vanilla_generator_loss(const std::vector<float>& fake_scores,
                              std::vector<float>& dfake);
double vanilla_critic_loss(const std::vector<float>& real_scores,
                           const std::vector<float>& fake_scores,
                           std::vector<float>& dreal,
                           std::vector<float>& dfake);

// Weighted sum of the two generator components: lambda_ce * supervised +
// adversarial, under the configured modes.
double total_generator_loss(const Tensor& logits,
                            const std::vector<const ClassRaster*>& targets,
                            const std::vector<float>& fake_scores,
                            const LossConfig& cfg);

// 3-channel softmax probabilities of logits (N,3,H,W).
Tensor softmax_probs(const Tensor& logits);

// Chain rule through the PATH-probability channel: given d(loss)/d(mask)
// for the (N,1,H,W) soft mask, produce d(loss)/d(logits).
Tensor path_probability_backward(const Tensor& logits, const Tensor& dmask);

// Chain rule through the full 3-channel softmax.
Tensor softmax_backward(const Tensor& logits, const Tensor& dprobs);

bool all_finite(const Tensor& t);

}  // namespace pathgan::nn
