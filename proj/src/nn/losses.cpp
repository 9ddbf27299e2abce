#include "pathgan/nn/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "pathgan/nn/kernels.hpp"

namespace pathgan::nn {

namespace {

// Palette intensities normalized to [0, 1], indexed by CellClass.
constexpr double kIntensity[3] = {1.0, 128.0 / 255.0, 0.0};

void check_targets(const Tensor& logits,
                   const std::vector<const ClassRaster*>& targets) {
  if (logits.c() != 3) {
    throw std::invalid_argument("loss: expected 3 class channels");
  }
  if (static_cast<int>(targets.size()) != logits.n()) {
    throw std::invalid_argument("loss: batch size mismatch");
  }
  for (const ClassRaster* t : targets) {
    if (t->height != logits.h() || t->width != logits.w()) {
      throw std::invalid_argument("loss: raster dimension mismatch");
    }
  }
}

// log(sigmoid(x)) without overflow.
double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x))
                  : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

LossGrad cross_entropy_loss(const Tensor& logits,
                            const std::vector<const ClassRaster*>& targets) {
  check_targets(logits, targets);
  const std::int64_t plane =
      static_cast<std::int64_t>(logits.h()) * logits.w();
  const double denom = static_cast<double>(logits.n()) * plane;

  Tensor probs = Tensor::zeros_like(logits);
  kernels::softmax_channels(logits.ptr(), probs.ptr(), logits.n(), 3, plane);

  LossGrad out;
  out.dlogits = probs;  // becomes (p - onehot) / count below
  double loss = 0.0;
  for (int s = 0; s < logits.n(); ++s) {
    const ClassRaster& target = *targets[s];
    float* dp = out.dlogits.sample_ptr(s);
    const float* pp = probs.sample_ptr(s);
    for (std::int64_t i = 0; i < plane; ++i) {
      const int label = static_cast<int>(target.labels[i]);
      loss -= std::log(std::max(1e-12, double(pp[label * plane + i])));
      dp[label * plane + i] -= 1.0f;
    }
  }
  kernels::scale(out.dlogits.ptr(), out.dlogits.size(),
                 static_cast<float>(1.0 / denom));
  out.value = loss / denom;
  return out;
}

LossGrad l1_intensity_loss(const Tensor& logits,
                           const std::vector<const ClassRaster*>& targets) {
  check_targets(logits, targets);
  const std::int64_t plane =
      static_cast<std::int64_t>(logits.h()) * logits.w();
  const double denom = static_cast<double>(logits.n()) * plane;

  Tensor probs = Tensor::zeros_like(logits);
  kernels::softmax_channels(logits.ptr(), probs.ptr(), logits.n(), 3, plane);

  LossGrad out;
  out.dlogits = Tensor::zeros_like(logits);
  double loss = 0.0;
  for (int s = 0; s < logits.n(); ++s) {
    const ClassRaster& target = *targets[s];
    const float* pp = probs.sample_ptr(s);
    float* dp = out.dlogits.sample_ptr(s);
    for (std::int64_t i = 0; i < plane; ++i) {
      double pred = 0.0;
      for (int c = 0; c < 3; ++c) {
        pred += kIntensity[c] * pp[c * plane + i];
      }
      const double tgt = kIntensity[static_cast<int>(target.labels[i])];
      const double diff = pred - tgt;
      loss += std::abs(diff);
      const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      // d(pred)/d(logit_c) = p_c * (intensity_c - pred)
      for (int c = 0; c < 3; ++c) {
        dp[c * plane + i] = static_cast<float>(
            sign / denom * pp[c * plane + i] * (kIntensity[c] - pred));
      }
    }
  }
  out.value = loss / denom;
  return out;
}

double wgan_generator_loss(const std::vector<float>& fake_scores,
                           std::vector<float>& dfake) {
  const double inv = 1.0 / static_cast<double>(fake_scores.size());
  dfake.assign(fake_scores.size(), static_cast<float>(-inv));
  double loss = 0.0;
  for (float s : fake_scores) loss -= s * inv;
  return loss;
}

double wgan_critic_loss(const std::vector<float>& real_scores,
                        const std::vector<float>& fake_scores,
                        std::vector<float>& dreal, std::vector<float>& dfake) {
  const double inv_r = 1.0 / static_cast<double>(real_scores.size());
  const double inv_f = 1.0 / static_cast<double>(fake_scores.size());
  dreal.assign(real_scores.size(), static_cast<float>(-inv_r));
  dfake.assign(fake_scores.size(), static_cast<float>(inv_f));
  double loss = 0.0;
  for (float s : fake_scores) loss += s * inv_f;
  for (float s : real_scores) loss -= s * inv_r;
  return loss;
}

double vanilla_generator_loss(const std::vector<float>& fake_scores,
                              std::vector<float>& dfake) {
  // Non-saturating: -mean log sigmoid(score).
  const double inv = 1.0 / static_cast<double>(fake_scores.size());
  dfake.resize(fake_scores.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < fake_scores.size(); ++i) {
    loss -= log_sigmoid(fake_scores[i]) * inv;
    dfake[i] = static_cast<float>(-(1.0 - sigmoid(fake_scores[i])) * inv);
  }
  return loss;
}

double vanilla_critic_loss(const std::vector<float>& real_scores,
                           const std::vector<float>& fake_scores,
                           std::vector<float>& dreal,
                           std::vector<float>& dfake) {
  // -mean[log sigmoid(real)] - mean[log(1 - sigmoid(fake))]
  const double inv_r = 1.0 / static_cast<double>(real_scores.size());
  const double inv_f = 1.0 / static_cast<double>(fake_scores.size());
  dreal.resize(real_scores.size());
  dfake.resize(fake_scores.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < real_scores.size(); ++i) {
    loss -= log_sigmoid(real_scores[i]) * inv_r;
    dreal[i] = static_cast<float>(-(1.0 - sigmoid(real_scores[i])) * inv_r);
  }
  for (std::size_t i = 0; i < fake_scores.size(); ++i) {
    loss -= log_sigmoid(-fake_scores[i]) * inv_f;
    dfake[i] = static_cast<float>(sigmoid(fake_scores[i]) * inv_f);
  }
  return loss;
}

double total_generator_loss(const Tensor& logits,
                            const std::vector<const ClassRaster*>& targets,
                            const std::vector<float>& fake_scores,
                            const LossConfig& cfg) {
  const double sup = cfg.sup == SupMode::CrossEntropy
                         ? cross_entropy_loss(logits, targets).value
                         : l1_intensity_loss(logits, targets).value;
  std::vector<float> seeds;
  const double adv = cfg.adv == AdvMode::WganGp
                         ? wgan_generator_loss(fake_scores, seeds)
                         : vanilla_generator_loss(fake_scores, seeds);
  return cfg.lambda_ce * sup + adv;
}

Tensor softmax_probs(const Tensor& logits) {
  Tensor probs = Tensor::zeros_like(logits);
  kernels::softmax_channels(logits.ptr(), probs.ptr(), logits.n(), logits.c(),
                            static_cast<std::int64_t>(logits.h()) * logits.w());
  return probs;
}

Tensor path_probability_backward(const Tensor& logits, const Tensor& dmask) {
  if (logits.c() != 3 || dmask.c() != 1) {
    throw std::invalid_argument("path_probability_backward: bad channels");
  }
  const std::int64_t plane =
      static_cast<std::int64_t>(logits.h()) * logits.w();
  Tensor probs = softmax_probs(logits);
  Tensor dlogits = Tensor::zeros_like(logits);
  for (int s = 0; s < logits.n(); ++s) {
    const float* pp = probs.sample_ptr(s);
    const float* dm = dmask.sample_ptr(s);
    float* dl = dlogits.sample_ptr(s);
    for (std::int64_t i = 0; i < plane; ++i) {
      const double p_path = pp[2 * plane + i];
      const double seed = dm[i];
      // d(p_path)/d(logit_c) = p_path * (delta_{c,path} - p_c)
      for (int c = 0; c < 3; ++c) {
        const double delta = c == 2 ? 1.0 : 0.0;
        dl[c * plane + i] = static_cast<float>(
            seed * p_path * (delta - pp[c * plane + i]));
      }
    }
  }
  return dlogits;
}

Tensor softmax_backward(const Tensor& logits, const Tensor& dprobs) {
  if (!logits.same_shape(dprobs)) {
    throw std::invalid_argument("softmax_backward: shape mismatch");
  }
  const int ch = logits.c();
  const std::int64_t plane =
      static_cast<std::int64_t>(logits.h()) * logits.w();
  Tensor probs = softmax_probs(logits);
  Tensor dlogits = Tensor::zeros_like(logits);
  for (int s = 0; s < logits.n(); ++s) {
    const float* pp = probs.sample_ptr(s);
    const float* dp = dprobs.sample_ptr(s);
    float* dl = dlogits.sample_ptr(s);
    for (std::int64_t i = 0; i < plane; ++i) {
      double dot = 0.0;
      for (int c = 0; c < ch; ++c) {
        dot += static_cast<double>(dp[c * plane + i]) * pp[c * plane + i];
      }
      for (int c = 0; c < ch; ++c) {
        dl[c * plane + i] = static_cast<float>(
            pp[c * plane + i] * (dp[c * plane + i] - dot));
      }
    }
  }
  return dlogits;
}

bool all_finite(const Tensor& t) {
  for (float v : t.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace pathgan::nn
