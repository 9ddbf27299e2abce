#include "pathgan/nn/unet.hpp"

#include <stdexcept>
#include <string>

namespace pathgan::nn {

namespace {
constexpr float kEncSlope = 0.2f;
constexpr float kDecSlope = 0.0f;  // plain relu in the decoder
}  // namespace

UNetGenerator::UNetGenerator(const GeneratorSpec& spec, Rng& init_rng)
    : spec_(spec), depth_(spec.depth) {
  if (depth_ < 2) {
    throw std::invalid_argument("generator depth must be resolved and >= 2");
  }
  auto feat = [&](int level) {
    return level == 0 ? spec_.in_channels : spec_.features_at(level);
  };

  for (int i = 0; i < depth_; ++i) {
    enc_.emplace_back(feat(i), feat(i + 1), 4, 2, 1,
                      "g.enc" + std::to_string(i));
    enc_.back().init_weights(init_rng);
  }
  enc_norm_.resize(depth_);
  for (int i = 1; i < depth_; ++i) {
    enc_norm_[i] = InstanceNorm(feat(i + 1), "g.enc_norm" + std::to_string(i));
    enc_norm_[i].init_weights(init_rng);
  }

  dec_.resize(depth_);
  dec_norm_.resize(depth_);
  for (int j = depth_ - 1; j >= 0; --j) {
    const int in_ch = (j == depth_ - 1) ? feat(depth_) : 2 * feat(j + 1);
    const int out_ch = (j >= 1) ? feat(j) : spec_.out_channels;
    dec_[j] = ConvTranspose2d(in_ch, out_ch, 4, 2, 1,
                              "g.dec" + std::to_string(j));
    dec_[j].init_weights(init_rng);
    if (j >= 1) {
      dec_norm_[j] = InstanceNorm(out_ch, "g.dec_norm" + std::to_string(j));
      dec_norm_[j].init_weights(init_rng);
    }
  }
}

Tensor UNetGenerator::forward(const Tensor& x, UNetCache* cache) const {
  if (x.c() != spec_.in_channels) {
    throw std::invalid_argument("generator: input channel mismatch");
  }
  if ((x.h() % (1 << depth_)) != 0 || (x.w() % (1 << depth_)) != 0) {
    throw std::invalid_argument(
        "generator: spatial dims must be divisible by 2^depth");
  }

  UNetCache local;
  UNetCache& cc = cache ? *cache : local;
  cc.enc_z.assign(depth_, {});
  cc.enc_n.assign(depth_, {});
  cc.enc_a.assign(depth_ + 1, {});
  cc.enc_stats.assign(depth_, {});
  cc.dec_x.assign(depth_, {});
  cc.dec_z.assign(depth_, {});
  cc.dec_n.assign(depth_, {});
  cc.dec_a.assign(depth_, {});
  cc.dec_stats.assign(depth_, {});
  if (cache) cc.input = x;

  cc.enc_a[0] = x;
  for (int i = 0; i < depth_; ++i) {
    cc.enc_z[i] = enc_[i].forward(cc.enc_a[i]);
    cc.enc_n[i] = (i >= 1)
                      ? enc_norm_[i].forward(cc.enc_z[i], cc.enc_stats[i])
                      : cc.enc_z[i];
    cc.enc_a[i + 1] = leaky_relu(cc.enc_n[i], kEncSlope);
  }

  Tensor h = cc.enc_a[depth_];
  for (int j = depth_ - 1; j >= 1; --j) {
    cc.dec_x[j] = h;
    cc.dec_z[j] = dec_[j].forward(cc.dec_x[j]);
    cc.dec_n[j] = dec_norm_[j].forward(cc.dec_z[j], cc.dec_stats[j]);
    cc.dec_a[j] = leaky_relu(cc.dec_n[j], kDecSlope);
    h = concat_channels(cc.dec_a[j], cc.enc_a[j]);
  }
  cc.dec_x[0] = h;
  return dec_[0].forward(cc.dec_x[0]);
}

void UNetGenerator::backward(const Tensor& dlogits, const UNetCache& cache) {
  std::vector<Tensor> skip_grads(depth_ + 1);

  // Final decoder layer (no norm, no activation).
  dec_[0].backward(cache.dec_x[0], dlogits);
  Tensor gh = dec_[0].backward_data(dlogits);

  for (int j = 1; j <= depth_ - 1; ++j) {
    // gh is the gradient w.r.t. concat(dec_a[j], enc_a[j]).
    Tensor ga, gskip;
    split_channels(gh, cache.dec_a[j].c(), ga, gskip);
    skip_grads[j] = std::move(gskip);
    Tensor gn = leaky_relu_grad(cache.dec_n[j], ga, kDecSlope);
    Tensor gz = dec_norm_[j].backward(cache.dec_z[j], cache.dec_stats[j], gn);
    dec_[j].backward(cache.dec_x[j], gz);
    gh = dec_[j].backward_data(gz);
  }

  // gh now reaches the bottleneck activation enc_a[depth_].
  Tensor ga = std::move(gh);
  for (int i = depth_ - 1; i >= 0; --i) {
    if (i + 1 <= depth_ - 1) {
      // Skip connection feeds enc_a[i+1] into the decoder as well.
      const std::int64_t n = ga.size();
      const float* src = skip_grads[i + 1].ptr();
      float* dst = ga.ptr();
      for (std::int64_t k = 0; k < n; ++k) dst[k] += src[k];
    }
    Tensor gn = leaky_relu_grad(cache.enc_n[i], ga, kEncSlope);
    Tensor gz = (i >= 1)
                    ? enc_norm_[i].backward(cache.enc_z[i], cache.enc_stats[i],
                                            gn)
                    : std::move(gn);
    enc_[i].backward(cache.enc_a[i], gz);
    if (i > 0) {
      ga = enc_[i].backward_data(gz, cache.enc_a[i].h(), cache.enc_a[i].w());
    }
  }
}

std::vector<Param*> UNetGenerator::params() {
  std::vector<Param*> out;
  for (auto& c : enc_) {
    out.push_back(&c.weight);
    out.push_back(&c.bias);
  }
  for (int i = 1; i < depth_; ++i) {
    out.push_back(&enc_norm_[i].gamma);
    out.push_back(&enc_norm_[i].beta);
  }
  for (auto& c : dec_) {
    out.push_back(&c.weight);
    out.push_back(&c.bias);
  }
  for (int j = 1; j < depth_; ++j) {
    out.push_back(&dec_norm_[j].gamma);
    out.push_back(&dec_norm_[j].beta);
  }
  return out;
}

}  // namespace pathgan::nn
