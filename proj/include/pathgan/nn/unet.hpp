#pragma once

#include <vector>

#include "pathgan/model.hpp"
#include "pathgan/nn/layers.hpp"

namespace pathgan::nn {

struct UNetCache {
  Tensor input;
  // Encoder: conv output, norm output (pre-activation), activation.
  std::vector<Tensor> enc_z, enc_n, enc_a;
  std::vector<NormStats> enc_stats;
  // Decoder: block input, conv output, norm output, activation.
  std::vector<Tensor> dec_x, dec_z, dec_n, dec_a;
  std::vector<NormStats> dec_stats;
};

// Encoder-decoder with skip connections. Strided 4x4 convs halve the
// spatial size per level; transposed convs mirror them back up, with the
// matching encoder activation concatenated at each level. The outermost
// layers carry no normalization; the final layer emits raw class logits.
class UNetGenerator {
 public:
  UNetGenerator() = default;
  UNetGenerator(const GeneratorSpec& spec, Rng& init_rng);

  const GeneratorSpec& spec() const { return spec_; }
  int depth() const { return depth_; }

  // Spatial dims must be divisible by 2^depth. cache == nullptr runs
  // inference only.
  Tensor forward(const Tensor& x, UNetCache* cache) const;

  // Accumulates parameter gradients from d(loss)/d(logits).
  void backward(const Tensor& dlogits, const UNetCache& cache);

  std::vector<Param*> params();

 private:
  GeneratorSpec spec_;
  int depth_ = 0;
  std::vector<Conv2d> enc_;
  std::vector<InstanceNorm> enc_norm_;  // index i >= 1
  std::vector<ConvTranspose2d> dec_;    // dec_[j] produces level j
  std::vector<InstanceNorm> dec_norm_;  // index j >= 1
};

}  // namespace pathgan::nn
