#pragma once

#include <cstdint>
#include <string>

namespace pathgan {

// Encoder-decoder generator over the 3 class channels. depth == 0 means
// "resolve from the input size" (log2(min(H, W)) - 1, bottleneck no smaller
// than 2x2).
struct GeneratorSpec {
  int in_channels = 3;
  int out_channels = 3;
  int depth = 0;
  int base_features = 64;
  int max_features = 512;
  std::string norm = "instance";        // skipped on the outermost layers
  std::string activation = "lrelu0.2";  // encoder; decoder uses relu

  int features_at(int level) const;  // level 1..depth
  bool operator==(const GeneratorSpec&) const = default;
};

// Convolution stack to a single scalar score per sample. The plain critic
// consumes exactly one channel (the path mask); the conditional ablation
// consumes the 3 input channels plus the 3 generated class channels.
struct DiscriminatorSpec {
  bool conditional_full_image = false;
  int levels = -1;  // -1 = resolve from the input size; 0 = linear head only
  int base_features = 64;
  int max_features = 512;

  int input_channels() const { return conditional_full_image ? 6 : 1; }
  int features_at(int level) const;
  bool operator==(const DiscriminatorSpec&) const = default;
};

enum class AdvMode { WganGp, Vanilla };
enum class SupMode { CrossEntropy, L1 };

std::string to_string(AdvMode m);
std::string to_string(SupMode m);
AdvMode adv_mode_from_string(const std::string& s);
SupMode sup_mode_from_string(const std::string& s);

struct LossConfig {
  double lambda_ce = 100.0;  // supervised term weight
  double lambda_gp = 10.0;   // gradient penalty coefficient
  AdvMode adv = AdvMode::WganGp;
  SupMode sup = SupMode::CrossEntropy;

  void validate() const;
  bool operator==(const LossConfig&) const = default;
};

struct OptimConfig {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;

  bool operator==(const OptimConfig&) const = default;
};

struct ModelHyper {
  GeneratorSpec generator;
  DiscriminatorSpec discriminator;
  LossConfig loss;
  OptimConfig optim;

  bool operator==(const ModelHyper&) const = default;

  std::string to_json() const;
  static ModelHyper from_json(const std::string& text);
};

// Cross-entropy generator, unconditional one-channel critic, WGAN-GP.
ModelHyper ganfinder_preset();
// L1 generator loss, conditional full-image discriminator, vanilla GAN.
ModelHyper pix2pix_baseline_preset();

ModelHyper preset_from_name(const std::string& name);

int resolve_depth(int requested, int height, int width);

}  // namespace pathgan
