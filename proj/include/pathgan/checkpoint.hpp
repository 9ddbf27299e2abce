#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pathgan/model.hpp"
#include "pathgan/nn/critic.hpp"
#include "pathgan/nn/unet.hpp"

namespace pathgan {

// Both networks plus the hyperparameters that produced them. height/width
// are the raster dims the critic head was built for.
struct ModelBundle {
  ModelHyper hyper;
  int height = 0;
  int width = 0;
  nn::UNetGenerator generator;
  nn::Critic critic;
};

// depth/levels resolved against the given dims; weights drawn from streams
// derived from seed.
ModelBundle make_bundle(ModelHyper hyper, int height, int width,
                        std::uint64_t seed);

// Optimizer and position state needed to resume a run exactly.
struct TrainerState {
  std::int64_t step = 0;
  std::int64_t adam_g_t = 0;
  std::int64_t adam_d_t = 0;
  std::uint64_t master_seed = 0;
  std::vector<nn::Tensor> g_m, g_v, d_m, d_v;
};

struct Checkpoint {
  ModelBundle bundle;
  std::optional<TrainerState> trainer;
};

// Versioned container: JSON header (hyperparameters, tensor directory,
// trainer state scalars) followed by raw little-endian float32 payloads.
// Round-trips bit-exactly.
void save_checkpoint(const std::string& path, ModelBundle& bundle,
                     const TrainerState* trainer = nullptr);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace pathgan
