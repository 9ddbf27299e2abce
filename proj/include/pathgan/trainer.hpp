#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pathgan/checkpoint.hpp"
#include "pathgan/dataset.hpp"
#include "pathgan/model.hpp"

namespace pathgan {

struct TrainConfig {
  std::string data_dir;
  std::string out_dir;
  ModelHyper hyper;
  int epochs = 20;
  std::int64_t max_steps = 0;  // 0 = run all epochs
  int batch_size = 16;
  int n_critic = 1;  // critic updates per generator update
  std::uint64_t seed = 1;
  std::int64_t checkpoint_every = 0;  // steps; 0 = final checkpoint only
  std::string device = "cpu";
  std::string resume;  // checkpoint path to continue from

  void validate() const;
};

struct TrainStepRow {
  std::int64_t step = 0;
  int epoch = 0;
  double g_total = 0.0;
  double g_sup = 0.0;
  double g_adv = 0.0;
  double d_loss = 0.0;
  double gp = 0.0;
  double seconds = 0.0;

  bool operator==(const TrainStepRow&) const = default;
};

struct TrainLog {
  std::vector<TrainStepRow> rows;

  std::string to_csv() const;
  static TrainLog from_csv(const std::string& text);
};

struct TrainResult {
  ModelBundle bundle;
  TrainLog log;
  std::string final_checkpoint;
};

// Raised when a loss turns non-finite; a diagnostic checkpoint has been
// written by then.
struct TrainAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Alternating critic/generator updates over the train split. Writes
// train.csv and checkpoints under cfg.out_dir. Fully deterministic for a
// fixed (config, seed) on one machine: every stochastic draw comes from a
// counter-derived stream, so a resumed run replays exactly.
TrainResult train(const TrainConfig& cfg);

// Single forward pass in inference mode.
ClassLogits infer(const ModelBundle& bundle, const ClassRaster& input);
ClassLogits infer_batch(const ModelBundle& bundle, const nn::Tensor& inputs);

}  // namespace pathgan
